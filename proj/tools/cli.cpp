#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "finslerlab/errors.hpp"
#include "finslerlab/reports.hpp"

namespace finslerlab::cli {

namespace {

using nlohmann::json;

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  int threads = 1;
};

int default_threads() {
  if (const char* env = std::getenv("FINSLERLAB_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw ConfigError(std::string("FINSLERLAB_THREADS is not an integer: ") + env);
    }
  }
  return 1;
}

Vector parse_point(const std::vector<double>& values, int dimension, const std::string& name) {
  if (static_cast<int>(values.size()) != dimension) {
    throw ConfigError(name + " needs " + std::to_string(dimension) + " comma-separated coordinates");
  }
  return to_vector(values);
}

FinslerStructure load_structure(const std::string& path) { return make_metric(load_metric_config(path)); }

class Emitter {
 public:
  Emitter(const Common& common, std::ostream& out) : common_(common), out_(out) {}

  void text(const std::string& body) {
    if (common_.out.empty()) {
      out_ << body;
      return;
    }
    std::ofstream file(common_.out);
    if (!file) throw ConfigError("cannot open output file " + common_.out);
    file << body;
  }

  void emit(json document) {
    document["seed"] = common_.seed;
    text(document.dump(2) + "\n");
  }

 private:
  const Common& common_;
  std::ostream& out_;
};

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return usage_error;
  if (dynamic_cast<const PreconditionError*>(&e)) return precondition_failure;
  if (dynamic_cast<const ConvexityViolation*>(&e)) return validation_failure;
  if (dynamic_cast<const Error*>(&e)) return domain_failure;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return usage_error;
  return domain_failure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finsler geometry toolkit"};
  app.require_subcommand(1);
  Common common;
  common.threads = 1;
  app.add_option("--seed", common.seed, "random seed")->capture_default_str();
  app.add_option("--out", common.out, "output file (default stdout)");
  auto* threads_opt = app.add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);

  // metric validate
  auto* metric = app.add_subcommand("metric", "metric operations")->require_subcommand(1);
  auto* validate = metric->add_subcommand("validate", "check the Finsler axioms on samples");
  std::string validate_config;
  std::size_t validate_samples = 200;
  validate->add_option("config", validate_config)->required();
  validate->add_option("--samples", validate_samples)->capture_default_str();

  // geodesic trace
  auto* geodesic = app.add_subcommand("geodesic", "geodesic operations")->require_subcommand(1);
  auto* trace = geodesic->add_subcommand("trace", "integrate a unit-speed geodesic and write CSV");
  std::string trace_config;
  std::vector<double> trace_x0, trace_y0;
  double trace_length = 1.0, trace_step = 0.0, trace_tol = 1e-10;
  trace->add_option("config", trace_config)->required();
  trace->add_option("--x0", trace_x0)->required()->delimiter(',');
  trace->add_option("--y0", trace_y0)->required()->delimiter(',');
  trace->add_option("--length", trace_length, "signed arc length")->capture_default_str();
  trace->add_option("--step", trace_step, "output spacing (0: integrator steps)")->capture_default_str();
  trace->add_option("--tolerance", trace_tol)->capture_default_str();

  // curvature report
  auto* curvature = app.add_subcommand("curvature", "curvature operations")->require_subcommand(1);
  auto* creport = curvature->add_subcommand("report", "Riemann, flag and Ricci curvature at a flagpole");
  std::string curv_config;
  std::vector<double> curv_x, curv_y;
  std::vector<std::vector<double>> curv_flags;
  int curv_random = 8;
  creport->add_option("config", curv_config)->required();
  creport->add_option("--x", curv_x)->required()->delimiter(',');
  creport->add_option("--y", curv_y)->required()->delimiter(',');
  creport->add_option("--flag", curv_flags, "transverse edge u (repeatable)")->delimiter(',');
  creport->add_option("--random-flags", curv_random, "random flags when no --flag is given")->capture_default_str();

  // einstein check
  auto* einstein = app.add_subcommand("einstein", "Einstein classification")->require_subcommand(1);
  auto* echeck = einstein->add_subcommand("check", "classify Ric_ij against g_ij");
  std::string ein_config;
  std::size_t ein_samples = 20;
  double ein_tol = 1e-6;
  echeck->add_option("config", ein_config)->required();
  echeck->add_option("--samples", ein_samples)->capture_default_str();
  echeck->add_option("--tolerance", ein_tol)->capture_default_str();

  // distance
  auto* distance = app.add_subcommand("distance", "Finsler distance and pseudo-distance");
  std::string dist_config;
  std::vector<double> dist_from, dist_to;
  bool dist_pseudo = false;
  double dist_k = 1.0;
  int dist_chains = 0;
  distance->add_option("config", dist_config)->required();
  distance->add_option("--from", dist_from)->required()->delimiter(',');
  distance->add_option("--to", dist_to)->required()->delimiter(',');
  distance->add_flag("--pseudo", dist_pseudo, "also compute the pseudo-distance");
  distance->add_option("--funk-k", dist_k, "Funk gauge constant")->capture_default_str();
  distance->add_option("--random-chains", dist_chains, "random chains to sample")->capture_default_str();

  // theorem1 verify
  auto* theorem1 = app.add_subcommand("theorem1", "proportionality of pseudo-distance and distance")
                       ->require_subcommand(1);
  auto* verify = theorem1->add_subcommand("verify", "sample pairs and compare");
  std::string thm_config;
  std::size_t thm_pairs = 20;
  double thm_tol = 1e-4, thm_k = 1.0;
  verify->add_option("config", thm_config)->required();
  verify->add_option("--pairs", thm_pairs)->capture_default_str();
  verify->add_option("--tolerance", thm_tol)->capture_default_str();
  verify->add_option("--funk-k", thm_k)->capture_default_str();

  // projective compare
  auto* projective = app.add_subcommand("projective", "projective relations")->require_subcommand(1);
  auto* compare = projective->add_subcommand("compare", "test projective relatedness and homothety");
  std::string cmp_a, cmp_b;
  std::size_t cmp_samples = 50;
  double cmp_tol = 1e-6;
  compare->add_option("config_a", cmp_a)->required();
  compare->add_option("config_b", cmp_b)->required();
  compare->add_option("--samples", cmp_samples)->capture_default_str();
  compare->add_option("--tolerance", cmp_tol)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return usage_error;
  }

  try {
    if (threads_opt->count() == 0) common.threads = default_threads();
    Emitter emitter(common, out);

    if (validate->parsed()) {
      const MetricConfig config = load_metric_config(validate_config);
      std::optional<FinslerStructure> built;
      try {
        built.emplace(make_metric(config));
      } catch (const ConvexityViolation& e) {
        emitter.emit({{"metric", to_string(config.family)},
                      {"samples", validate_samples},
                      {"passed", false},
                      {"violations", {std::string("convexity violation: ") + e.what()}}});
        err << "violation: convexity violation: " << e.what() << "\n";
        return validation_failure;
      }
      const FinslerStructure& s = *built;
      const ValidationReport report = validate_structure(s, validate_samples, common.seed);
      json doc = to_json(report);
      doc["metric"] = s.name();
      emitter.emit(doc);
      if (!report.passed()) {
        for (const auto& v : report.violations) err << "violation: " << v << "\n";
        return validation_failure;
      }
      return ok;
    }

    if (trace->parsed()) {
      const FinslerStructure s = load_structure(trace_config);
      const Vector x0 = parse_point(trace_x0, s.dimension(), "--x0");
      const Vector y0 = parse_point(trace_y0, s.dimension(), "--y0");
      try {
        const Geodesic geo = geodesic_ivp(s, x0, y0, trace_length, GeodesicOptions{trace_tol, SprayPath::fast, {}});
        std::ostringstream csv;
        csv << "# seed=" << common.seed << "\n";
        write_geodesic_csv(csv, s, geo, trace_step);
        emitter.text(csv.str());
      } catch (const DomainExitError& e) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "domain exit at arc length " << e.last_parameter();
        err << msg.str() << "\n";
        return domain_failure;
      }
      return ok;
    }

    if (creport->parsed()) {
      const FinslerStructure s = load_structure(curv_config);
      const Vector x = parse_point(curv_x, s.dimension(), "--x");
      const Vector y = parse_point(curv_y, s.dimension(), "--y");
      std::vector<Vector> flags;
      for (const auto& u : curv_flags) flags.push_back(parse_point(u, s.dimension(), "--flag"));
      if (flags.empty()) {
        std::mt19937_64 rng(common.seed);
        for (int i = 0; i < curv_random; ++i) flags.push_back(s.sample_vector(rng));
      }
      emitter.emit(curvature_report(s, x, y, flags));
      return ok;
    }

    if (echeck->parsed()) {
      const FinslerStructure s = load_structure(ein_config);
      json doc = to_json(einstein_classify(s, ein_samples, common.seed, ein_tol));
      doc["metric"] = s.name();
      emitter.emit(doc);
      return ok;
    }

    if (distance->parsed()) {
      const FinslerStructure s = load_structure(dist_config);
      const Vector p = parse_point(dist_from, s.dimension(), "--from");
      const Vector q = parse_point(dist_to, s.dimension(), "--to");
      if (!dist_pseudo) {
        emitter.emit(to_json(finsler_distance(s, p, q)));
        return ok;
      }
      const FunkGauge gauge(dist_k);
      const EinsteinReport ein = einstein_classify(s, 12, common.seed, 1e-6);
      PseudoDistanceOptions opts;
      opts.random_chains = dist_chains;
      opts.seed = common.seed;
      opts.threads = common.threads;
      const PseudoDistanceResult result = pseudo_distance(s, p, q, gauge, ein, opts);
      json doc = to_json(result);
      doc["k"] = dist_k;
      doc["d_M"] = result.theoretical ? json(*result.theoretical) : json(nullptr);
      emitter.emit(doc);
      if (!result.theoretical_available) err << "theoretical value unavailable: structure is not Einstein\n";
      return ok;
    }

    if (verify->parsed()) {
      const FinslerStructure s = load_structure(thm_config);
      Theorem1Options opts;
      opts.threads = common.threads;
      const Theorem1Report report = theorem1_verify(s, FunkGauge(thm_k), thm_pairs, common.seed, thm_tol, opts);
      emitter.emit(to_json(report));
      return report.passed ? ok : validation_failure;
    }

    if (compare->parsed()) {
      const FinslerStructure a = load_structure(cmp_a);
      const FinslerStructure b = load_structure(cmp_b);
      emitter.emit(to_json(projective_relation(a, b, cmp_samples, common.seed, cmp_tol)));
      return ok;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return usage_error;
}

}  // namespace finslerlab::cli
