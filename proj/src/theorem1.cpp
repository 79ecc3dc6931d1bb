#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "finslerlab/errors.hpp"
#include "finslerlab/projective.hpp"

namespace finslerlab {

namespace {

struct PairPlan {
  Vector p;
  Vector q;
  double sub_start = 0.0;  // fractions of the geodesic length
  double sub_end = 1.0;
};

}  // namespace

Theorem1Report theorem1_verify(const FinslerStructure& structure, const FunkGauge& gauge, std::size_t pairs,
                               std::uint64_t seed, double tolerance, const Theorem1Options& options) {
  if (pairs == 0) throw std::invalid_argument("theorem1_verify: need at least one pair");
  if (!(tolerance > 0.0)) throw std::invalid_argument("theorem1_verify: tolerance must be positive");
  const int n = structure.dimension();
  if (n < 2) throw PreconditionError("theorem1_verify: dimension must be at least 2");

  Theorem1Report report;
  report.seed = seed;
  report.tolerance = tolerance;
  report.k = gauge.k();
  report.einstein = einstein_classify(structure, options.einstein_samples, seed, options.einstein_tolerance);
  if (!report.einstein.einstein_constant) {
    throw PreconditionError("theorem1_verify: theoretical value unavailable, structure is not Einstein with "
                            "Ric_ij = -c^2 g_ij, c > 0");
  }
  const double c = *report.einstein.einstein_constant;
  report.einstein_constant = c;
  report.factor = 2.0 * c / (std::sqrt(n - 1.0) * gauge.k());

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit;
  std::vector<PairPlan> plans;
  while (plans.size() < pairs) {
    PairPlan plan{structure.sample_point(rng), structure.sample_point(rng)};
    if ((plan.q - plan.p).norm() < 1e-3) continue;
    double u = unit(rng), v = unit(rng);
    if (u > v) std::swap(u, v);
    plan.sub_start = u;
    plan.sub_end = std::max(v, u + 1e-2);
    plan.sub_end = std::min(plan.sub_end, 1.0);
    plans.push_back(std::move(plan));
  }

  report.pairs.resize(pairs);
  num::parallel_for(pairs, options.threads, [&](std::size_t i) {
    const PairPlan& plan = plans[i];
    Theorem1Pair& out = report.pairs[i];
    out.p = plan.p;
    out.q = plan.q;
    DistanceResult bvp = finsler_distance(structure, plan.p, plan.q, options.distance);
    out.finsler = bvp.distance;
    out.theoretical = *report.factor * out.finsler;
    const auto geo = std::make_shared<const Geodesic>(std::move(*bvp.geodesic));

    const ProjectiveMap map = canonical_projective_map(structure, geo, c);
    Chain chain;
    chain.points = {plan.p, plan.q};
    chain.segments.push_back(ChainSegment{map, 0.0, map.end_parameter()});
    out.canonical = chain_length(gauge, chain);
    out.discrepancy = std::abs(out.canonical - out.theoretical) / out.theoretical;

    out.lemma2_margin = lemma2_check(structure, gauge, map, 0.0, map.end_parameter(), c, options.distance).margin;
    const double len = geo->length();
    out.lemma2_sub_margin = lemma2_check(structure, gauge, map, map.parameter(plan.sub_start * len),
                                         map.parameter(plan.sub_end * len), c, options.distance)
                                .margin;

    ProjectiveParameterOptions popts;
    popts.tolerance = 1e-10;
    popts.grid_points = 11;
    popts.einstein_constant = c;
    out.parameter_fit_residual = projective_parameter(structure, *geo, popts).mobius_residual;
  });

  report.min_lemma2_margin = std::numeric_limits<double>::infinity();
  for (const auto& pair : report.pairs) {
    report.max_discrepancy = std::max(report.max_discrepancy, pair.discrepancy);
    report.min_lemma2_margin = std::min({report.min_lemma2_margin, pair.lemma2_margin, pair.lemma2_sub_margin});
    report.max_parameter_fit_residual = std::max(report.max_parameter_fit_residual, pair.parameter_fit_residual);
  }
  report.passed = report.max_discrepancy <= tolerance && report.min_lemma2_margin >= -1e-6 &&
                  report.max_parameter_fit_residual <= 1e-6;
  return report;
}

}  // namespace finslerlab
