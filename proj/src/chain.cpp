#include <algorithm>
#include <cmath>
#include <random>

#include "finslerlab/errors.hpp"
#include "finslerlab/projective.hpp"

namespace finslerlab {

FunkGauge::FunkGauge(double k) : k_(k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("FunkGauge: k must be positive");
}

double FunkGauge::metric(double u, double y) const {
  if (!contains(u)) throw PreconditionError("FunkGauge: point outside (-1, 1)");
  return (std::abs(y) + u * y) / ((1.0 - u * u) * k_);
}

double funk_distance(const FunkGauge& gauge, double a, double b) {
  if (!FunkGauge::contains(a) || !FunkGauge::contains(b)) {
    throw PreconditionError("funk_distance: endpoints must lie in (-1, 1)");
  }
  const double cross = std::log((1.0 - a) * (1.0 + b) / ((1.0 - b) * (1.0 + a)));
  const double shift = std::log((1.0 - a * a) / (1.0 - b * b));
  return (std::abs(cross) + shift) / (2.0 * gauge.k());
}

// ---------------------------------------------------------------------------

ProjectiveMap::ProjectiveMap(std::shared_ptr<const Geodesic> geodesic, double j, MobiusMap normalization)
    : geodesic_(std::move(geodesic)), j_(j), normalization_(normalization) {
  if (!geodesic_) throw std::invalid_argument("ProjectiveMap: missing geodesic");
  if (!(j_ > 0.0)) throw PreconditionError("ProjectiveMap: j must be positive");
  if (geodesic_->backward()) throw PreconditionError("ProjectiveMap: geodesic must run forward");
  if (std::abs(normalization_.determinant()) <= 0.0) throw DegenerateFitError("ProjectiveMap: singular normalization");
}

double ProjectiveMap::parameter(double s) const { return normalization_(-std::expm1(-2.0 * j_ * s)); }

double ProjectiveMap::arc_length(double tau) const {
  const double base = normalization_.inverse()(tau);
  if (!(base < 1.0)) throw std::out_of_range("ProjectiveMap: parameter beyond the end of the geodesic");
  return -std::log1p(-base) / (2.0 * j_);
}

Vector ProjectiveMap::operator()(double tau) const {
  const double s = arc_length(tau);
  const double len = geodesic_->length();
  const double eps = 1e-12 * std::max(1.0, len);
  if (s < -eps || s > len + eps) throw std::out_of_range("ProjectiveMap: parameter outside the integrated arc");
  return geodesic_->position(std::clamp(s, 0.0, len));
}

ProjectiveMap ProjectiveMap::renormalized(const MobiusMap& m) const {
  return ProjectiveMap(geodesic_, j_, m.compose(normalization_));
}

bool ProjectiveMap::covers_interval() const {
  const MobiusMap inv = normalization_.inverse();
  if (const auto pole = inv.pole(); pole && *pole >= -1.0 && *pole <= 1.0) return false;
  return std::max(inv(-1.0), inv(1.0)) <= 1.0 + 1e-15;
}

ProjectiveMap canonical_projective_map(const FinslerStructure& structure, std::shared_ptr<const Geodesic> geodesic,
                                       double einstein_constant) {
  if (!(einstein_constant > 0.0)) {
    throw PreconditionError("canonical_projective_map: needs Ric_ij = -c^2 g_ij with c > 0");
  }
  if (structure.dimension() < 2) throw PreconditionError("canonical_projective_map: dimension must be at least 2");
  const double j = einstein_constant / std::sqrt(structure.dimension() - 1.0);
  return ProjectiveMap(std::move(geodesic), j);
}

ProjectiveMap canonical_projective_map(const FinslerStructure& structure, std::shared_ptr<const Geodesic> geodesic,
                                       const EinsteinReport& report) {
  if (!report.einstein_constant) {
    throw PreconditionError("canonical_projective_map: structure is not Einstein with a negative constant factor");
  }
  return canonical_projective_map(structure, std::move(geodesic), *report.einstein_constant);
}

// ---------------------------------------------------------------------------

double chain_length(const FunkGauge& gauge, const Chain& chain, double stitch_tolerance) {
  if (chain.points.empty()) throw MalformedChainError("chain_length: chain has no points");
  if (chain.segments.size() + 1 != chain.points.size()) {
    throw MalformedChainError("chain_length: expected one segment per consecutive pair of points");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < chain.segments.size(); ++i) {
    const auto& seg = chain.segments[i];
    if (!FunkGauge::contains(seg.a) || !FunkGauge::contains(seg.b)) {
      throw MalformedChainError("chain_length: segment " + std::to_string(i) + " parameters leave (-1, 1)");
    }
    Vector fa, fb;
    try {
      fa = seg.map(seg.a);
      fb = seg.map(seg.b);
    } catch (const std::out_of_range&) {
      throw MalformedChainError("chain_length: segment " + std::to_string(i) + " parameters leave its geodesic");
    }
    if ((fa - chain.points[i]).norm() > stitch_tolerance || (fb - chain.points[i + 1]).norm() > stitch_tolerance) {
      throw MalformedChainError("chain_length: segment " + std::to_string(i) + " does not stitch its end points");
    }
    total += funk_distance(gauge, seg.a, seg.b);
  }
  return total;
}

Chain canonical_chain(const FinslerStructure& structure, std::span<const Vector> points, double einstein_constant,
                      const DistanceOptions& options) {
  Chain chain;
  chain.points.assign(points.begin(), points.end());
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    DistanceResult leg = finsler_distance(structure, points[i], points[i + 1], options);
    std::shared_ptr<const Geodesic> geo;
    if (leg.geodesic) {
      geo = std::make_shared<const Geodesic>(std::move(*leg.geodesic));
    } else {
      geo = std::make_shared<const Geodesic>(
          geodesic_ivp(structure, points[i], Vector::Unit(structure.dimension(), 0), 0.0));
    }
    ProjectiveMap map = canonical_projective_map(structure, geo, einstein_constant);
    const double b = map.end_parameter();
    chain.segments.push_back(ChainSegment{std::move(map), 0.0, b});
  }
  return chain;
}

// ---------------------------------------------------------------------------

Lemma2Result lemma2_check(const FinslerStructure& structure, const FunkGauge& gauge, const ProjectiveMap& map,
                          double a, double b, double einstein_constant, const DistanceOptions& options) {
  if (!(einstein_constant > 0.0)) throw PreconditionError("lemma2_check: Einstein constant must be positive");
  if (!FunkGauge::contains(a) || !FunkGauge::contains(b)) {
    throw PreconditionError("lemma2_check: parameters must lie in (-1, 1)");
  }
  Lemma2Result out;
  out.factor = 2.0 * einstein_constant / (std::sqrt(structure.dimension() - 1.0) * gauge.k());
  out.funk = funk_distance(gauge, a, b);
  out.finsler = finsler_distance(structure, map(a), map(b), options).distance;
  out.margin = out.funk - out.factor * out.finsler;
  out.holds = out.margin >= -1e-6;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Random intermediate points scattered around the segment p -> q.
std::vector<Vector> random_waypoints(const FinslerStructure& structure, const Vector& p, const Vector& q,
                                     int max_intermediate, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count_dist(1, std::max(1, max_intermediate));
  std::uniform_real_distribution<double> unit;
  std::normal_distribution<double> normal;
  const int m = count_dist(rng);
  std::vector<double> ts(static_cast<std::size_t>(m));
  for (auto& t : ts) t = unit(rng);
  std::sort(ts.begin(), ts.end());
  const double sigma = 0.15 * std::max((q - p).norm(), 0.05);
  std::vector<Vector> points{p};
  for (double t : ts) {
    Vector x = p + t * (q - p);
    for (auto& c : x) c += sigma * normal(rng);
    const double r = x.norm();
    if (r > structure.sampling_radius()) x *= structure.sampling_radius() / r;
    points.push_back(x);
  }
  points.push_back(q);
  return points;
}

}  // namespace

PseudoDistanceResult pseudo_distance(const FinslerStructure& structure, const Vector& p, const Vector& q,
                                     const FunkGauge& gauge, const EinsteinReport& einstein,
                                     const PseudoDistanceOptions& options) {
  PseudoDistanceResult out;
  const DistanceResult direct = finsler_distance(structure, p, q, options.distance);
  out.finsler_distance = direct.distance;
  if (!einstein.einstein_constant) return out;

  const double c = *einstein.einstein_constant;
  const int n = structure.dimension();
  out.theoretical_available = true;
  out.einstein_constant = c;
  out.factor = 2.0 * c / (std::sqrt(n - 1.0) * gauge.k());
  out.theoretical = *out.factor * out.finsler_distance;

  Chain chain;
  chain.points = {p, q};
  std::shared_ptr<const Geodesic> geo =
      direct.geodesic ? std::make_shared<const Geodesic>(*direct.geodesic)
                      : std::make_shared<const Geodesic>(geodesic_ivp(structure, p, Vector::Unit(n, 0), 0.0));
  ProjectiveMap map = canonical_projective_map(structure, geo, c);
  const double b = map.end_parameter();
  chain.segments.push_back(ChainSegment{std::move(map), 0.0, b});
  out.canonical = chain_length(gauge, chain);
  out.discrepancy = *out.theoretical > 0.0 ? std::abs(*out.canonical - *out.theoretical) / *out.theoretical
                                           : std::abs(*out.canonical - *out.theoretical);

  if (options.random_chains > 0) {
    std::mt19937_64 rng(options.seed);
    std::vector<std::vector<Vector>> waypoints;
    for (int r = 0; r < options.random_chains; ++r) {
      waypoints.push_back(random_waypoints(structure, p, q, options.max_intermediate, rng));
    }
    std::vector<double> lengths(waypoints.size());
    num::parallel_for(waypoints.size(), options.threads, [&](std::size_t r) {
      const Chain random = canonical_chain(structure, waypoints[r], c, options.distance);
      lengths[r] = chain_length(gauge, random);
    });
    out.random_best = *std::min_element(lengths.begin(), lengths.end());
    out.random_chains = options.random_chains;
  }
  return out;
}

}  // namespace finslerlab
