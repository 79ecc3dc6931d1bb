#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "finslerlab/errors.hpp"
#include "finslerlab/projective.hpp"

namespace finslerlab {

namespace {

// Spread of (G_B^i - G_A^i) / y^i over the well-conditioned components, and their mean.
std::pair<double, double> quotient_spread(const Vector& d, const Vector& y) {
  const double ymax = y.cwiseAbs().maxCoeff();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  int count = 0;
  for (int i = 0; i < y.size(); ++i) {
    if (std::abs(y(i)) < 0.1 * ymax) continue;
    const double qi = d(i) / y(i);
    lo = std::min(lo, qi);
    hi = std::max(hi, qi);
    sum += qi;
    ++count;
  }
  return {hi - lo, sum / count};
}

}  // namespace

ProjectiveRelation projective_relation(const FinslerStructure& a, const FinslerStructure& b, std::size_t samples,
                                       std::uint64_t seed, double tolerance) {
  if (a.dimension() != b.dimension()) throw PreconditionError("projective_relation: dimensions differ");
  if (samples == 0) throw std::invalid_argument("projective_relation: need at least one sample");
  if (!(tolerance > 0.0)) throw std::invalid_argument("projective_relation: tolerance must be positive");
  const FinslerStructure& small = a.sampling_radius() <= b.sampling_radius() ? a : b;

  ProjectiveRelation out;
  out.samples = samples;
  out.seed = seed;
  out.tolerance = tolerance;

  std::mt19937_64 rng(seed);
  std::vector<double> ratios;
  bool related = true;
  double max_factor = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vector x = small.sample_point(rng);
    if (!a.contains(x) || !b.contains(x)) throw PreconditionError("projective_relation: domains do not overlap");
    const Vector y = small.sample_vector(rng).normalized();
    const Vector d = spray_coefficients(b, x, y) - spray_coefficients(a, x, y);
    const auto [spread, p] = quotient_spread(d, y);
    const double bound = tolerance * (1.0 + std::abs(p));
    out.quotient_disagreement = std::max(out.quotient_disagreement, spread);
    if (spread > bound) related = false;
    out.factors.push_back(p);
    max_factor = std::max(max_factor, std::abs(p));

    const Vector y2 = 2.0 * y;
    const Vector d2 = spray_coefficients(b, x, y2) - spray_coefficients(a, x, y2);
    const double p2 = quotient_spread(d2, y2).second;
    out.homogeneity_residual = std::max(out.homogeneity_residual, std::abs(p2 - 2.0 * p));

    ratios.push_back(b(x, y) / a(x, y));
  }
  out.related = related && out.homogeneity_residual <= tolerance * (1.0 + 2.0 * max_factor);

  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  double mean = 0.0;
  for (double r : ratios) mean += r;
  mean /= static_cast<double>(ratios.size());
  out.ratio_spread = (*hi - *lo) / mean;
  out.homothetic = out.related && out.ratio_spread <= 1e-9;
  if (out.homothetic) out.homothety_ratio = mean;
  return out;
}

}  // namespace finslerlab
