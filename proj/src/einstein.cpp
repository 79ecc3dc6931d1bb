#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "finslerlab/curvature.hpp"
#include "finslerlab/errors.hpp"

namespace finslerlab {

EinsteinReport einstein_classify(const FinslerStructure& structure, std::size_t samples, std::uint64_t seed,
                                 double tolerance, int directions) {
  if (samples < 10) throw std::invalid_argument("einstein_classify: need at least 10 samples");
  if (!(tolerance > 0.0)) throw std::invalid_argument("einstein_classify: tolerance must be positive");
  if (directions < 8 || directions > 16) throw std::invalid_argument("einstein_classify: directions must be in [8, 16]");
  const int n = structure.dimension();
  EinsteinReport report;
  report.samples = samples;
  report.directions = static_cast<std::size_t>(directions);
  report.seed = seed;
  report.tolerance = tolerance;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto random_direction = [&] {
    Vector v(n);
    for (auto& c : v) c = normal(rng);
    return Vector(v.normalized());
  };

  double cross = 0.0, norm2 = 0.0;
  double flag_min = std::numeric_limits<double>::infinity();
  double flag_max = -flag_min;
  double flag_sum = 0.0;
  std::size_t flag_count = 0;
  double orientation_gap = 0.0;

  for (std::size_t s = 0; s < samples; ++s) {
    EinsteinPoint point;
    point.x = structure.sample_point(rng);
    std::vector<Matrix> rics, gs;
    double rmin = std::numeric_limits<double>::infinity(), rmax = -rmin, rsum = 0.0;
    double local_cross = 0.0, local_norm2 = 0.0;
    for (int d = 0; d < directions; ++d) {
      Vector y = random_direction();
      y /= structure(point.x, y);
      const RicciData ric = ricci_tensor(structure, point.x, y);
      const Matrix g = fundamental_tensor(structure, point.x, y).g;
      rmin = std::min(rmin, ric.scalar);
      rmax = std::max(rmax, ric.scalar);
      rsum += ric.scalar;
      // Ric_ij and g_ij are both zero-homogeneous, so they are compared as is.
      local_cross += (ric.tensor.array() * g.array()).sum();
      local_norm2 += g.squaredNorm();
      rics.push_back(ric.tensor);
      gs.push_back(g);

      if (structure.reversible()) {
        const Vector minus_y = -y;
        orientation_gap = std::max(orientation_gap, std::abs(ricci_scalar(structure, point.x, minus_y) - ric.scalar));
      }
      Vector u = random_direction();
      try {
        const double k = flag_curvature(structure, point.x, y, u);
        flag_min = std::min(flag_min, k);
        flag_max = std::max(flag_max, k);
        flag_sum += k;
        ++flag_count;
      } catch (const DegenerateFlagError&) {
      }
    }
    point.ricci_mean = rsum / directions;
    point.ricci_spread = rmax - rmin;
    point.factor = local_cross / local_norm2;
    for (std::size_t d = 0; d < rics.size(); ++d) {
      point.fit_residual = std::max(point.fit_residual, (rics[d] - point.factor * gs[d]).norm() / gs[d].norm());
    }
    cross += local_cross;
    norm2 += local_norm2;
    report.y_dependence = std::max(report.y_dependence, point.ricci_spread);
    report.fit_residual = std::max(report.fit_residual, point.fit_residual);
    report.points.push_back(std::move(point));
  }

  report.factor = cross / norm2;
  double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
  for (const auto& p : report.points) {
    fmin = std::min(fmin, p.factor);
    fmax = std::max(fmax, p.factor);
  }
  report.x_dependence = fmax - fmin;
  report.is_einstein = report.y_dependence <= tolerance && report.fit_residual <= tolerance;
  report.constant_factor = report.is_einstein && report.x_dependence <= tolerance;
  if (report.constant_factor && report.factor < -tolerance) report.einstein_constant = std::sqrt(-report.factor);
  if (flag_count > 0) {
    report.flag_spread = flag_max - flag_min;
    if (report.flag_spread <= tolerance) report.flag_curvature = flag_sum / static_cast<double>(flag_count);
  }
  if (structure.reversible()) report.orientation_gap = orientation_gap;
  return report;
}

}  // namespace finslerlab
