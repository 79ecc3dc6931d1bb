#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "finslerlab/metrics.hpp"

namespace finslerlab {

// R(i, k) = R^i_k(x, y).
struct RiemannCurvature {
  Vector x;
  Vector y;
  Matrix matrix;
};

struct RicciData {
  Vector x;
  Vector y;
  double scalar = 0.0;  // Ric = R^k_k / F^2
  Matrix tensor;        // Ric_ij = 1/2 [R^k_k]_{y^i y^j}
};

// Jets of R^i_k in the 2n variables (x, y) about the base point. F^2 is
// expanded to `order`; the result carries order - 4. Row-major n x n.
std::vector<num::Jet> riemann_jets(const FinslerStructure& structure, std::span<const double> x,
                                   std::span<const double> y, int order);

RiemannCurvature riemann_curvature(const FinslerStructure& structure, const Vector& x, const Vector& y);

// Throws DegenerateFlagError when u is (nearly) parallel to y.
double flag_curvature(const FinslerStructure& structure, const Vector& x, const Vector& y, const Vector& u);

double ricci_scalar(const FinslerStructure& structure, const Vector& x, const Vector& y);
RicciData ricci_tensor(const FinslerStructure& structure, const Vector& x, const Vector& y);

// Relative Frobenius distance of R^i_k from lambda F^2 (delta^i_k - F^{-1} F_{y^k} y^i).
double scalar_curvature_residual(const FinslerStructure& structure, const Vector& x, const Vector& y,
                                 double lambda);

// ---------------------------------------------------------------------------

struct EinsteinPoint {
  Vector x;
  double ricci_mean = 0.0;     // mean of Ric over the y samples at x
  double ricci_spread = 0.0;   // max - min of Ric over the y samples
  double factor = 0.0;         // least-squares k in Ric_ij ~ k g_ij at x
  double fit_residual = 0.0;   // max ||Ric_ij - k g_ij|| / ||g_ij|| at x
};

struct EinsteinReport {
  std::size_t samples = 0;           // base points
  std::size_t directions = 0;        // y samples per base point
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  bool is_einstein = false;
  bool constant_factor = false;      // Ric(x) independent of x
  double factor = 0.0;               // global least-squares k in Ric_ij ~ k g_ij
  double y_dependence = 0.0;         // max over x of the Ric spread
  double x_dependence = 0.0;         // max - min of the per-point factors
  double fit_residual = 0.0;         // max over samples
  std::optional<double> flag_curvature;  // set when K is constant over the sampled flags
  double flag_spread = 0.0;
  std::optional<double> einstein_constant;  // c with Ric_ij = -c^2 g_ij
  std::optional<double> orientation_gap;    // reversible structures: max |Ric(x, y) - Ric(x, -y)|
  std::vector<EinsteinPoint> points;
};

EinsteinReport einstein_classify(const FinslerStructure& structure, std::size_t samples, std::uint64_t seed,
                                 double tolerance, int directions = 8);

}  // namespace finslerlab
