#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "finslerlab/metrics.hpp"
#include "finslerlab/numkernel.hpp"

namespace finslerlab {

// G^i = (1/2) Gamma^i_jk y^j y^k from a Riemannian quadratic form and its gradient.
Vector christoffel_spray(const FinslerStructure::QuadraticForm& form, std::span<const double> x,
                         std::span<const double> y);

enum class SprayPath {
  jet,      // G^i = 1/4 g^il ([F^2]_{x^k y^l} y^k - [F^2]_{x^l}) through jets
  fast,     // closed form when the structure has one, jets otherwise
};

Vector spray_coefficients(const FinslerStructure& structure, std::span<const double> x, std::span<const double> y,
                          SprayPath path = SprayPath::jet);
inline Vector spray_coefficients(const FinslerStructure& structure, const Vector& x, const Vector& y,
                                 SprayPath path = SprayPath::jet) {
  return spray_coefficients(structure, view(x), view(y), path);
}

// Jets of G^i in the 2n variables (x^1..x^n, y^1..y^n) about (x, y). F^2 is
// expanded to `order`, so the returned jets carry order - 2.
std::vector<num::Jet> spray_jets(const FinslerStructure& structure, std::span<const double> x,
                                 std::span<const double> y, int order);

// ---------------------------------------------------------------------------

// Arc-length parameterized solution of x'' + 2 G(x, x') = 0. Backward
// geodesics (negative length) are stored with the parameter flipped, so s runs
// over [length, 0].
class Geodesic {
 public:
  Geodesic(num::OdeTrajectory trajectory, int dimension, bool backward);

  int dimension() const noexcept { return dimension_; }
  bool backward() const noexcept { return backward_; }
  // Signed arc length reached (negative for backward geodesics).
  double length() const noexcept { return backward_ ? -trajectory_.back_time() : trajectory_.back_time(); }
  const num::OdeTrajectory& trajectory() const noexcept { return trajectory_; }

  // Arc-length grid of accepted steps, in increasing order of |s|.
  std::vector<double> arc_grid() const;
  Vector position(double s) const;
  // Quintic Hermite interpolation of the position and its s-derivatives.
  Vector velocity(double s) const;
  Vector acceleration(double s) const;

  Vector start() const { return position(0.0); }
  Vector end() const { return position(length()); }
  Vector initial_velocity() const { return velocity(0.0); }

 private:
  double local(double s) const;
  Vector interpolate(double s, int derivative) const;

  num::OdeTrajectory trajectory_;
  int dimension_;
  bool backward_;
};

struct GeodesicOptions {
  double tolerance = 1e-10;
  SprayPath spray = SprayPath::fast;
  // Stop as soon as this returns true for (s, x, dx/ds).
  std::function<bool(double, const Vector&, const Vector&)> stop;
};

// y0 is rescaled to F(x0, y0) = 1. A negative length integrates backward.
// Throws DomainExitError carrying the signed exit arc length.
Geodesic geodesic_ivp(const FinslerStructure& structure, const Vector& x0, const Vector& y0, double length,
                      const GeodesicOptions& options = {});

// Solution at affine parameter 1 of x'' + 2G = 0 with x(0) = x0, x'(0) = v.
Vector exponential_map(const FinslerStructure& structure, const Vector& x0, const Vector& v, double tolerance);

// ---------------------------------------------------------------------------

struct DistanceOptions {
  double tolerance = 1e-10;           // integrator tolerance
  double endpoint_tolerance = 1e-9;   // Euclidean chart miss accepted for the final shot
  int starts = 8;
  int max_iterations = 60;
};

struct DistanceResult {
  double distance = 0.0;
  std::optional<Geodesic> geodesic;  // empty when the endpoints coincide
  Vector initial_direction;          // unit (F = 1) velocity at p
  double residual = 0.0;             // chart distance between geodesic end and q
  int shots = 0;
  int newton_iterations = 0;
};

// Shooting for the shortest connecting geodesic from p to q (ordered).
// Throws SearchFailure when no shot reaches q.
DistanceResult finsler_distance(const FinslerStructure& structure, const Vector& p, const Vector& q,
                                const DistanceOptions& options = {});

// ---------------------------------------------------------------------------

// Integral length of a polyline through the samples.
double path_length(const FinslerStructure& structure, std::span<const Vector> samples);
// Integral length of a parametric curve on [a, b].
double path_length(const FinslerStructure& structure, const std::function<Vector(double)>& curve,
                   const std::function<Vector(double)>& derivative, double a, double b);
double path_length(const FinslerStructure& structure, const Geodesic& geodesic);

// CSV with columns s, x1..xn, y1..yn, F_residual. A positive step resamples
// the geodesic uniformly; otherwise the accepted steps are written.
void write_geodesic_csv(std::ostream& out, const FinslerStructure& structure, const Geodesic& geodesic,
                        double step = 0.0);

}  // namespace finslerlab
