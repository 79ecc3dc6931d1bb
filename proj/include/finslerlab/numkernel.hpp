#pragma once

// Numerical substrate shared by every geometric module: jet-based
// differentiation, a finite-difference cross-check, adaptive Runge-Kutta
// integration with dense output, and scalar root finding.

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "finslerlab/jet.hpp"

namespace finslerlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline std::span<const double> view(const Vector& v) noexcept {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline Vector to_vector(std::span<const double> v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

namespace num {

using JetField = std::function<Jet(std::span<const Jet>)>;
using ScalarField = std::function<double(std::span<const double>)>;

// Taylor jet of t -> f(at + sum_j t_j seeds[j]) about t = 0, up to `order`.
// Mixed partials are read back with Jet::derivative.
Jet directional_derivatives(const JetField& f, std::span<const double> at,
                            std::span<const Vector> seeds, int order);

// Central differences of t -> f(at + t*direction) at t = 0 with two levels of
// Richardson extrapolation. Test oracle for directional_derivatives.
double finite_difference_oracle(const ScalarField& f, std::span<const double> at,
                                std::span<const double> direction, int order, double base_step);

// ---------------------------------------------------------------------------
// Initial value problems

using VectorField = std::function<void(double t, std::span<const double> state, std::span<double> rate)>;
using StatePredicate = std::function<bool(std::span<const double> state)>;
using StopCondition = std::function<bool(double t, std::span<const double> state)>;

struct IvpOptions {
  double tolerance = 1e-10;
  double initial_step = 0.0;  // 0 picks one automatically
  int max_steps = 200000;
  StatePredicate domain;      // empty means unrestricted
  StopCondition stop;         // checked after each accepted step
};

// Accepted steps of an adaptive integration, with cubic Hermite dense output.
class OdeTrajectory {
 public:
  OdeTrajectory(int dimension, double tolerance);

  int dimension() const noexcept { return dimension_; }
  double tolerance() const noexcept { return tolerance_; }
  std::size_t size() const noexcept { return times_.size(); }
  const std::vector<double>& times() const noexcept { return times_; }
  std::span<const double> state(std::size_t i) const;
  std::span<const double> rate(std::size_t i) const;
  const std::vector<double>& step_sizes() const noexcept { return steps_; }
  double front_time() const { return times_.front(); }
  double back_time() const { return times_.back(); }
  std::span<const double> back_state() const { return state(size() - 1); }
  bool stopped_early() const noexcept { return stopped_early_; }

  // Interpolated state; t must lie within [front_time, back_time].
  std::vector<double> at(double t) const;
  // Index i of the step [times[i], times[i+1]] containing t.
  std::size_t segment(double t) const;

  void append(double t, std::span<const double> state, std::span<const double> rate);
  void set_stopped_early(bool v) noexcept { stopped_early_ = v; }

 private:
  int dimension_;
  double tolerance_;
  std::vector<double> times_;
  std::vector<double> states_;
  std::vector<double> rates_;
  std::vector<double> steps_;
  bool stopped_early_ = false;
};

// Dormand-Prince 5(4) with local error per step <= tolerance (mixed
// absolute/relative). Integrates from t0 to t1 > t0 unless options.stop fires.
// Throws DomainExitError when the state cannot be advanced without leaving
// options.domain, StiffnessError on step size underflow.
OdeTrajectory integrate_ivp(const VectorField& rhs, std::span<const double> initial_state, double t0,
                            double t1, const IvpOptions& options = {});

// ---------------------------------------------------------------------------
// Scalar roots

struct RootOptions {
  double tolerance = 1e-12;  // on |g(root)|
  int max_iterations = 200;
};

// Bracketed bisection/secant hybrid; g(lo) and g(hi) must differ in sign.
double solve_scalar_root(const std::function<double(double)>& g, double lo, double hi,
                         const RootOptions& options = {});
// Secant iteration from an initial guess.
double solve_scalar_root_from(const std::function<double(double)>& g, double guess,
                              const RootOptions& options = {});

// Adaptive Gauss-Kronrod quadrature of g over [a, b].
double integrate(const std::function<double(double)>& g, double a, double b, double tolerance = 1e-13);

// ---------------------------------------------------------------------------

// Runs body(i) for every i in [0, count) on up to `threads` workers. The
// first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace num
}  // namespace finslerlab
