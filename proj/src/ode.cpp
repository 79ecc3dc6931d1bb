#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "finslerlab/errors.hpp"
#include "finslerlab/numkernel.hpp"

namespace finslerlab::num {

OdeTrajectory::OdeTrajectory(int dimension, double tolerance) : dimension_(dimension), tolerance_(tolerance) {}

std::span<const double> OdeTrajectory::state(std::size_t i) const {
  return {states_.data() + i * static_cast<std::size_t>(dimension_), static_cast<std::size_t>(dimension_)};
}

std::span<const double> OdeTrajectory::rate(std::size_t i) const {
  return {rates_.data() + i * static_cast<std::size_t>(dimension_), static_cast<std::size_t>(dimension_)};
}

void OdeTrajectory::append(double t, std::span<const double> state, std::span<const double> rate) {
  if (!times_.empty()) {
    if (!(t > times_.back())) throw std::logic_error("OdeTrajectory: sample parameters must increase");
    steps_.push_back(t - times_.back());
  }
  times_.push_back(t);
  states_.insert(states_.end(), state.begin(), state.end());
  rates_.insert(rates_.end(), rate.begin(), rate.end());
}

std::size_t OdeTrajectory::segment(double t) const {
  if (times_.size() < 2) return 0;
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - times_.begin() - 1, 0));
  return std::min(idx, times_.size() - 2);
}

std::vector<double> OdeTrajectory::at(double t) const {
  const double span_eps = 1e-12 * std::max(1.0, std::abs(back_time()));
  if (t < front_time() - span_eps || t > back_time() + span_eps) {
    throw std::out_of_range("OdeTrajectory::at: parameter " + std::to_string(t) + " outside the trajectory");
  }
  std::vector<double> out(static_cast<std::size_t>(dimension_));
  if (times_.size() == 1) {
    auto s = state(0);
    std::copy(s.begin(), s.end(), out.begin());
    return out;
  }
  const std::size_t i = segment(t);
  const double h = times_[i + 1] - times_[i];
  const double th = std::clamp((t - times_[i]) / h, 0.0, 1.0);
  const double th2 = th * th;
  const double th3 = th2 * th;
  const double h00 = 2 * th3 - 3 * th2 + 1;
  const double h10 = th3 - 2 * th2 + th;
  const double h01 = -2 * th3 + 3 * th2;
  const double h11 = th3 - th2;
  const auto y0 = state(i);
  const auto y1 = state(i + 1);
  const auto f0 = rate(i);
  const auto f1 = rate(i + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = h00 * y0[k] + h10 * h * f0[k] + h01 * y1[k] + h11 * h * f1[k];
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

enum class StepOutcome { accepted, rejected, left_domain };

struct Stepper {
  const VectorField& rhs;
  const IvpOptions& options;
  std::size_t n;
  std::array<std::vector<double>, 7> k;
  std::vector<double> stage, next, error;

  Stepper(const VectorField& f, const IvpOptions& o, std::size_t dim)
      : rhs(f), options(o), n(dim), stage(dim), next(dim), error(dim) {
    for (auto& v : k) v.assign(dim, 0.0);
  }

  bool inside(std::span<const double> y) const {
    for (double v : y) {
      if (!std::isfinite(v)) return false;
    }
    return !options.domain || options.domain(y);
  }

  // Evaluates the rate into out; false when the state or rate is unusable.
  bool eval(double t, std::span<const double> y, std::vector<double>& out) {
    if (!inside(y)) return false;
    try {
      rhs(t, y, out);
    } catch (const EvaluationDomainError&) {
      return false;
    }
    return std::all_of(out.begin(), out.end(), [](double v) { return std::isfinite(v); });
  }

  // One trial step from (t, y) with k[0] = f(t, y). On acceptance `next`
  // holds the new state, k[6] its rate, and err_norm the scaled error.
  StepOutcome attempt(double t, std::span<const double> y, double h, double& err_norm) {
    auto combine = [&](std::initializer_list<std::pair<int, double>> terms) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = y[i];
        for (const auto& [idx, coef] : terms) acc += h * coef * k[static_cast<std::size_t>(idx)][i];
        stage[i] = acc;
      }
    };
    combine({{0, a21}});
    if (!eval(t + c2 * h, stage, k[1])) return StepOutcome::left_domain;
    combine({{0, a31}, {1, a32}});
    if (!eval(t + c3 * h, stage, k[2])) return StepOutcome::left_domain;
    combine({{0, a41}, {1, a42}, {2, a43}});
    if (!eval(t + c4 * h, stage, k[3])) return StepOutcome::left_domain;
    combine({{0, a51}, {1, a52}, {2, a53}, {3, a54}});
    if (!eval(t + c5 * h, stage, k[4])) return StepOutcome::left_domain;
    combine({{0, a61}, {1, a62}, {2, a63}, {3, a64}, {4, a65}});
    if (!eval(t + h, stage, k[5])) return StepOutcome::left_domain;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = y[i] + h * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] + b5 * k[4][i] + b6 * k[5][i]);
    }
    if (!eval(t + h, next, k[6])) return StepOutcome::left_domain;
    err_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] + e6 * k[5][i] +
                            e7 * k[6][i]);
      const double scale = options.tolerance * (1.0 + std::max(std::abs(y[i]), std::abs(next[i])));
      err_norm = std::max(err_norm, std::abs(e) / scale);
    }
    return err_norm <= 1.0 ? StepOutcome::accepted : StepOutcome::rejected;
  }
};

double initial_step(std::span<const double> y, std::span<const double> f, double span) {
  double ny = 0.0, nf = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ny = std::max(ny, std::abs(y[i]));
    nf = std::max(nf, std::abs(f[i]));
  }
  double h = nf > 1e-10 ? 0.01 * std::max(ny, 1.0) / nf : 0.01 * span;
  return std::min(h, span);
}

}  // namespace

OdeTrajectory integrate_ivp(const VectorField& rhs, std::span<const double> initial_state, double t0, double t1,
                            const IvpOptions& options) {
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("integrate_ivp: tolerance must be positive");
  if (!(t1 >= t0)) throw std::invalid_argument("integrate_ivp: parameter span must be increasing");
  const std::size_t n = initial_state.size();
  Stepper stepper(rhs, options, n);
  std::vector<double> y(initial_state.begin(), initial_state.end());
  if (!stepper.eval(t0, y, stepper.k[0])) {
    throw DomainExitError("integrate_ivp: initial state outside the domain", t0, y);
  }

  OdeTrajectory traj(static_cast<int>(n), options.tolerance);
  traj.append(t0, y, stepper.k[0]);
  if (t1 == t0) return traj;
  if (options.stop && options.stop(t0, y)) {
    traj.set_stopped_early(true);
    return traj;
  }

  const double span = t1 - t0;
  double h = options.initial_step > 0.0 ? std::min(options.initial_step, span) : initial_step(y, stepper.k[0], span);
  double t = t0;
  int steps = 0;
  while (t < t1) {
    if (++steps > options.max_steps) throw StiffnessError("integrate_ivp: step budget exhausted");
    const double h_min = 1e-13 * std::max({1.0, std::abs(t), span});
    bool last = false;
    if (t + h >= t1 || t1 - (t + h) < h_min) {
      h = t1 - t;
      last = true;
    }
    double err = 0.0;
    const StepOutcome outcome = stepper.attempt(t, y, h, err);
    if (outcome == StepOutcome::accepted) {
      t = last ? t1 : t + h;
      y.swap(stepper.next);
      std::swap(stepper.k[0], stepper.k[6]);
      traj.append(t, y, stepper.k[0]);
      if (options.stop && options.stop(t, y)) {
        traj.set_stopped_early(true);
        return traj;
      }
      const double factor = err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
      h *= factor;
      continue;
    }
    if (outcome == StepOutcome::left_domain) {
      h *= 0.25;
      if (h < h_min) {
        throw DomainExitError("integrate_ivp: trajectory leaves the domain at t = " + std::to_string(t), t, y);
      }
      continue;
    }
    h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
    if (h < h_min) throw StiffnessError("integrate_ivp: step size underflow at t = " + std::to_string(t));
  }
  return traj;
}

}  // namespace finslerlab::num
