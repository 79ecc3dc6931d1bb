#include <cmath>
#include <string>

#include "finslerlab/errors.hpp"
#include "finslerlab/numkernel.hpp"

namespace finslerlab::num {

double solve_scalar_root(const std::function<double(double)>& g, double lo, double hi, const RootOptions& options) {
  double glo = g(lo);
  double ghi = g(hi);
  if (std::abs(glo) <= options.tolerance) return lo;
  if (std::abs(ghi) <= options.tolerance) return hi;
  if (!(std::isfinite(glo) && std::isfinite(ghi)) || std::signbit(glo) == std::signbit(ghi)) {
    throw NoSignChangeError("solve_scalar_root: no sign change on [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
  }
  // Illinois-modified regula falsi, falling back to bisection when the
  // interpolated point does not shrink the bracket fast enough.
  int same_side = 0;
  for (int it = 0; it < options.max_iterations; ++it) {
    const double width = hi - lo;
    double x = hi - ghi * (hi - lo) / (ghi - glo);
    if (!(x > std::min(lo, hi) && x < std::max(lo, hi)) || (it % 4 == 3)) x = 0.5 * (lo + hi);
    const double gx = g(x);
    if (!std::isfinite(gx)) throw EvaluationDomainError("solve_scalar_root: non-finite function value");
    if (std::abs(gx) <= options.tolerance) return x;
    if (std::signbit(gx) == std::signbit(ghi)) {
      hi = x;
      ghi = gx;
      if (++same_side >= 2) glo *= 0.5;
    } else {
      lo = hi;
      glo = ghi;
      hi = x;
      ghi = gx;
      same_side = 0;
    }
    if (std::abs(width) <= 4e-16 * std::max(1.0, std::abs(x))) {
      return std::abs(glo) < std::abs(ghi) ? lo : hi;
    }
  }
  throw IterationLimitError("solve_scalar_root: iteration cap exceeded");
}

double solve_scalar_root_from(const std::function<double(double)>& g, double guess, const RootOptions& options) {
  double x0 = guess;
  double x1 = guess + std::max(1e-4, 1e-4 * std::abs(guess));
  double g0 = g(x0);
  double g1 = g(x1);
  for (int it = 0; it < options.max_iterations; ++it) {
    if (!std::isfinite(g0) || !std::isfinite(g1)) {
      throw EvaluationDomainError("solve_scalar_root_from: non-finite function value");
    }
    if (std::abs(g1) <= options.tolerance) return x1;
    if (g1 == g0) throw IterationLimitError("solve_scalar_root_from: flat secant");
    const double x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
    x0 = x1;
    g0 = g1;
    x1 = x2;
    g1 = g(x1);
  }
  throw IterationLimitError("solve_scalar_root_from: iteration cap exceeded");
}

}  // namespace finslerlab::num
