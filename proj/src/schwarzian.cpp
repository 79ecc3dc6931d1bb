#include <cmath>

#include "finslerlab/errors.hpp"
#include "finslerlab/projective.hpp"

namespace finslerlab {

double schwarzian(double d1, double d2, double d3) {
  if (!(std::abs(d1) > 1e-12)) throw CriticalPointError("schwarzian: vanishing first derivative");
  const double r = d2 / d1;
  return d3 / d1 - 1.5 * r * r;
}

double schwarzian(const UnivariateJetFunction& f, double t) {
  const num::JetSpace& space = num::JetSpace::get(1, 3);
  const num::Jet out = f(num::Jet::variable(space, 0, t));
  if (out.order() < 3) throw std::invalid_argument("schwarzian: function lowered the jet order");
  if (!out.all_finite()) throw EvaluationDomainError("schwarzian: non-finite value");
  // Coefficient m of a univariate jet is f^(m) / m!.
  return schwarzian(out.coefficient(1), 2.0 * out.coefficient(2), 6.0 * out.coefficient(3));
}

// ---------------------------------------------------------------------------

MobiusMap MobiusMap::through(double t1, double t2, double t3, double s1, double s2, double s3) {
  // a t + b - c t s - d s = 0 at the three pairs.
  Eigen::Matrix<double, 3, 4> m;
  const double t[3] = {t1, t2, t3};
  const double s[3] = {s1, s2, s3};
  for (int i = 0; i < 3; ++i) m.row(i) << t[i], 1.0, -t[i] * s[i], -s[i];
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Vector v = svd.matrixV().col(3);
  MobiusMap out{v(0), v(1), v(2), v(3)};
  if (std::abs(out.determinant()) <= 1e-12) throw DegenerateFitError("MobiusMap::through: degenerate anchors");
  return out;
}

double MobiusMap::operator()(double t) const { return (a * t + b) / (c * t + d); }

double MobiusMap::derivative(double t) const {
  const double den = c * t + d;
  return determinant() / (den * den);
}

MobiusMap MobiusMap::inverse() const { return {d, -b, -c, a}; }

MobiusMap MobiusMap::compose(const MobiusMap& o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

std::optional<double> MobiusMap::pole() const {
  if (c == 0.0) return std::nullopt;
  return -d / c;
}

namespace {

bool strictly_monotone(std::span<const double> v) {
  bool up = true, down = true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    up = up && v[i] > v[i - 1];
    down = down && v[i] < v[i - 1];
  }
  return up || down;
}

}  // namespace

MobiusFit mobius_fit(std::span<const double> t, std::span<const double> pi1, std::span<const double> pi2) {
  if (pi1.size() != pi2.size() || t.size() != pi1.size()) throw std::invalid_argument("mobius_fit: size mismatch");
  if (pi1.size() < 4) throw std::invalid_argument("mobius_fit: need at least 4 samples");
  if (!strictly_monotone(pi1) || !strictly_monotone(pi2)) {
    throw std::invalid_argument("mobius_fit: samples must be strictly monotone");
  }
  const std::size_t mid = pi1.size() / 2;
  const std::size_t last = pi1.size() - 1;
  MobiusFit fit;
  fit.map = MobiusMap::through(pi1[0], pi1[mid], pi1[last], pi2[0], pi2[mid], pi2[last]);
  const double scale = fit.map.a * fit.map.a + fit.map.b * fit.map.b + fit.map.c * fit.map.c + fit.map.d * fit.map.d;
  if (std::abs(fit.map.determinant()) <= 1e-12 * scale) throw DegenerateFitError("mobius_fit: degenerate fit");
  for (std::size_t i = 0; i < pi1.size(); ++i) {
    fit.residual = std::max(fit.residual, std::abs(fit.map(pi1[i]) - pi2[i]));
  }
  if (!std::isfinite(fit.residual)) throw DegenerateFitError("mobius_fit: fitted map has a pole among the samples");
  return fit;
}

}  // namespace finslerlab
