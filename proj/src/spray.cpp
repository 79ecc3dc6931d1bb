#include <algorithm>
#include <cmath>

#include "finslerlab/errors.hpp"
#include "finslerlab/geodesics.hpp"

namespace finslerlab {

using num::Jet;

Vector christoffel_spray(const FinslerStructure::QuadraticForm& form, std::span<const double> x,
                         std::span<const double> y) {
  const auto n = static_cast<Eigen::Index>(y.size());
  const Eigen::Map<const Vector> yv(y.data(), n);
  const Matrix g = form.metric(x);
  const std::vector<Matrix> dg = form.gradient(x);
  // rhs_l = 2 (d_j g_lk) y^j y^k - (d_l g_jk) y^j y^k
  Vector rhs(n);
  for (Eigen::Index l = 0; l < n; ++l) {
    double first = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) first += yv(j) * dg[static_cast<std::size_t>(j)].row(l).dot(yv);
    rhs(l) = 2.0 * first - yv.dot(dg[static_cast<std::size_t>(l)] * yv);
  }
  return 0.25 * g.llt().solve(rhs);
}

namespace {

// Solves m z = b in jet arithmetic by elimination without pivoting; m is
// symmetric positive-definite at the base point.
std::vector<Jet> solve_jet_system(std::vector<std::vector<Jet>> m, std::vector<Jet> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    if (!(m[c][c].value() > 0.0)) {
      throw ConvexityViolation("spray: fundamental tensor is not positive-definite");
    }
    const Jet inv = num::reciprocal(m[c][c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const Jet f = m[r][c] * inv;
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<Jet> z(n);
  for (std::size_t r = n; r-- > 0;) {
    Jet acc = b[r];
    for (std::size_t k = r + 1; k < n; ++k) acc -= m[r][k] * z[k];
    z[r] = acc / m[r][r];
  }
  return z;
}

}  // namespace

std::vector<Jet> spray_jets(const FinslerStructure& structure, std::span<const double> x, std::span<const double> y,
                            int order) {
  const int n = structure.dimension();
  if (order < 2) throw std::invalid_argument("spray_jets: order must be at least 2");
  if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) {
    throw PreconditionError("spray: y must be nonzero");
  }
  const num::JetSpace& space = num::JetSpace::get(2 * n, order);
  std::vector<Jet> xj, yj;
  for (int i = 0; i < n; ++i) {
    xj.push_back(Jet::variable(space, i, x[static_cast<std::size_t>(i)]));
    yj.push_back(Jet::variable(space, n + i, y[static_cast<std::size_t>(i)]));
  }
  const Jet f = structure(std::span<const Jet>(xj), std::span<const Jet>(yj));
  const Jet f2 = f * f;
  if (!f2.all_finite()) throw EvaluationDomainError("spray: non-finite metric value");

  std::vector<Jet> f2_y, f2_x;
  for (int i = 0; i < n; ++i) {
    f2_x.push_back(f2.partial(i));
    f2_y.push_back(f2.partial(n + i));
  }
  std::vector<std::vector<Jet>> g(static_cast<std::size_t>(n));
  std::vector<Jet> rhs;
  for (int l = 0; l < n; ++l) {
    const auto ul = static_cast<std::size_t>(l);
    for (int j = 0; j < n; ++j) g[ul].push_back(0.5 * f2_y[ul].partial(n + j));
    Jet acc = -f2_x[ul];
    for (int k = 0; k < n; ++k) acc += f2_y[ul].partial(k) * yj[static_cast<std::size_t>(k)];
    rhs.push_back(std::move(acc));
  }
  std::vector<Jet> z = solve_jet_system(std::move(g), std::move(rhs));
  for (auto& zi : z) zi *= 0.25;
  return z;
}

Vector spray_coefficients(const FinslerStructure& structure, std::span<const double> x, std::span<const double> y,
                          SprayPath path) {
  const int n = structure.dimension();
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n) {
    throw std::invalid_argument("spray_coefficients: dimension mismatch");
  }
  if (path == SprayPath::fast && structure.spray_fast_path()) {
    Vector out(n);
    structure.spray_fast_path()(x, y, std::span<double>(out.data(), static_cast<std::size_t>(n)));
    return out;
  }
  // Order-2 jets reduce to plain values; solve with a Cholesky factorization.
  const int order = 2;
  const num::JetSpace& space = num::JetSpace::get(2 * n, order);
  if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) {
    throw PreconditionError("spray: y must be nonzero");
  }
  std::vector<Jet> xj, yj;
  for (int i = 0; i < n; ++i) {
    xj.push_back(Jet::variable(space, i, x[static_cast<std::size_t>(i)]));
    yj.push_back(Jet::variable(space, n + i, y[static_cast<std::size_t>(i)]));
  }
  const Jet f = structure(std::span<const Jet>(xj), std::span<const Jet>(yj));
  const Jet f2 = f * f;
  if (!f2.all_finite()) throw EvaluationDomainError("spray: non-finite metric value");
  Matrix g(n, n);
  Vector rhs(n);
  std::vector<int> alpha(static_cast<std::size_t>(2 * n), 0);
  auto d2 = [&](int a, int b) {
    std::fill(alpha.begin(), alpha.end(), 0);
    alpha[static_cast<std::size_t>(a)] += 1;
    alpha[static_cast<std::size_t>(b)] += 1;
    return f2.derivative(alpha);
  };
  for (int l = 0; l < n; ++l) {
    for (int j = 0; j < n; ++j) g(l, j) = 0.5 * d2(n + l, n + j);
    std::fill(alpha.begin(), alpha.end(), 0);
    alpha[static_cast<std::size_t>(l)] = 1;
    double acc = -f2.derivative(alpha);
    for (int k = 0; k < n; ++k) acc += d2(k, n + l) * y[static_cast<std::size_t>(k)];
    rhs(l) = acc;
  }
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) throw ConvexityViolation("spray: fundamental tensor is not positive-definite");
  return 0.25 * llt.solve(rhs);
}

}  // namespace finslerlab
