#include "finslerlab/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "finslerlab/errors.hpp"
#include "finslerlab/geodesics.hpp"

namespace finslerlab {

using num::Jet;

namespace {

void check_point(const FinslerStructure& structure, const Vector& x, const Vector& y) {
  const int n = structure.dimension();
  if (x.size() != n || y.size() != n) throw std::invalid_argument("curvature: dimension mismatch");
  if (!structure.contains(x)) throw PreconditionError("curvature: base point outside the domain");
  if (y.isZero(0.0)) throw PreconditionError("curvature: y must be nonzero");
}

// Row-major R^i_k; off-diagonal entries stay empty when diagonal_only.
std::vector<Jet> riemann_entries(const FinslerStructure& structure, std::span<const double> x,
                                 std::span<const double> y, int order, bool diagonal_only) {
  if (order < 4) throw std::invalid_argument("riemann_jets: order must be at least 4");
  const int n = structure.dimension();
  const auto un = static_cast<std::size_t>(n);
  const std::vector<Jet> g = spray_jets(structure, x, y, order);
  const num::JetSpace& space = g[0].space();

  std::vector<Jet> yj;
  for (int i = 0; i < n; ++i) yj.push_back(Jet::variable(space, n + i, y[static_cast<std::size_t>(i)]));
  // dG^i/dy^j, dG^i/dx^j
  std::vector<std::vector<Jet>> gy(un), gx(un);
  for (std::size_t i = 0; i < un; ++i) {
    for (int j = 0; j < n; ++j) {
      gy[i].push_back(g[i].partial(n + j));
      gx[i].push_back(g[i].partial(j));
    }
  }

  std::vector<Jet> out(un * un);
  for (std::size_t i = 0; i < un; ++i) {
    for (std::size_t k = 0; k < un; ++k) {
      if (diagonal_only && i != k) continue;
      const int ik = static_cast<int>(k);
      Jet acc = 2.0 * gx[i][k];
      const Jet gyk = gy[i][k];
      for (std::size_t j = 0; j < un; ++j) {
        acc -= yj[j] * gyk.partial(static_cast<int>(j));                   // y^j G^i_{y^k x^j}
        acc += 2.0 * (g[j] * gyk.partial(n + static_cast<int>(j)));        // 2 G^j G^i_{y^k y^j}
        acc -= gy[i][j] * gy[j][static_cast<std::size_t>(ik)];             // G^i_{y^j} G^j_{y^k}
      }
      out[i * un + k] = std::move(acc);
    }
  }
  return out;
}

}  // namespace

std::vector<Jet> riemann_jets(const FinslerStructure& structure, std::span<const double> x, std::span<const double> y,
                              int order) {
  return riemann_entries(structure, x, y, order, false);
}

RiemannCurvature riemann_curvature(const FinslerStructure& structure, const Vector& x, const Vector& y) {
  check_point(structure, x, y);
  const int n = structure.dimension();
  const auto jets = riemann_jets(structure, view(x), view(y), 4);
  RiemannCurvature out{x, y, Matrix(n, n)};
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) out.matrix(i, k) = jets[static_cast<std::size_t>(i * n + k)].value();
  }
  if (!out.matrix.allFinite()) throw EvaluationDomainError("riemann_curvature: non-finite value");
  return out;
}

double flag_curvature(const FinslerStructure& structure, const Vector& x, const Vector& y, const Vector& u) {
  check_point(structure, x, y);
  if (u.size() != y.size()) throw std::invalid_argument("flag_curvature: dimension mismatch");
  const FundamentalTensor g = fundamental_tensor(structure, x, y);
  const double yy = y.dot(g.g * y);
  const double uu = u.dot(g.g * u);
  const double yu = y.dot(g.g * u);
  const double area = yy * uu - yu * yu;
  if (!(area > 1e-12 * yy * uu)) throw DegenerateFlagError("flag_curvature: transverse edge is parallel to the flagpole");
  const Matrix r = riemann_curvature(structure, x, y).matrix;
  return u.dot(g.g * (r * u)) / area;
}

double ricci_scalar(const FinslerStructure& structure, const Vector& x, const Vector& y) {
  check_point(structure, x, y);
  const double f = structure(x, y);
  return riemann_curvature(structure, x, y).matrix.trace() / (f * f);
}

RicciData ricci_tensor(const FinslerStructure& structure, const Vector& x, const Vector& y) {
  check_point(structure, x, y);
  const int n = structure.dimension();
  const auto un = static_cast<std::size_t>(n);
  const auto entries = riemann_entries(structure, view(x), view(y), 6, true);
  Jet trace = entries[0];
  for (std::size_t k = 1; k < un; ++k) trace += entries[k * un + k];
  if (!trace.all_finite()) throw EvaluationDomainError("ricci_tensor: non-finite value");

  RicciData out{x, y, 0.0, Matrix(n, n)};
  const double f = structure(x, y);
  out.scalar = trace.value() / (f * f);
  std::vector<int> alpha(2 * un, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::fill(alpha.begin(), alpha.end(), 0);
      alpha[un + static_cast<std::size_t>(i)] += 1;
      alpha[un + static_cast<std::size_t>(j)] += 1;
      out.tensor(i, j) = 0.5 * trace.derivative(alpha);
    }
  }
  return out;
}

double scalar_curvature_residual(const FinslerStructure& structure, const Vector& x, const Vector& y,
                                 double lambda) {
  check_point(structure, x, y);
  const int n = structure.dimension();
  const Matrix r = riemann_curvature(structure, x, y).matrix;
  // F and its y-gradient from an order-1 jet.
  const num::JetSpace& space = num::JetSpace::get(n, 1);
  std::vector<Jet> xj, yj;
  for (int i = 0; i < n; ++i) {
    xj.emplace_back(space, x(i));
    yj.push_back(Jet::variable(space, i, y(i)));
  }
  const Jet fj = structure(std::span<const Jet>(xj), std::span<const Jet>(yj));
  const double f = fj.value();
  Vector fy(n);
  for (int k = 0; k < n; ++k) fy(k) = fj.coefficient(static_cast<std::size_t>(1 + k));
  const Matrix model = lambda * f * f * (Matrix::Identity(n, n) - y * fy.transpose() / f);
  const double scale = r.norm() + std::abs(lambda) * f * f * n;
  if (scale == 0.0) return 0.0;
  return (r - model).norm() / scale;
}

}  // namespace finslerlab
