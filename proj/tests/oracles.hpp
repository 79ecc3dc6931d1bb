#pragma once

// Independent closed forms and finite-difference reconstructions used to
// cross-check the library.

#include <cmath>
#include <functional>

#include "finslerlab/metrics.hpp"
#include "finslerlab/numkernel.hpp"

namespace oracle {

using finslerlab::Matrix;
using finslerlab::Vector;

// Parameter t > 0 where p + t d meets the unit sphere.
inline double sphere_exit(const Vector& p, const Vector& d) {
  const double a = d.squaredNorm();
  const double b = p.dot(d);
  const double c = p.squaredNorm() - 1.0;
  return (-b + std::sqrt(b * b - a * c)) / a;
}

// Klein (Hilbert) distance on the unit ball: half the log cross-ratio.
inline double klein_distance(const Vector& p, const Vector& q) {
  const Vector d = q - p;
  if (d.norm() == 0.0) return 0.0;
  const Vector b = p + sphere_exit(p, d) * d;
  const Vector a = q + sphere_exit(q, -d) * (-d);
  return 0.5 * std::log(((q - a).norm() * (p - b).norm()) / ((p - a).norm() * (q - b).norm()));
}

// Funk distance on the unit ball: log ratio to the forward boundary hit.
inline double funk_ball_distance(const Vector& p, const Vector& q) {
  const Vector d = q - p;
  if (d.norm() == 0.0) return 0.0;
  const Vector b = p + sphere_exit(p, d) * d;
  return std::log((b - p).norm() / (b - q).norm());
}

inline double klein_F(const Vector& x, const Vector& y) {
  const double w = 1.0 - x.squaredNorm();
  const double xy = x.dot(y);
  return std::sqrt(y.squaredNorm() * w + xy * xy) / w;
}

inline double funk_F(const Vector& x, const Vector& y) {
  const double w = 1.0 - x.squaredNorm();
  const double xy = x.dot(y);
  return (std::sqrt(y.squaredNorm() * w + xy * xy) + xy) / w;
}

// Sprays of the projectively flat ball metrics: G = P y.
inline Vector klein_spray(const Vector& x, const Vector& y) { return x.dot(y) / (1.0 - x.squaredNorm()) * y; }
inline Vector funk_spray(const Vector& x, const Vector& y) { return 0.5 * funk_F(x, y) * y; }

using SprayFn = std::function<Vector(const Vector&, const Vector&)>;
using MetricFn = std::function<double(const Vector&, const Vector&)>;

// R^i_k = 2 G^i_{x^k} - y^j G^i_{x^j y^k} + 2 G^j G^i_{y^j y^k} - G^i_{y^j} G^j_{y^k}
// by central differences of a closed-form spray.
inline Matrix riemann_fd(const SprayFn& G, const Vector& x, const Vector& y) {
  const int n = static_cast<int>(x.size());
  const double h1 = 1e-5, h2 = 1e-4;
  auto e = [n](int i) { return Vector(Vector::Unit(n, i)); };
  auto dx = [&](const Vector& xx, const Vector& yy, int k) {
    return Vector((G(xx + h1 * e(k), yy) - G(xx - h1 * e(k), yy)) / (2 * h1));
  };
  auto dy = [&](const Vector& xx, const Vector& yy, int k) {
    return Vector((G(xx, yy + h1 * e(k)) - G(xx, yy - h1 * e(k))) / (2 * h1));
  };
  auto dxdy = [&](int j, int k) {
    return Vector((G(x + h2 * e(j), y + h2 * e(k)) - G(x + h2 * e(j), y - h2 * e(k)) -
                   G(x - h2 * e(j), y + h2 * e(k)) + G(x - h2 * e(j), y - h2 * e(k))) /
                  (4 * h2 * h2));
  };
  auto dydy = [&](int j, int k) {
    return Vector((G(x, y + h2 * e(j) + h2 * e(k)) - G(x, y + h2 * e(j) - h2 * e(k)) -
                   G(x, y - h2 * e(j) + h2 * e(k)) + G(x, y - h2 * e(j) - h2 * e(k))) /
                  (4 * h2 * h2));
  };
  const Vector g0 = G(x, y);
  Matrix gy(n, n);
  for (int k = 0; k < n; ++k) gy.col(k) = dy(x, y, k);
  Matrix R = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    Vector col = 2.0 * dx(x, y, k);
    for (int j = 0; j < n; ++j) {
      col -= y(j) * dxdy(j, k);
      col += 2.0 * g0(j) * dydy(j, k);
      col -= gy.col(j) * gy(j, k);
    }
    R.col(k) = col;
  }
  return R;
}

// y-Hessian of F^2 / 2 by central differences.
inline Matrix fundamental_fd(const MetricFn& F, const Vector& x, const Vector& y) {
  const int n = static_cast<int>(x.size());
  const double h = 1e-4;
  auto E = [&](const Vector& yy) { return 0.5 * F(x, yy) * F(x, yy); };
  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vector ei = h * Vector::Unit(n, i), ej = h * Vector::Unit(n, j);
      g(i, j) = (E(y + ei + ej) - E(y + ei - ej) - E(y - ei + ej) + E(y - ei - ej)) / (4 * h * h);
    }
  }
  return g;
}

// K(y, u) = g_y(R(u), u) / (g_y(y, y) g_y(u, u) - g_y(y, u)^2) with g_y(R(u), u) = g_il R^i_k u^k u^l.
// The flag plane span{y, u} is represented by y and the part of u orthogonal to y.
inline double flag_fd(const SprayFn& G, const MetricFn& F, const Vector& x, const Vector& y, const Vector& u_in) {
  const Vector u = u_in - u_in.dot(y) / y.squaredNorm() * y;
  const Matrix R = riemann_fd(G, x, y);
  const Matrix g = fundamental_fd(F, x, y);
  const double num = u.dot(g * (R * u));
  const double den = y.dot(g * y) * u.dot(g * u) - std::pow(y.dot(g * u), 2);
  return num / den;
}

}  // namespace oracle
