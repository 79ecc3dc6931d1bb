#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "finslerlab/errors.hpp"
#include "finslerlab/geodesics.hpp"

namespace finslerlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Shot {
  double miss = kInf;
  double arc = 0.0;
  Vector direction;  // Euclidean unit vector
};

class Shooter {
 public:
  Shooter(const FinslerStructure& structure, const Vector& p, const Vector& q, const DistanceOptions& options,
          double max_length)
      : structure_(structure), p_(p), q_(q), options_(options), max_length_(max_length) {}

  int shots() const noexcept { return shots_; }

  // Integrates from p along `direction` to the closest approach to q.
  Shot fire(const Vector& direction) {
    ++shots_;
    Shot shot;
    shot.direction = direction.normalized();
    GeodesicOptions go;
    go.tolerance = options_.tolerance;
    go.stop = [this](double, const Vector& x, const Vector& v) { return (x - q_).dot(v) >= 0.0; };
    try {
      const Geodesic geo = geodesic_ivp(structure_, p_, shot.direction, max_length_, go);
      const auto& grid = geo.trajectory().times();
      double s = grid.back();
      if (geo.trajectory().stopped_early() && grid.size() >= 2) {
        auto g = [&](double t) { return (geo.position(t) - q_).dot(geo.velocity(t)); };
        const double lo = grid[grid.size() - 2];
        const double hi = grid.back();
        if (g(lo) < 0.0 && g(hi) > 0.0) {
          num::RootOptions ro;
          ro.tolerance = 0.0;
          ro.max_iterations = 200;
          try {
            s = num::solve_scalar_root(g, lo, hi, ro);
          } catch (const IterationLimitError&) {
            // Bracket collapsed to machine precision; keep the end point.
          }
        }
      }
      shot.arc = s;
      shot.miss = (geo.position(s) - q_).norm();
    } catch (const DomainExitError&) {
      shot.miss = kInf;
    } catch (const StiffnessError&) {
      shot.miss = kInf;
    }
    return shot;
  }

 private:
  const FinslerStructure& structure_;
  Vector p_, q_;
  const DistanceOptions& options_;
  double max_length_;
  int shots_ = 0;
};

std::vector<Vector> start_directions(int n, int count, const Vector& toward) {
  std::vector<Vector> out{toward.normalized()};
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * k / count;
      out.push_back(Vector{{std::cos(a), std::sin(a)}});
    }
    return out;
  }
  // Fibonacci lattice on S^2; seeded Gaussian directions in higher dimensions.
  if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(1.0 - z * z);
      out.push_back(Vector{{r * std::cos(golden * k), r * std::sin(golden * k), z}});
    }
    return out;
  }
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> normal;
  for (int k = 0; k < count; ++k) {
    Vector v(n);
    for (auto& c : v) c = normal(rng);
    out.push_back(v.normalized());
  }
  return out;
}

// Orthonormal basis of the complement of d.
Matrix complement_basis(const Vector& d) {
  const auto n = d.size();
  Matrix full = Matrix::Identity(n, n);
  full.col(0) = d;
  Eigen::HouseholderQR<Matrix> qr(full);
  const Matrix q = qr.householderQ();
  return q.rightCols(n - 1);
}

Shot golden_refine(Shooter& shooter, const Shot& best, double half_width) {
  const double theta0 = std::atan2(best.direction(1), best.direction(0));
  auto fire = [&](double a) { return shooter.fire(Vector{{std::cos(a), std::sin(a)}}); };
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = theta0 - half_width, b = theta0 + half_width;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  Shot sc = fire(c), sd = fire(d);
  Shot result = best;
  while (b - a > 1e-9) {
    if (sc.miss < sd.miss) {
      b = d;
      d = c;
      sd = sc;
      c = b - ratio * (b - a);
      sc = fire(c);
    } else {
      a = c;
      c = d;
      sc = sd;
      d = a + ratio * (b - a);
      sd = fire(d);
    }
    if (sc.miss < result.miss) result = sc;
    if (sd.miss < result.miss) result = sd;
    if (result.miss < 1e-8) break;
  }
  return result;
}

Shot nelder_mead_refine(Shooter& shooter, const Shot& best, double scale) {
  const auto n = best.direction.size();
  const Matrix basis = complement_basis(best.direction);
  const auto m = n - 1;
  auto fire = [&](const Vector& u) { return shooter.fire(best.direction + basis * u); };
  std::vector<Vector> simplex{Vector::Zero(m)};
  for (Eigen::Index i = 0; i < m; ++i) simplex.push_back(Vector::Unit(m, i) * scale);
  std::vector<Shot> shots;
  for (const auto& u : simplex) shots.push_back(fire(u));
  Shot result = best;
  for (int it = 0; it < 400; ++it) {
    std::vector<std::size_t> order(simplex.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return shots[i].miss < shots[j].miss; });
    std::vector<Vector> s2;
    std::vector<Shot> sh2;
    for (auto i : order) {
      s2.push_back(simplex[i]);
      sh2.push_back(shots[i]);
    }
    simplex = std::move(s2);
    shots = std::move(sh2);
    if (shots.front().miss < result.miss) result = shots.front();
    double size = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i) size = std::max(size, (simplex[i] - simplex[0]).norm());
    if (size < 1e-9 || result.miss < 1e-8) break;

    Vector centroid = Vector::Zero(m);
    for (std::size_t i = 0; i + 1 < simplex.size(); ++i) centroid += simplex[i];
    centroid /= static_cast<double>(simplex.size() - 1);
    const Vector& worst = simplex.back();
    const Vector reflected = centroid + (centroid - worst);
    const Shot sr = fire(reflected);
    if (sr.miss < shots.front().miss) {
      const Vector expanded = centroid + 2.0 * (centroid - worst);
      const Shot se = fire(expanded);
      if (se.miss < sr.miss) {
        simplex.back() = expanded;
        shots.back() = se;
      } else {
        simplex.back() = reflected;
        shots.back() = sr;
      }
      continue;
    }
    if (sr.miss < shots[shots.size() - 2].miss) {
      simplex.back() = reflected;
      shots.back() = sr;
      continue;
    }
    const Vector contracted = centroid + 0.5 * (worst - centroid);
    const Shot sc = fire(contracted);
    if (sc.miss < shots.back().miss) {
      simplex.back() = contracted;
      shots.back() = sc;
      continue;
    }
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
      shots[i] = fire(simplex[i]);
    }
  }
  return result;
}

}  // namespace

DistanceResult finsler_distance(const FinslerStructure& structure, const Vector& p, const Vector& q,
                                const DistanceOptions& options) {
  const int n = structure.dimension();
  if (p.size() != n || q.size() != n) throw std::invalid_argument("finsler_distance: dimension mismatch");
  if (!structure.contains(p) || !structure.contains(q)) {
    throw PreconditionError("finsler_distance: endpoints must lie in the domain");
  }
  DistanceResult result;
  if ((p - q).norm() == 0.0) {
    result.initial_direction = Vector::Zero(n);
    return result;
  }
  if (options.starts < 8) throw std::invalid_argument("finsler_distance: at least 8 starts are required");

  // The straight segment bounds d_F from above.
  const std::vector<Vector> segment{p, q};
  const double upper = path_length(structure, std::span<const Vector>(segment));
  Shooter shooter(structure, p, q, options, 1.5 * upper + 1e-3);

  std::vector<Shot> starts;
  for (const auto& d : start_directions(n, options.starts, q - p)) starts.push_back(shooter.fire(d));
  std::sort(starts.begin(), starts.end(), [](const Shot& a, const Shot& b) { return a.miss < b.miss; });
  if (!std::isfinite(starts.front().miss)) {
    throw SearchFailure("finsler_distance: every initial shot left the domain", kInf);
  }

  // Refine the best few starts, then polish with Newton on the exponential map.
  const double width = n == 2 ? 2.0 * std::numbers::pi / options.starts : 0.5;
  double best_residual = kInf;
  for (std::size_t attempt = 0; attempt < std::min<std::size_t>(3, starts.size()); ++attempt) {
    if (!std::isfinite(starts[attempt].miss)) break;
    const Shot refined = n == 2 ? golden_refine(shooter, starts[attempt], width)
                                : nelder_mead_refine(shooter, starts[attempt], width);
    if (!std::isfinite(refined.miss)) continue;

    const Vector unit = refined.direction / structure(p, refined.direction);
    Vector v = refined.arc * unit;
    if (v.isZero(0.0)) v = 1e-3 * unit;
    auto residual_at = [&](const Vector& w) -> std::optional<Vector> {
      try {
        return exponential_map(structure, p, w, options.tolerance) - q;
      } catch (const DomainExitError&) {
        return std::nullopt;
      } catch (const EvaluationDomainError&) {
        return std::nullopt;
      }
    };
    std::optional<Vector> r = residual_at(v);
    if (!r) continue;
    int it = 0;
    for (; it < options.max_iterations && r->norm() > options.endpoint_tolerance; ++it) {
      Matrix jac(n, n);
      const double h = 1e-6 * std::max(v.norm(), 1e-3);
      bool ok = true;
      for (int k = 0; k < n && ok; ++k) {
        const auto plus = residual_at(v + h * Vector::Unit(n, k));
        const auto minus = residual_at(v - h * Vector::Unit(n, k));
        if (!plus || !minus) {
          ok = false;
          break;
        }
        jac.col(k) = (*plus - *minus) / (2.0 * h);
      }
      if (!ok) break;
      const Vector step = jac.fullPivLu().solve(-*r);
      double damping = 1.0;
      bool improved = false;
      for (int tries = 0; tries < 30; ++tries, damping *= 0.5) {
        const Vector candidate = v + damping * step;
        const auto rc = residual_at(candidate);
        if (rc && rc->norm() < r->norm()) {
          v = candidate;
          r = rc;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    result.newton_iterations += it;
    best_residual = std::min(best_residual, r->norm());
    if (r->norm() <= options.endpoint_tolerance) {
      result.distance = structure(p, v);
      result.initial_direction = v / result.distance;
      result.geodesic = geodesic_ivp(structure, p, v, result.distance, GeodesicOptions{options.tolerance, SprayPath::fast, {}});
      result.residual = (result.geodesic->end() - q).norm();
      result.shots = shooter.shots();
      return result;
    }
  }
  throw SearchFailure("finsler_distance: no connecting geodesic found (best endpoint miss " +
                          std::to_string(best_residual) + ")",
                      best_residual);
}

}  // namespace finslerlab
