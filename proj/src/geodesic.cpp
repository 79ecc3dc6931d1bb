#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "finslerlab/errors.hpp"
#include "finslerlab/geodesics.hpp"

namespace finslerlab {

Geodesic::Geodesic(num::OdeTrajectory trajectory, int dimension, bool backward)
    : trajectory_(std::move(trajectory)), dimension_(dimension), backward_(backward) {
  if (trajectory_.dimension() != 2 * dimension) throw std::invalid_argument("Geodesic: phase space mismatch");
  if (trajectory_.size() == 0) throw std::invalid_argument("Geodesic: empty trajectory");
}

std::vector<double> Geodesic::arc_grid() const {
  std::vector<double> grid = trajectory_.times();
  if (backward_) {
    for (double& s : grid) s = -s;
  }
  return grid;
}

double Geodesic::local(double s) const { return backward_ ? -s : s; }

namespace {

// Quintic Hermite basis on [0, 1]: coefficients of theta^0..theta^5 for the
// weights of p0, h p0', h^2 p0'', p1, h p1', h^2 p1''.
constexpr std::array<std::array<double, 6>, 6> kQuintic{{
    {1, 0, 0, -10, 15, -6},
    {0, 1, 0, -6, 8, -3},
    {0, 0, 0.5, -1.5, 1.5, -0.5},
    {0, 0, 0, 10, -15, 6},
    {0, 0, 0, -4, 7, -3},
    {0, 0, 0, 0.5, -1, 0.5},
}};

double basis(const std::array<double, 6>& c, double th, int derivative) {
  double acc = 0.0;
  for (int p = 5; p >= derivative; --p) {
    double coeff = c[static_cast<std::size_t>(p)];
    for (int d = 0; d < derivative; ++d) coeff *= (p - d);
    acc = acc * th + coeff;
  }
  return acc;
}

}  // namespace

Vector Geodesic::interpolate(double s, int derivative) const {
  const double t = local(s);
  const auto n = static_cast<std::size_t>(dimension_);
  const double eps = 1e-12 * std::max(1.0, std::abs(trajectory_.back_time()));
  if (t < -eps || t > trajectory_.back_time() + eps) {
    throw std::out_of_range("Geodesic: arc length " + std::to_string(s) + " outside the curve");
  }
  Vector out(dimension_);
  if (trajectory_.size() == 1) {
    const auto y = trajectory_.state(0);
    const auto f = trajectory_.rate(0);
    for (std::size_t i = 0; i < n; ++i) out(static_cast<Eigen::Index>(i)) = derivative == 0 ? y[i] : derivative == 1 ? y[n + i] : f[n + i];
  } else {
    const std::size_t k = trajectory_.segment(t);
    const double t0 = trajectory_.times()[k];
    const double h = trajectory_.times()[k + 1] - t0;
    const double th = std::clamp((t - t0) / h, 0.0, 1.0);
    std::array<double, 6> w{};
    for (std::size_t b = 0; b < 6; ++b) w[b] = basis(kQuintic[b], th, derivative) / std::pow(h, derivative);
    const auto y0 = trajectory_.state(k);
    const auto y1 = trajectory_.state(k + 1);
    const auto f0 = trajectory_.rate(k);
    const auto f1 = trajectory_.rate(k + 1);
    for (std::size_t i = 0; i < n; ++i) {
      out(static_cast<Eigen::Index>(i)) = w[0] * y0[i] + w[1] * h * y0[n + i] + w[2] * h * h * f0[n + i] +
                                          w[3] * y1[i] + w[4] * h * y1[n + i] + w[5] * h * h * f1[n + i];
    }
  }
  // d/ds = -d/dt on backward geodesics.
  if (backward_ && derivative == 1) out = -out;
  return out;
}

Vector Geodesic::position(double s) const { return interpolate(s, 0); }
Vector Geodesic::velocity(double s) const { return interpolate(s, 1); }
Vector Geodesic::acceleration(double s) const { return interpolate(s, 2); }

// ---------------------------------------------------------------------------

namespace {

num::VectorField geodesic_field(const FinslerStructure& structure, SprayPath path, bool backward) {
  const int n = structure.dimension();
  return [&structure, path, backward, n](double, std::span<const double> state, std::span<double> rate) {
    const auto un = static_cast<std::size_t>(n);
    const auto x = state.subspan(0, un);
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = backward ? -state[un + static_cast<std::size_t>(i)] : state[un + static_cast<std::size_t>(i)];
    const Vector g = spray_coefficients(structure, x, view(v), path);
    for (std::size_t i = 0; i < un; ++i) {
      rate[i] = state[un + i];
      rate[un + i] = -2.0 * g(static_cast<Eigen::Index>(i));
    }
  };
}

}  // namespace

Geodesic geodesic_ivp(const FinslerStructure& structure, const Vector& x0, const Vector& y0, double length,
                      const GeodesicOptions& options) {
  const int n = structure.dimension();
  if (x0.size() != n || y0.size() != n) throw std::invalid_argument("geodesic_ivp: dimension mismatch");
  if (!structure.contains(x0)) throw PreconditionError("geodesic_ivp: start point outside the domain");
  if (y0.isZero(0.0)) throw PreconditionError("geodesic_ivp: initial velocity must be nonzero");
  const double f = structure(x0, y0);
  if (!(f > 0.0)) throw PreconditionError("geodesic_ivp: F(x0, y0) must be positive");
  const bool backward = length < 0.0;
  const Vector unit = y0 / f;

  std::vector<double> state(static_cast<std::size_t>(2 * n));
  for (int i = 0; i < n; ++i) {
    state[static_cast<std::size_t>(i)] = x0(i);
    state[static_cast<std::size_t>(n + i)] = backward ? -unit(i) : unit(i);
  }
  num::IvpOptions ivp;
  ivp.tolerance = options.tolerance;
  ivp.domain = [&structure, n](std::span<const double> s) { return structure.contains(s.subspan(0, static_cast<std::size_t>(n))); };
  if (options.stop) {
    ivp.stop = [&options, n, backward](double t, std::span<const double> s) {
      const auto un = static_cast<std::size_t>(n);
      const Vector x = to_vector(s.subspan(0, un));
      Vector v = to_vector(s.subspan(un, un));
      if (backward) v = -v;
      return options.stop(backward ? -t : t, x, v);
    };
  }
  try {
    num::OdeTrajectory traj =
        num::integrate_ivp(geodesic_field(structure, options.spray, backward), state, 0.0, std::abs(length), ivp);
    return Geodesic(std::move(traj), n, backward);
  } catch (const DomainExitError& e) {
    const double s = backward ? -e.last_parameter() : e.last_parameter();
    throw DomainExitError("geodesic leaves the domain at arc length " + std::to_string(s), s, e.last_state());
  }
}

Vector exponential_map(const FinslerStructure& structure, const Vector& x0, const Vector& v, double tolerance) {
  const int n = structure.dimension();
  std::vector<double> state(static_cast<std::size_t>(2 * n));
  for (int i = 0; i < n; ++i) {
    state[static_cast<std::size_t>(i)] = x0(i);
    state[static_cast<std::size_t>(n + i)] = v(i);
  }
  if (v.isZero(0.0)) return x0;
  num::IvpOptions ivp;
  ivp.tolerance = tolerance;
  ivp.domain = [&structure, n](std::span<const double> s) { return structure.contains(s.subspan(0, static_cast<std::size_t>(n))); };
  const auto traj = num::integrate_ivp(geodesic_field(structure, SprayPath::fast, false), state, 0.0, 1.0, ivp);
  return to_vector(traj.back_state().subspan(0, static_cast<std::size_t>(n)));
}

// ---------------------------------------------------------------------------

double path_length(const FinslerStructure& structure, std::span<const Vector> samples) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const Vector a = samples[i];
    const Vector d = samples[i + 1] - samples[i];
    if (d.isZero(0.0)) continue;
    total += num::integrate([&](double t) { return structure(Vector(a + t * d), d); }, 0.0, 1.0, 1e-13);
  }
  return total;
}

double path_length(const FinslerStructure& structure, const std::function<Vector(double)>& curve,
                   const std::function<Vector(double)>& derivative, double a, double b) {
  return num::integrate(
      [&](double t) {
        const Vector d = derivative(t);
        return d.isZero(0.0) ? 0.0 : structure(curve(t), d);
      },
      a, b, 1e-13);
}

double path_length(const FinslerStructure& structure, const Geodesic& geodesic) {
  // Integrate step by step so the quadrature never straddles a knot.
  const std::vector<double> grid = geodesic.arc_grid();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double lo = std::min(grid[i], grid[i + 1]);
    const double hi = std::max(grid[i], grid[i + 1]);
    total += path_length(
        structure, [&](double s) { return geodesic.position(s); }, [&](double s) { return geodesic.velocity(s); }, lo,
        hi);
  }
  return total;
}

void write_geodesic_csv(std::ostream& out, const FinslerStructure& structure, const Geodesic& geodesic, double step) {
  const int n = geodesic.dimension();
  out << "s";
  for (int i = 1; i <= n; ++i) out << ",x" << i;
  for (int i = 1; i <= n; ++i) out << ",y" << i;
  out << ",F_residual\n";
  std::vector<double> grid;
  if (step > 0.0) {
    const double total = std::abs(geodesic.length());
    const double sign = geodesic.backward() ? -1.0 : 1.0;
    const auto count = static_cast<std::size_t>(std::floor(total / step + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) grid.push_back(sign * static_cast<double>(k) * step);
    if (total - static_cast<double>(count) * step > 1e-12) grid.push_back(geodesic.length());
  } else {
    grid = geodesic.arc_grid();
  }
  const auto old_precision = out.precision(17);
  for (double s : grid) {
    const Vector x = geodesic.position(s);
    const Vector y = geodesic.velocity(s);
    out << s;
    for (int i = 0; i < n; ++i) out << ',' << x(i);
    for (int i = 0; i < n; ++i) out << ',' << y(i);
    out << ',' << structure(x, y) - 1.0 << '\n';
  }
  out.precision(old_precision);
}

}  // namespace finslerlab
