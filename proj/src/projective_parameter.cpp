#include <algorithm>
#include <cmath>

#include "finslerlab/errors.hpp"
#include "finslerlab/projective.hpp"

namespace finslerlab {

double ProjectiveParameter::value_at(double s) const {
  if (arc.empty()) throw std::logic_error("ProjectiveParameter: empty grid");
  if (s < arc.front() - 1e-12 || s > arc.back() + 1e-12) {
    throw std::out_of_range("ProjectiveParameter: arc length outside the grid");
  }
  if (arc.size() == 1) return values.front();
  const auto it = std::upper_bound(arc.begin(), arc.end(), s);
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - arc.begin() - 1, 0)),
                                              arc.size() - 2);
  const double h = arc[k + 1] - arc[k];
  const double t = std::clamp((s - arc[k]) / h, 0.0, 1.0);
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
  const double h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
  const double h3 = 10 * t3 - 15 * t4 + 6 * t5;
  const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
  const double h5 = 0.5 * t3 - t4 + 0.5 * t5;
  return h0 * values[k] + h1 * h * derivatives[k] + h2 * h * h * second_derivatives[k] + h3 * values[k + 1] +
         h4 * h * derivatives[k + 1] + h5 * h * h * second_derivatives[k + 1];
}

ProjectiveParameter projective_parameter(const FinslerStructure& structure, const Geodesic& geodesic,
                                         const ProjectiveParameterOptions& options) {
  const int n = structure.dimension();
  if (n < 2) throw PreconditionError("projective_parameter: dimension must be at least 2");
  if (geodesic.backward()) throw PreconditionError("projective_parameter: geodesic must run forward");
  if (options.grid_points < 2) throw std::invalid_argument("projective_parameter: need at least 2 grid points");
  const double length = geodesic.length();

  auto q_at = [&](double s) {
    const Vector x = geodesic.position(s);
    const Vector v = geodesic.velocity(s);
    const RicciData ric = ricci_tensor(structure, x, v);
    return 2.0 / (n - 1) * v.dot(ric.tensor * v);
  };
  const num::VectorField rhs = [&](double s, std::span<const double> u, std::span<double> du) {
    const double half_q = 0.5 * q_at(std::min(s, length));
    du[0] = u[1];
    du[1] = -half_q * u[0];
    du[2] = u[3];
    du[3] = -half_q * u[2];
  };
  num::IvpOptions ivp;
  ivp.tolerance = options.tolerance;
  ivp.domain = [](std::span<const double> u) { return u[2] > 0.0; };

  ProjectiveParameter out;
  std::vector<double> state{0.0, 1.0, 1.0, 0.0};
  auto record = [&](double s) {
    const double u1 = state[0], u2 = state[2], du2 = state[3];
    if (!(u2 > 0.0)) throw PoleError("projective_parameter: pi has a pole at arc length " + std::to_string(s), s);
    // The Wronskian u1' u2 - u1 u2' stays 1.
    out.arc.push_back(s);
    out.values.push_back(u1 / u2);
    out.derivatives.push_back(1.0 / (u2 * u2));
    out.second_derivatives.push_back(-2.0 * du2 / (u2 * u2 * u2));
    const double q = q_at(s);
    out.third_derivatives.push_back(q / (u2 * u2) + 6.0 * du2 * du2 / (u2 * u2 * u2 * u2));
    out.curvature_term.push_back(q);
  };
  record(0.0);
  const int segments = options.grid_points - 1;
  for (int k = 0; k < segments && length > 0.0; ++k) {
    const double s0 = length * k / segments;
    const double s1 = k + 1 == segments ? length : length * (k + 1) / segments;
    try {
      const auto traj = num::integrate_ivp(rhs, state, s0, s1, ivp);
      const auto back = traj.back_state();
      std::copy(back.begin(), back.end(), state.begin());
    } catch (const DomainExitError& e) {
      throw PoleError("projective_parameter: pi has a pole near arc length " + std::to_string(e.last_parameter()),
                      e.last_parameter());
    }
    record(s1);
  }

  if (options.einstein_constant) {
    const double c = *options.einstein_constant;
    if (!(c > 0.0)) throw PreconditionError("projective_parameter: Einstein constant must be positive");
    out.einstein = true;
    out.j = c / std::sqrt(n - 1.0);
    if (out.arc.size() >= 4) {
      std::vector<double> e;
      for (double s : out.arc) e.push_back(std::exp(2.0 * *out.j * s));
      const MobiusFit fit = mobius_fit(out.arc, e, out.values);
      out.mobius = fit.map;
      out.mobius_residual = fit.residual;
    }
  }
  return out;
}

}  // namespace finslerlab
