#include <array>
#include <cmath>
#include <string>

#include "finslerlab/errors.hpp"
#include "finslerlab/numkernel.hpp"

namespace finslerlab::num {

Jet directional_derivatives(const JetField& f, std::span<const double> at, std::span<const Vector> seeds,
                            int order) {
  if (seeds.empty()) throw DegenerateSeedsError("directional_derivatives: no seed directions");
  const auto dim = static_cast<Eigen::Index>(at.size());
  Matrix basis(dim, static_cast<Eigen::Index>(seeds.size()));
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    if (seeds[j].size() != dim) throw DegenerateSeedsError("directional_derivatives: seed dimension mismatch");
    basis.col(static_cast<Eigen::Index>(j)) = seeds[j];
  }
  Eigen::FullPivLU<Matrix> lu(basis);
  lu.setThreshold(1e-12);
  if (lu.rank() < static_cast<Eigen::Index>(seeds.size())) {
    throw DegenerateSeedsError("directional_derivatives: seed directions are linearly dependent");
  }

  const JetSpace& space = JetSpace::get(static_cast<int>(seeds.size()), order);
  std::vector<Jet> point;
  point.reserve(at.size());
  for (Eigen::Index i = 0; i < dim; ++i) {
    Jet xi(space, at[static_cast<std::size_t>(i)]);
    for (std::size_t j = 0; j < seeds.size(); ++j) {
      const double s = seeds[j][i];
      if (s != 0.0 && order >= 1) xi.coefficient(1 + j) = s;
    }
    point.push_back(std::move(xi));
  }
  Jet out = f(point);
  if (!out.all_finite()) throw EvaluationDomainError("directional_derivatives: non-finite value");
  return out;
}

namespace {

double central_difference(const ScalarField& f, std::span<const double> at, std::span<const double> direction,
                          int order, double h) {
  std::vector<double> point(at.begin(), at.end());
  auto eval = [&](double t) {
    for (std::size_t i = 0; i < point.size(); ++i) point[i] = at[i] + t * direction[i];
    const double v = f(point);
    if (!std::isfinite(v)) throw EvaluationDomainError("finite_difference_oracle: non-finite value");
    return v;
  };
  switch (order) {
    case 0:
      return eval(0.0);
    case 1:
      return (eval(h) - eval(-h)) / (2.0 * h);
    case 2:
      return (eval(h) - 2.0 * eval(0.0) + eval(-h)) / (h * h);
    case 3:
      return (eval(2.0 * h) - 2.0 * eval(h) + 2.0 * eval(-h) - eval(-2.0 * h)) / (2.0 * h * h * h);
    case 4:
      return (eval(2.0 * h) - 4.0 * eval(h) + 6.0 * eval(0.0) - 4.0 * eval(-h) + eval(-2.0 * h)) /
             (h * h * h * h);
    default:
      throw std::invalid_argument("finite_difference_oracle: order must be in [0, 4], got " +
                                  std::to_string(order));
  }
}

}  // namespace

double finite_difference_oracle(const ScalarField& f, std::span<const double> at, std::span<const double> direction,
                                int order, double base_step) {
  if (!(base_step > 0.0)) throw std::invalid_argument("finite_difference_oracle: step must be positive");
  if (direction.size() != at.size()) throw std::invalid_argument("finite_difference_oracle: dimension mismatch");
  if (order == 0) return central_difference(f, at, direction, 0, base_step);
  // All stencils above have even error expansions in h.
  const double d0 = central_difference(f, at, direction, order, base_step);
  const double d1 = central_difference(f, at, direction, order, base_step / 2);
  const double d2 = central_difference(f, at, direction, order, base_step / 4);
  const double r0 = (4.0 * d1 - d0) / 3.0;
  const double r1 = (4.0 * d2 - d1) / 3.0;
  return (16.0 * r1 - r0) / 15.0;
}

}  // namespace finslerlab::num
