#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "finslerlab/errors.hpp"
#include "finslerlab/numkernel.hpp"

namespace finslerlab::num {

double integrate(const std::function<double(double)>& g, double a, double b, double tolerance) {
  if (a == b) return 0.0;
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, 15, tolerance, &error);
  if (!std::isfinite(value)) throw EvaluationDomainError("integrate: non-finite quadrature value");
  return value;
}

}  // namespace finslerlab::num
