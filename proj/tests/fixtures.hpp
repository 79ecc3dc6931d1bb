#pragma once

#include <json.hpp>

#include "finslerlab/metrics.hpp"

namespace fixture {

using finslerlab::Family;
using finslerlab::FinslerStructure;
using finslerlab::Vector;

inline FinslerStructure build(Family family, int n, double scale = 1.0) {
  finslerlab::MetricConfig c;
  c.family = family;
  c.dimension = n;
  c.scale = scale;
  return finslerlab::make_metric(c);
}

inline FinslerStructure euclid(int n) {
  using finslerlab::Polynomial;
  finslerlab::MetricConfig e;
  e.family = Family::riemannian;
  e.dimension = n;
  const auto size = static_cast<std::size_t>(n);
  e.matrix = finslerlab::PolynomialMatrix(size, std::vector<Polynomial>(size, Polynomial::constant(n, 0.0)));
  for (std::size_t i = 0; i < size; ++i) (*e.matrix)[i][i] = Polynomial::constant(n, 1.0);
  return finslerlab::make_metric(e);
}

// A non-Einstein Riemannian field with position-dependent curvature.
inline FinslerStructure curved() {
  return finslerlab::make_metric(finslerlab::parse_metric_config(nlohmann::json::parse(R"({
    "family": "riemannian", "dimension": 2,
    "riemannian": {"matrix": [[[{"coefficient": 1, "powers": [0, 0]}, {"coefficient": 0.5, "powers": [2, 0]}], 0.1],
                              [0.1, [{"coefficient": 1, "powers": [0, 0]}, {"coefficient": 0.3, "powers": [0, 2]}]]]}
  })")));
}

inline Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

}  // namespace fixture
