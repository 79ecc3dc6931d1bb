#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "finslerlab/numkernel.hpp"

namespace finslerlab {

// ---------------------------------------------------------------------------
// Polynomial coefficient fields on the chart, degree <= 4.

struct Monomial {
  double coefficient = 0.0;
  std::vector<int> powers;
};

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Monomial> terms);
  static Polynomial constant(int dimension, double value);

  const std::vector<Monomial>& terms() const noexcept { return terms_; }
  int degree() const noexcept;

  double operator()(std::span<const double> x) const;
  num::Jet operator()(std::span<const num::Jet> x) const;
  Polynomial derivative(int variable) const;

 private:
  std::vector<Monomial> terms_;
};

using PolynomialMatrix = std::vector<std::vector<Polynomial>>;

enum class Family { riemannian, randers, funk_ball, klein_ball, interval_funk };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

struct MetricConfig {
  Family family = Family::klein_ball;
  int dimension = 2;
  double k = 1.0;      // interval_funk constant
  double scale = 1.0;  // overall constant factor on F
  std::optional<PolynomialMatrix> matrix;      // riemannian / randers quadratic part
  std::optional<std::vector<Polynomial>> one_form;  // randers
};

// Unknown keys are rejected with ConfigError.
MetricConfig parse_metric_config(const nlohmann::json& document);
MetricConfig load_metric_config(const std::string& path);
nlohmann::json to_json(const MetricConfig& config);

// ---------------------------------------------------------------------------

// A Finsler metric F(x, y) on a single chart. Immutable after construction.
class FinslerStructure {
 public:
  using Evaluator = std::function<double(std::span<const double>, std::span<const double>)>;
  using JetEvaluator = std::function<num::Jet(std::span<const num::Jet>, std::span<const num::Jet>)>;
  using SprayFastPath = std::function<void(std::span<const double>, std::span<const double>, std::span<double>)>;

  // Riemannian structures expose their quadratic form g(x) and its
  // x-gradient dg[k](i, j) = d g_ij / d x^k.
  struct QuadraticForm {
    std::function<Matrix(std::span<const double>)> metric;
    std::function<std::vector<Matrix>(std::span<const double>)> gradient;
  };

  struct Parts {
    std::string name;
    int dimension = 0;
    bool reversible = false;
    double chart_radius = 1.0;     // open ball (or interval) of this radius
    double sampling_radius = 0.95;
    Evaluator evaluate;
    JetEvaluator evaluate_jet;
    std::optional<QuadraticForm> quadratic_form;
    SprayFastPath spray;  // may be empty
  };

  explicit FinslerStructure(Parts parts);

  const std::string& name() const noexcept { return parts_.name; }
  int dimension() const noexcept { return parts_.dimension; }
  bool reversible() const noexcept { return parts_.reversible; }
  double sampling_radius() const noexcept { return parts_.sampling_radius; }
  double chart_radius() const noexcept { return parts_.chart_radius; }

  bool contains(std::span<const double> x) const;
  double operator()(std::span<const double> x, std::span<const double> y) const;
  num::Jet operator()(std::span<const num::Jet> x, std::span<const num::Jet> y) const;
  double operator()(const Vector& x, const Vector& y) const { return (*this)(view(x), view(y)); }
  bool contains(const Vector& x) const { return contains(view(x)); }

  const std::optional<QuadraticForm>& quadratic_form() const noexcept { return parts_.quadratic_form; }
  const SprayFastPath& spray_fast_path() const noexcept { return parts_.spray; }

  // Uniform point in the sampling ball.
  Vector sample_point(std::mt19937_64& rng) const;
  // Uniform random direction with Euclidean norm in [0.1, 10].
  Vector sample_vector(std::mt19937_64& rng) const;

 private:
  Parts parts_;
};

FinslerStructure make_metric(const MetricConfig& config);
// lambda * F with the same geodesics.
FinslerStructure scaled(const FinslerStructure& structure, double lambda);

// ---------------------------------------------------------------------------

struct FundamentalTensor {
  Vector x;
  Vector y;
  Matrix g;
  Matrix inverse;
};

// Hessian of F^2/2 in y. Throws ConvexityViolation if it is not positive-definite.
FundamentalTensor fundamental_tensor(const FinslerStructure& structure, std::span<const double> x,
                                     std::span<const double> y);
inline FundamentalTensor fundamental_tensor(const FinslerStructure& structure, const Vector& x, const Vector& y) {
  return fundamental_tensor(structure, view(x), view(y));
}

struct ValidationReport {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool positive = true;
  double worst_homogeneity_residual = 0.0;
  double min_hessian_eigenvalue = 0.0;
  double worst_euler_residual = 0.0;
  double worst_inverse_residual = 0.0;
  double max_reversibility_gap = 0.0;
  bool reversible = false;
  std::vector<std::string> violations;
  bool passed() const noexcept { return violations.empty(); }
};

ValidationReport validate_structure(const FinslerStructure& structure, std::size_t samples, std::uint64_t seed);

}  // namespace finslerlab
