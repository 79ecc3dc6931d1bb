#include "finslerlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "finslerlab/errors.hpp"
#include "finslerlab/geodesics.hpp"

namespace finslerlab {

namespace {

using num::Jet;

template <class T>
T dot(std::span<const T> a, std::span<const T> b) {
  T acc = a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

struct KleinBall {
  template <class T>
  T operator()(std::span<const T> x, std::span<const T> y) const {
    using std::sqrt;
    const T xx = dot(x, x);
    const T yy = dot(y, y);
    const T xy = dot(x, y);
    const T d = 1.0 - xx;
    return sqrt(yy * d + xy * xy) / d;
  }
};

struct FunkBall {
  template <class T>
  T operator()(std::span<const T> x, std::span<const T> y) const {
    using std::sqrt;
    const T xx = dot(x, x);
    const T yy = dot(y, y);
    const T xy = dot(x, y);
    const T d = 1.0 - xx;
    return (sqrt(xy * xy + yy * d) + xy) / d;
  }
};

struct IntervalFunk {
  double k;
  template <class T>
  T operator()(std::span<const T> u, std::span<const T> y) const {
    using std::abs;
    return (abs(y[0]) + u[0] * y[0]) / ((1.0 - u[0] * u[0]) * k);
  }
};

struct QuadraticPart {
  PolynomialMatrix matrix;

  template <class T>
  T operator()(std::span<const T> x, std::span<const T> y) const {
    const std::size_t n = y.size();
    T acc = matrix[0][0](x) * y[0] * y[0];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == 0 && j == 0) continue;
        acc += matrix[i][j](x) * y[i] * y[j];
      }
    }
    return acc;
  }

  Matrix at(std::span<const double> x) const {
    const auto n = static_cast<Eigen::Index>(matrix.size());
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](x);
    }
    return a;
  }
};

struct Riemannian {
  QuadraticPart quadratic;
  template <class T>
  T operator()(std::span<const T> x, std::span<const T> y) const {
    using std::sqrt;
    return sqrt(quadratic(x, y));
  }
};

struct Randers {
  QuadraticPart quadratic;
  std::vector<Polynomial> one_form;
  template <class T>
  T operator()(std::span<const T> x, std::span<const T> y) const {
    using std::sqrt;
    T beta = one_form[0](x) * y[0];
    for (std::size_t i = 1; i < y.size(); ++i) beta += one_form[i](x) * y[i];
    return sqrt(quadratic(x, y)) + beta;
  }
};

template <class Metric>
void install(FinslerStructure::Parts& parts, Metric metric) {
  parts.evaluate = [metric](std::span<const double> x, std::span<const double> y) { return metric(x, y); };
  parts.evaluate_jet = [metric](std::span<const Jet> x, std::span<const Jet> y) { return metric(x, y); };
}

Matrix klein_metric(std::span<const double> x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::Map<const Vector> xv(x.data(), n);
  const double d = 1.0 - xv.squaredNorm();
  return Matrix::Identity(n, n) / d + xv * xv.transpose() / (d * d);
}

std::vector<Matrix> klein_metric_gradient(std::span<const double> x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::Map<const Vector> xv(x.data(), n);
  const double d = 1.0 - xv.squaredNorm();
  std::vector<Matrix> grad;
  for (Eigen::Index k = 0; k < n; ++k) {
    Matrix dg = Matrix::Identity(n, n) * (2.0 * xv(k) / (d * d));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        dg(i, j) += ((i == k ? xv(j) : 0.0) + (j == k ? xv(i) : 0.0)) / (d * d) +
                    4.0 * xv(k) * xv(i) * xv(j) / (d * d * d);
      }
    }
    grad.push_back(std::move(dg));
  }
  return grad;
}

FinslerStructure::QuadraticForm polynomial_quadratic_form(const PolynomialMatrix& matrix) {
  const std::size_t n = matrix.size();
  std::vector<PolynomialMatrix> derivatives(n, PolynomialMatrix(n, std::vector<Polynomial>(n)));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) derivatives[k][i][j] = matrix[i][j].derivative(static_cast<int>(k));
    }
  }
  FinslerStructure::QuadraticForm form;
  form.metric = [quadratic = QuadraticPart{matrix}](std::span<const double> x) { return quadratic.at(x); };
  form.gradient = [derivatives](std::span<const double> x) {
    std::vector<Matrix> out;
    for (const auto& d : derivatives) out.push_back(QuadraticPart{d}.at(x));
    return out;
  };
  return form;
}

// Deterministic probe points for construction-time checks.
std::vector<Vector> probe_points(int dimension, double radius) {
  std::mt19937_64 rng(0x5eedf1a5u);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  std::vector<Vector> points{Vector::Zero(dimension)};
  for (int i = 0; i < 256; ++i) {
    Vector v(dimension);
    for (auto& c : v) c = normal(rng);
    points.push_back(v.normalized() * radius * std::pow(uniform(rng), 1.0 / dimension));
  }
  return points;
}

void check_quadratic_part(const QuadraticPart& q, int dimension, double radius, const char* family) {
  for (const auto& x : probe_points(dimension, radius)) {
    const Matrix a = q.at(view(x));
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff())) {
      throw ConfigError(std::string(family) + ": matrix field is not symmetric");
    }
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) {
      throw ConvexityViolation(std::string(family) + ": matrix field is not positive-definite at a sampled point");
    }
  }
}

void check_randers_one_form(const QuadraticPart& q, const std::vector<Polynomial>& one_form, int dimension,
                            double radius) {
  double worst = 0.0;
  for (const auto& x : probe_points(dimension, radius)) {
    Vector b(dimension);
    for (int i = 0; i < dimension; ++i) b(i) = one_form[static_cast<std::size_t>(i)](view(x));
    const double norm = std::sqrt(b.dot(q.at(view(x)).llt().solve(b)));
    worst = std::max(worst, norm);
  }
  if (!(worst < 1.0 - 1e-6)) {
    throw ConvexityViolation("randers: one-form norm " + std::to_string(worst) +
                             " violates strong convexity (must stay below 1 - 1e-6)");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

FinslerStructure::FinslerStructure(Parts parts) : parts_(std::move(parts)) {
  if (parts_.dimension < 1) throw ConfigError("FinslerStructure: dimension must be positive");
  if (!parts_.evaluate || !parts_.evaluate_jet) throw ConfigError("FinslerStructure: missing evaluator");
}

bool FinslerStructure::contains(std::span<const double> x) const {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return r2 < parts_.chart_radius * parts_.chart_radius;
}

double FinslerStructure::operator()(std::span<const double> x, std::span<const double> y) const {
  if (!contains(x)) throw EvaluationDomainError(parts_.name + ": point outside the chart");
  return parts_.evaluate(x, y);
}

num::Jet FinslerStructure::operator()(std::span<const num::Jet> x, std::span<const num::Jet> y) const {
  return parts_.evaluate_jet(x, y);
}

Vector FinslerStructure::sample_point(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  Vector v(parts_.dimension);
  for (auto& c : v) c = normal(rng);
  const double r = parts_.sampling_radius * std::pow(uniform(rng), 1.0 / parts_.dimension);
  return v.normalized() * r;
}

Vector FinslerStructure::sample_vector(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Vector v(parts_.dimension);
  for (auto& c : v) c = normal(rng);
  return v.normalized() * std::pow(10.0, uniform(rng));
}

FinslerStructure make_metric(const MetricConfig& config) {
  FinslerStructure::Parts parts;
  parts.name = to_string(config.family);
  parts.dimension = config.dimension;
  const int n = config.dimension;
  if (config.family == Family::interval_funk) {
    if (n != 1) throw ConfigError("interval_funk: dimension is fixed to 1");
    if (!(config.k > 0.0)) throw ConfigError("interval_funk: constant k must be positive");
  } else if (n < 2 || n > 4) {
    throw ConfigError(parts.name + ": dimension must be in [2, 4]");
  }
  if (!(config.scale > 0.0) || !std::isfinite(config.scale)) throw ConfigError("scale must be positive");

  switch (config.family) {
    case Family::klein_ball: {
      parts.reversible = true;
      install(parts, KleinBall{});
      parts.quadratic_form = FinslerStructure::QuadraticForm{klein_metric, klein_metric_gradient};
      parts.spray = [](std::span<const double> x, std::span<const double> y, std::span<double> out) {
        double xy = 0.0, xx = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          xy += x[i] * y[i];
          xx += x[i] * x[i];
        }
        const double p = xy / (1.0 - xx);
        for (std::size_t i = 0; i < y.size(); ++i) out[i] = p * y[i];
      };
      break;
    }
    case Family::funk_ball: {
      parts.reversible = false;
      install(parts, FunkBall{});
      parts.spray = [](std::span<const double> x, std::span<const double> y, std::span<double> out) {
        const double half_f = 0.5 * FunkBall{}(x, y);
        for (std::size_t i = 0; i < y.size(); ++i) out[i] = half_f * y[i];
      };
      break;
    }
    case Family::interval_funk: {
      parts.reversible = false;
      install(parts, IntervalFunk{config.k});
      parts.sampling_radius = 0.95;
      break;
    }
    case Family::riemannian: {
      parts.reversible = true;
      PolynomialMatrix matrix = config.matrix.value_or(PolynomialMatrix{});
      if (!config.matrix) {
        matrix.assign(static_cast<std::size_t>(n), std::vector<Polynomial>(static_cast<std::size_t>(n)));
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = Polynomial::constant(n, i == j ? 1.0 : 0.0);
          }
        }
      }
      const QuadraticPart quadratic{matrix};
      check_quadratic_part(quadratic, n, 1.0, "riemannian");
      install(parts, Riemannian{quadratic});
      parts.quadratic_form = polynomial_quadratic_form(matrix);
      parts.spray = [form = *parts.quadratic_form](std::span<const double> x, std::span<const double> y,
                                                   std::span<double> out) {
        const Vector g = christoffel_spray(form, x, y);
        std::copy(g.begin(), g.end(), out.begin());
      };
      break;
    }
    case Family::randers: {
      parts.reversible = false;
      if (!config.matrix || !config.one_form) throw ConfigError("randers: matrix and one_form are required");
      const QuadraticPart quadratic{*config.matrix};
      check_quadratic_part(quadratic, n, 1.0, "randers");
      check_randers_one_form(quadratic, *config.one_form, n, 1.0);
      install(parts, Randers{quadratic, *config.one_form});
      break;
    }
  }
  FinslerStructure structure(std::move(parts));
  return config.scale == 1.0 ? structure : scaled(structure, config.scale);
}

FinslerStructure scaled(const FinslerStructure& structure, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("scaled: factor must be positive");
  FinslerStructure::Parts parts;
  parts.name = structure.name();
  parts.dimension = structure.dimension();
  parts.reversible = structure.reversible();
  parts.chart_radius = structure.chart_radius();
  parts.sampling_radius = structure.sampling_radius();
  parts.evaluate = [structure, lambda](std::span<const double> x, std::span<const double> y) {
    return lambda * structure(x, y);
  };
  parts.evaluate_jet = [structure, lambda](std::span<const Jet> x, std::span<const Jet> y) {
    return lambda * structure(x, y);
  };
  if (const auto& form = structure.quadratic_form()) {
    const double l2 = lambda * lambda;
    parts.quadratic_form = FinslerStructure::QuadraticForm{
        [f = form->metric, l2](std::span<const double> x) -> Matrix { return l2 * f(x); },
        [f = form->gradient, l2](std::span<const double> x) {
          auto grad = f(x);
          for (auto& m : grad) m *= l2;
          return grad;
        }};
  }
  parts.spray = structure.spray_fast_path();
  return FinslerStructure(std::move(parts));
}

// ---------------------------------------------------------------------------

namespace {

// Hessian of F^2/2 in y through an order-2 jet in the y variables.
Matrix half_f2_hessian(const FinslerStructure& structure, std::span<const double> x, std::span<const double> y) {
  const int n = structure.dimension();
  const num::JetSpace& space = num::JetSpace::get(n, 2);
  std::vector<Jet> xj, yj;
  for (int i = 0; i < n; ++i) {
    xj.emplace_back(space, x[static_cast<std::size_t>(i)]);
    yj.push_back(Jet::variable(space, i, y[static_cast<std::size_t>(i)]));
  }
  const Jet f = structure(std::span<const Jet>(xj), std::span<const Jet>(yj));
  const Jet half_f2 = 0.5 * (f * f);
  if (!half_f2.all_finite()) throw EvaluationDomainError("fundamental_tensor: non-finite metric value");
  Matrix g(n, n);
  std::vector<int> alpha(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::fill(alpha.begin(), alpha.end(), 0);
      alpha[static_cast<std::size_t>(i)] += 1;
      alpha[static_cast<std::size_t>(j)] += 1;
      g(i, j) = half_f2.derivative(alpha);
    }
  }
  return g;
}

}  // namespace

FundamentalTensor fundamental_tensor(const FinslerStructure& structure, std::span<const double> x,
                                     std::span<const double> y) {
  const int n = structure.dimension();
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n) {
    throw std::invalid_argument("fundamental_tensor: dimension mismatch");
  }
  if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) {
    throw PreconditionError("fundamental_tensor: y must be nonzero");
  }
  FundamentalTensor out;
  out.x = Eigen::Map<const Vector>(x.data(), n);
  out.y = Eigen::Map<const Vector>(y.data(), n);
  out.g = half_f2_hessian(structure, x, y);
  Eigen::LLT<Matrix> llt(out.g);
  if (llt.info() != Eigen::Success) {
    throw ConvexityViolation("fundamental_tensor: Hessian of F^2/2 is not positive-definite");
  }
  out.inverse = llt.solve(Matrix::Identity(n, n));
  return out;
}

ValidationReport validate_structure(const FinslerStructure& structure, std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("validate_structure: need at least one sample");
  ValidationReport report;
  report.samples = samples;
  report.seed = seed;
  report.min_hessian_eigenvalue = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  bool convex = true;

  for (std::size_t s = 0; s < samples; ++s) {
    const Vector x = structure.sample_point(rng);
    const Vector y = structure.sample_vector(rng);
    const double f = structure(x, y);
    if (!(f > 0.0) || !std::isfinite(f)) {
      report.positive = false;
      continue;
    }
    for (double lambda : {0.5, 2.0, 10.0}) {
      const Vector ly = lambda * y;
      const double r = std::abs(structure(x, ly) - lambda * f) / (lambda * f);
      report.worst_homogeneity_residual = std::max(report.worst_homogeneity_residual, r);
    }
    const Vector minus_y = -y;
    report.max_reversibility_gap = std::max(report.max_reversibility_gap, std::abs(structure(x, minus_y) - f) / f);

    Eigen::SelfAdjointEigenSolver<Matrix> eig;
    try {
      const FundamentalTensor g = fundamental_tensor(structure, x, y);
      eig.compute(g.g, Eigen::EigenvaluesOnly);
      report.min_hessian_eigenvalue = std::min(report.min_hessian_eigenvalue, eig.eigenvalues().minCoeff());
      report.worst_euler_residual = std::max(report.worst_euler_residual, std::abs(y.dot(g.g * y) - f * f) / (f * f));
      const Matrix id = Matrix::Identity(structure.dimension(), structure.dimension());
      report.worst_inverse_residual =
          std::max(report.worst_inverse_residual, (g.g * g.inverse - id).cwiseAbs().maxCoeff());
    } catch (const ConvexityViolation&) {
      convex = false;
      eig.compute(half_f2_hessian(structure, view(x), view(y)), Eigen::EigenvaluesOnly);
      report.min_hessian_eigenvalue = std::min(report.min_hessian_eigenvalue, eig.eigenvalues().minCoeff());
    }
  }
  report.reversible = report.max_reversibility_gap <= 1e-12;

  if (!report.positive) report.violations.emplace_back("positivity: F(x, y) <= 0 at a sampled point");
  if (report.worst_homogeneity_residual > 1e-10) {
    report.violations.emplace_back("homogeneity: residual " + std::to_string(report.worst_homogeneity_residual));
  }
  if (!convex || !(report.min_hessian_eigenvalue > 0.0)) {
    report.violations.emplace_back("strong convexity: Hessian eigenvalue " +
                                   std::to_string(report.min_hessian_eigenvalue));
  }
  if (report.worst_euler_residual > 1e-9) {
    report.violations.emplace_back("euler relation: residual " + std::to_string(report.worst_euler_residual));
  }
  if (report.worst_inverse_residual > 1e-10) {
    report.violations.emplace_back("fundamental tensor inverse: residual " +
                                   std::to_string(report.worst_inverse_residual));
  }
  if (structure.reversible() && !report.reversible) {
    report.violations.emplace_back("reversibility: declared reversible but F(x, -y) != F(x, y)");
  }
  return report;
}

}  // namespace finslerlab
