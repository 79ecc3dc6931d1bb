#pragma once

// Truncated multivariate Taylor arithmetic ("jets").
//
// A Jet holds the Taylor coefficients c_a = (d^a f)/a! of a function of
// `variables` unknowns about some base point, for every multi-index a of total
// degree <= order. Arithmetic propagates the coefficients exactly within the
// truncated algebra, so every derivative up to the jet order is exact up to
// roundoff.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace finslerlab::num {

inline constexpr int kMaxJetOrder = 12;

// Monomial layout and multiplication tables for a (variables, order) pair.
// Instances are immutable and cached for the lifetime of the process.
class JetSpace {
 public:
  struct Product {
    std::uint32_t lhs;
    std::uint32_t rhs;
    std::uint32_t out;
  };
  struct Shift {
    std::uint32_t from;
    std::uint32_t to;
    double factor;
  };

  static const JetSpace& get(int variables, int order);

  int variables() const noexcept { return variables_; }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return degree_offset_.back(); }
  // Number of monomials of total degree <= degree (they come first).
  std::size_t size_up_to(int degree) const noexcept {
    return degree < 0 ? 0 : degree_offset_[static_cast<std::size_t>(degree) + 1];
  }
  int degree(std::size_t index) const noexcept { return degrees_[index]; }
  std::span<const int> exponents(std::size_t index) const noexcept {
    return {exponents_.data() + index * static_cast<std::size_t>(variables_),
            static_cast<std::size_t>(variables_)};
  }
  // Index of a monomial, or size() when its degree exceeds the space order.
  std::size_t index_of(std::span<const int> exponents) const;

  // Products whose result has total degree <= degree.
  std::span<const Product> products(int degree) const noexcept {
    return {products_.data(), product_end_[static_cast<std::size_t>(degree)]};
  }
  std::span<const Shift> shifts(int variable) const noexcept {
    return shifts_[static_cast<std::size_t>(variable)];
  }

 private:
  JetSpace(int variables, int order);

  std::uint64_t key(std::span<const int> exponents) const;

  int variables_;
  int order_;
  std::vector<int> exponents_;
  std::vector<int> degrees_;
  std::vector<std::size_t> degree_offset_;
  std::vector<std::uint64_t> keys_;  // sorted, paired with key_index_
  std::vector<std::uint32_t> key_index_;
  std::vector<Product> products_;
  std::vector<std::size_t> product_end_;
  std::vector<std::vector<Shift>> shifts_;
};

class Jet {
 public:
  Jet() = default;
  // Constant function with full order.
  Jet(const JetSpace& space, double value);
  // The coordinate function t_variable + value.
  static Jet variable(const JetSpace& space, int variable, double value);
  static Jet zeros(const JetSpace& space, int order);

  const JetSpace& space() const noexcept { return *space_; }
  bool empty() const noexcept { return space_ == nullptr; }
  int order() const noexcept { return order_; }
  double value() const noexcept { return coefficients_[0]; }
  std::span<const double> coefficients() const noexcept { return coefficients_; }
  double coefficient(std::size_t index) const noexcept { return coefficients_[index]; }
  double& coefficient(std::size_t index) noexcept { return coefficients_[index]; }

  // Mixed partial derivative d^a f at the base point (a! * c_a).
  double derivative(std::span<const int> multi_index) const;
  // d f / d t_variable, one order lower.
  Jet partial(int variable) const;
  Jet truncated(int order) const;
  bool all_finite() const noexcept;

  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(const Jet& rhs);
  Jet& operator+=(double rhs) noexcept;
  Jet& operator-=(double rhs) noexcept;
  Jet& operator*=(double rhs) noexcept;
  Jet& operator/=(double rhs) noexcept;

  // phi(value + h) = sum_m taylor[m] h^m for the nilpotent part h.
  Jet compose(std::span<const double> taylor) const;

 private:
  Jet(const JetSpace* space, int order, std::size_t count);
  std::size_t live() const noexcept { return space_->size_up_to(order_); }
  void check_same_space(const Jet& other) const;

  const JetSpace* space_ = nullptr;
  int order_ = 0;
  std::vector<double> coefficients_;
};

Jet operator-(const Jet& x);
Jet operator+(Jet lhs, const Jet& rhs);
Jet operator-(Jet lhs, const Jet& rhs);
Jet operator*(const Jet& lhs, const Jet& rhs);
Jet operator/(const Jet& lhs, const Jet& rhs);
Jet operator+(Jet lhs, double rhs);
Jet operator+(double lhs, Jet rhs);
Jet operator-(Jet lhs, double rhs);
Jet operator-(double lhs, const Jet& rhs);
Jet operator*(Jet lhs, double rhs);
Jet operator*(double lhs, Jet rhs);
Jet operator/(Jet lhs, double rhs);
Jet operator/(double lhs, const Jet& rhs);

Jet reciprocal(const Jet& x);
Jet sqrt(const Jet& x);
Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet pow(const Jet& x, double exponent);
// |x| for x whose value is nonzero; throws EvaluationDomainError at zero.
Jet abs(const Jet& x);

}  // namespace finslerlab::num
