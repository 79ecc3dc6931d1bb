#include "finslerlab/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>
#include <utility>

#include "finslerlab/errors.hpp"

namespace finslerlab::num {

namespace {

// Appends every exponent vector of total degree `degree` in lexicographically
// descending order.
void append_compositions(int variables, int degree, std::vector<int>& current, int position,
                         std::vector<int>& out) {
  if (position == variables - 1) {
    current[static_cast<std::size_t>(position)] = degree;
    out.insert(out.end(), current.begin(), current.end());
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[static_cast<std::size_t>(position)] = e;
    append_compositions(variables, degree - e, current, position + 1, out);
  }
}

}  // namespace

JetSpace::JetSpace(int variables, int order) : variables_(variables), order_(order) {
  const auto nv = static_cast<std::size_t>(variables);
  degree_offset_.push_back(0);
  std::vector<int> current(nv, 0);
  for (int d = 0; d <= order; ++d) {
    append_compositions(variables, d, current, 0, exponents_);
    degree_offset_.push_back(exponents_.size() / nv);
  }
  const std::size_t count = size();
  degrees_.resize(count);
  for (int d = 0; d <= order; ++d) {
    for (std::size_t i = degree_offset_[static_cast<std::size_t>(d)];
         i < degree_offset_[static_cast<std::size_t>(d) + 1]; ++i) {
      degrees_[i] = d;
    }
  }

  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(count);
  for (std::size_t i = 0; i < count; ++i) {
    keyed[i] = {key(exponents(i)), static_cast<std::uint32_t>(i)};
  }
  std::sort(keyed.begin(), keyed.end());
  for (const auto& [k, idx] : keyed) {
    keys_.push_back(k);
    key_index_.push_back(idx);
  }

  // Products bucketed by result degree so that products(d) is a prefix.
  std::vector<std::vector<Product>> by_degree(static_cast<std::size_t>(order) + 1);
  std::vector<int> sum(nv);
  for (std::size_t i = 0; i < count; ++i) {
    const auto ei = exponents(i);
    for (std::size_t j = 0; j < size_up_to(order - degrees_[i]); ++j) {
      const auto ej = exponents(j);
      for (std::size_t v = 0; v < nv; ++v) sum[v] = ei[v] + ej[v];
      const std::size_t out = index_of(sum);
      by_degree[static_cast<std::size_t>(degrees_[out])].push_back(
          {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
           static_cast<std::uint32_t>(out)});
    }
  }
  for (const auto& bucket : by_degree) {
    products_.insert(products_.end(), bucket.begin(), bucket.end());
    product_end_.push_back(products_.size());
  }

  shifts_.resize(nv);
  std::vector<int> lowered(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t i = 0; i < count; ++i) {
      const auto e = exponents(i);
      if (e[v] == 0) continue;
      std::copy(e.begin(), e.end(), lowered.begin());
      lowered[v] -= 1;
      shifts_[v].push_back({static_cast<std::uint32_t>(i),
                            static_cast<std::uint32_t>(index_of(lowered)),
                            static_cast<double>(e[v])});
    }
  }
}

std::uint64_t JetSpace::key(std::span<const int> exponents) const {
  std::uint64_t k = 0;
  for (int e : exponents) k = k * static_cast<std::uint64_t>(order_ + 1) + static_cast<std::uint64_t>(e);
  return k;
}

std::size_t JetSpace::index_of(std::span<const int> exponents) const {
  int degree = 0;
  for (int e : exponents) {
    if (e < 0) return size();
    degree += e;
  }
  if (degree > order_) return size();
  const std::uint64_t k = key(exponents);
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), k);
  return key_index_[static_cast<std::size_t>(it - keys_.begin())];
}

const JetSpace& JetSpace::get(int variables, int order) {
  if (variables < 1 || order < 0 || order > kMaxJetOrder) {
    throw std::invalid_argument("JetSpace: unsupported shape (" + std::to_string(variables) + " variables, order " +
                                std::to_string(order) + ")");
  }
  thread_local std::map<std::pair<int, int>, const JetSpace*> local;
  const auto shape = std::make_pair(variables, order);
  if (auto it = local.find(shape); it != local.end()) return *it->second;

  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<JetSpace>> spaces;
  std::lock_guard lock(mutex);
  auto& slot = spaces[shape];
  if (!slot) slot.reset(new JetSpace(variables, order));
  local[shape] = slot.get();
  return *slot;
}

// ---------------------------------------------------------------------------

Jet::Jet(const JetSpace* space, int order, std::size_t count)
    : space_(space), order_(order), coefficients_(count, 0.0) {}

Jet::Jet(const JetSpace& space, double value) : Jet(&space, space.order(), space.size()) {
  coefficients_[0] = value;
}

Jet Jet::variable(const JetSpace& space, int variable, double value) {
  Jet out(space, value);
  if (space.order() >= 1) out.coefficients_[1 + static_cast<std::size_t>(variable)] = 1.0;
  return out;
}

Jet Jet::zeros(const JetSpace& space, int order) { return Jet(&space, order, space.size()); }

void Jet::check_same_space(const Jet& other) const {
  if (space_ != other.space_) throw std::invalid_argument("Jet: operands live in different jet spaces");
}

double Jet::derivative(std::span<const int> multi_index) const {
  const std::size_t idx = space_->index_of(multi_index);
  if (idx >= live()) throw std::out_of_range("Jet::derivative: multi-index exceeds jet order");
  double factorial = 1.0;
  for (int e : multi_index) {
    for (int f = 2; f <= e; ++f) factorial *= f;
  }
  return factorial * coefficients_[idx];
}

Jet Jet::partial(int variable) const {
  if (order_ < 1) throw std::out_of_range("Jet::partial: order-0 jet has no derivatives");
  Jet out(space_, order_ - 1, coefficients_.size());
  const std::size_t limit = live();
  for (const auto& s : space_->shifts(variable)) {
    if (s.from < limit) out.coefficients_[s.to] = s.factor * coefficients_[s.from];
  }
  return out;
}

Jet Jet::truncated(int order) const {
  Jet out = *this;
  if (order >= order_) return out;
  out.order_ = std::max(order, 0);
  std::fill(out.coefficients_.begin() + static_cast<std::ptrdiff_t>(out.live()), out.coefficients_.end(), 0.0);
  return out;
}

bool Jet::all_finite() const noexcept {
  return std::all_of(coefficients_.begin(), coefficients_.begin() + static_cast<std::ptrdiff_t>(live()),
                     [](double c) { return std::isfinite(c); });
}

Jet& Jet::operator+=(const Jet& rhs) {
  check_same_space(rhs);
  order_ = std::min(order_, rhs.order_);
  const std::size_t n = live();
  for (std::size_t i = 0; i < n; ++i) coefficients_[i] += rhs.coefficients_[i];
  std::fill(coefficients_.begin() + static_cast<std::ptrdiff_t>(n), coefficients_.end(), 0.0);
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  check_same_space(rhs);
  order_ = std::min(order_, rhs.order_);
  const std::size_t n = live();
  for (std::size_t i = 0; i < n; ++i) coefficients_[i] -= rhs.coefficients_[i];
  std::fill(coefficients_.begin() + static_cast<std::ptrdiff_t>(n), coefficients_.end(), 0.0);
  return *this;
}

Jet& Jet::operator*=(const Jet& rhs) {
  *this = *this * rhs;
  return *this;
}

Jet& Jet::operator+=(double rhs) noexcept {
  coefficients_[0] += rhs;
  return *this;
}

Jet& Jet::operator-=(double rhs) noexcept {
  coefficients_[0] -= rhs;
  return *this;
}

Jet& Jet::operator*=(double rhs) noexcept {
  for (double& c : coefficients_) c *= rhs;
  return *this;
}

Jet& Jet::operator/=(double rhs) noexcept {
  for (double& c : coefficients_) c /= rhs;
  return *this;
}

Jet Jet::compose(std::span<const double> taylor) const {
  // Horner in the nilpotent part h = x - x(0).
  Jet h = *this;
  h.coefficients_[0] = 0.0;
  const auto top = static_cast<std::size_t>(order_);
  Jet out(space_, order_, coefficients_.size());
  out.coefficients_[0] = top < taylor.size() ? taylor[top] : 0.0;
  for (std::size_t m = std::min(top, taylor.size() - 1) + 1; m-- > 0;) {
    if (m == top) continue;
    out = out * h;
    out.coefficients_[0] += taylor[m];
  }
  return out;
}

// ---------------------------------------------------------------------------

Jet operator-(const Jet& x) { return x * -1.0; }

Jet operator+(Jet lhs, const Jet& rhs) { return lhs += rhs; }
Jet operator-(Jet lhs, const Jet& rhs) { return lhs -= rhs; }

Jet operator*(const Jet& lhs, const Jet& rhs) {
  if (&lhs.space() != &rhs.space()) throw std::invalid_argument("Jet: operands live in different jet spaces");
  const int order = std::min(lhs.order(), rhs.order());
  Jet out = Jet::zeros(lhs.space(), order);
  const auto a = lhs.coefficients();
  const auto b = rhs.coefficients();
  for (const auto& p : lhs.space().products(order)) {
    out.coefficient(p.out) += a[p.lhs] * b[p.rhs];
  }
  return out;
}

Jet operator/(const Jet& lhs, const Jet& rhs) { return lhs * reciprocal(rhs); }

Jet operator+(Jet lhs, double rhs) { return lhs += rhs; }
Jet operator+(double lhs, Jet rhs) { return rhs += lhs; }
Jet operator-(Jet lhs, double rhs) { return lhs -= rhs; }
Jet operator-(double lhs, const Jet& rhs) {
  Jet out = -rhs;
  out += lhs;
  return out;
}
Jet operator*(Jet lhs, double rhs) { return lhs *= rhs; }
Jet operator*(double lhs, Jet rhs) { return rhs *= lhs; }
Jet operator/(Jet lhs, double rhs) { return lhs /= rhs; }
Jet operator/(double lhs, const Jet& rhs) { return reciprocal(rhs) * lhs; }

namespace {

void require_finite_positive(double v, const char* op) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw EvaluationDomainError(std::string(op) + ": argument " + std::to_string(v) + " outside domain");
  }
}

// Taylor coefficients of t -> t^p about v: binom(p, m) v^(p - m).
std::vector<double> power_series(double v, double p, int order) {
  std::vector<double> t(static_cast<std::size_t>(order) + 1);
  double binom = 1.0;
  for (int m = 0; m <= order; ++m) {
    t[static_cast<std::size_t>(m)] = binom * std::pow(v, p - m);
    binom *= (p - m) / (m + 1);
  }
  return t;
}

}  // namespace

Jet reciprocal(const Jet& x) {
  const double v = x.value();
  if (v == 0.0 || !std::isfinite(v)) throw EvaluationDomainError("reciprocal: division by zero");
  std::vector<double> t(static_cast<std::size_t>(x.order()) + 1);
  double term = 1.0 / v;
  for (auto& c : t) {
    c = term;
    term *= -1.0 / v;
  }
  return x.compose(t);
}

Jet sqrt(const Jet& x) {
  require_finite_positive(x.value(), "sqrt");
  return x.compose(power_series(x.value(), 0.5, x.order()));
}

Jet pow(const Jet& x, double exponent) {
  require_finite_positive(x.value(), "pow");
  return x.compose(power_series(x.value(), exponent, x.order()));
}

Jet exp(const Jet& x) {
  const double e = std::exp(x.value());
  if (!std::isfinite(e)) throw EvaluationDomainError("exp: overflow");
  std::vector<double> t(static_cast<std::size_t>(x.order()) + 1);
  double factorial = 1.0;
  for (std::size_t m = 0; m < t.size(); ++m) {
    if (m > 0) factorial *= static_cast<double>(m);
    t[m] = e / factorial;
  }
  return x.compose(t);
}

Jet log(const Jet& x) {
  const double v = x.value();
  require_finite_positive(v, "log");
  std::vector<double> t(static_cast<std::size_t>(x.order()) + 1);
  t[0] = std::log(v);
  for (std::size_t m = 1; m < t.size(); ++m) {
    t[m] = ((m % 2 == 1) ? 1.0 : -1.0) / (static_cast<double>(m) * std::pow(v, static_cast<double>(m)));
  }
  return x.compose(t);
}

Jet abs(const Jet& x) {
  if (x.value() == 0.0) throw EvaluationDomainError("abs: evaluation at zero is not differentiable");
  return x.value() > 0.0 ? x : -x;
}

}  // namespace finslerlab::num
