#include <doctest.h>

#include <cmath>
#include <random>

#include "finslerlab/errors.hpp"
#include "finslerlab/numkernel.hpp"

using namespace finslerlab;
using num::Jet;
using num::JetSpace;

namespace {

Jet first_variable_jet(const num::JetField& f, double at, int order) {
  const Vector point = Vector::Constant(1, at);
  const std::vector<Vector> seeds{Vector::Ones(1)};
  return num::directional_derivatives(f, view(point), seeds, order);
}

double nth(const Jet& j, int m) {
  const int idx[1] = {m};
  return j.derivative(idx);
}

}  // namespace

TEST_CASE("jet of t^2 at 3 gives value, slope and curvature") {
  const Jet j = first_variable_jet([](std::span<const Jet> t) { return t[0] * t[0]; }, 3.0, 2);
  CHECK(nth(j, 0) == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(nth(j, 1) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(nth(j, 2) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("jet mixed partial of a bilinear form") {
  const Vector at = Vector::Zero(2);
  const std::vector<Vector> seeds{Vector::Unit(2, 0), Vector::Unit(2, 1)};
  const Jet j = num::directional_derivatives([](std::span<const Jet> v) { return v[0] * v[1]; }, view(at), seeds, 2);
  const int idx[2] = {1, 1};
  CHECK(j.derivative(idx) == doctest::Approx(1.0));
}

TEST_CASE("jet of exp(2t) at 0 carries powers of two") {
  const Jet j = first_variable_jet([](std::span<const Jet> t) { return exp(2.0 * t[0]); }, 0.0, 3);
  for (int m = 0; m <= 3; ++m) CHECK(nth(j, m) == doctest::Approx(std::pow(2.0, m)).epsilon(1e-14));
}

TEST_CASE("jets reproduce random polynomial coefficients exactly") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(7);
    for (auto& c : a) c = coef(rng);
    const double t0 = coef(rng);
    auto poly = [&](std::span<const Jet> t) {
      Jet acc(t[0].space(), a[6]);
      for (int m = 5; m >= 0; --m) acc = acc * t[0] + a[static_cast<std::size_t>(m)];
      return acc;
    };
    const Jet j = first_variable_jet(poly, t0, 6);
    for (int m = 0; m <= 6; ++m) {
      double expected = 0.0;
      for (int p = m; p <= 6; ++p) {
        double falling = 1.0;
        for (int r = 0; r < m; ++r) falling *= p - r;
        expected += a[static_cast<std::size_t>(p)] * falling * std::pow(t0, p - m);
      }
      CHECK(std::abs(nth(j, m) - expected) <= 1e-12 * std::max(1.0, std::abs(expected)) * 10);
    }
  }
}

TEST_CASE("degenerate seeds are rejected") {
  const Vector at = Vector::Zero(2);
  const std::vector<Vector> seeds{Vector::Unit(2, 0), 2.0 * Vector::Unit(2, 0)};
  CHECK_THROWS_AS(num::directional_derivatives([](std::span<const Jet> v) { return v[0]; }, view(at), seeds, 2),
                  DegenerateSeedsError);
}

TEST_CASE("finite-difference oracle examples") {
  const double zero[1] = {0.0}, one[1] = {1.0}, dir[1] = {1.0};
  CHECK(num::finite_difference_oracle([](std::span<const double> t) { return std::sin(t[0]); }, zero, dir, 1, 1e-2) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(num::finite_difference_oracle([](std::span<const double> t) { return t[0] * t[0] * t[0]; }, one,
                                               dir, 2, 1e-2) -
                 6.0) <= 1e-7);
  for (int order = 1; order <= 4; ++order) {
    CHECK(num::finite_difference_oracle([](std::span<const double>) { return 3.5; }, one, dir, order, 1e-2) ==
          doctest::Approx(0.0));
  }
}

TEST_CASE("jets agree with the finite-difference oracle on smooth functions") {
  auto jet_f = [](std::span<const Jet> v) { return exp(0.3 * v[0]) * log(2.0 + v[1] * v[1]) / sqrt(1.5 + v[0] * v[1]); };
  auto dbl_f = [](std::span<const double> v) {
    return std::exp(0.3 * v[0]) * std::log(2.0 + v[1] * v[1]) / std::sqrt(1.5 + v[0] * v[1]);
  };
  const Vector at = (Vector(2) << 0.4, -0.7).finished();
  const Vector d = (Vector(2) << 0.6, 0.8).finished();
  const std::vector<Vector> seeds{d};
  const Jet j = num::directional_derivatives(jet_f, view(at), seeds, 4);
  for (int m = 1; m <= 4; ++m) {
    const double fd = num::finite_difference_oracle(dbl_f, view(at), view(d), m, 0.05);
    CHECK(std::abs(nth(j, m) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("ivp examples: exponential, constant, harmonic oscillator") {
  const std::vector<double> one{1.0};
  const auto growth = num::integrate_ivp([](double, std::span<const double> x, std::span<double> r) { r[0] = x[0]; },
                                         one, 0.0, 1.0);
  CHECK(std::abs(growth.back_state()[0] - std::exp(1.0)) <= 1e-8);
  CHECK(std::abs(growth.at(0.5)[0] - std::exp(0.5)) <= 1e-7);

  const auto still = num::integrate_ivp([](double, std::span<const double>, std::span<double> r) { r[0] = 0.0; }, one,
                                        0.0, 3.0);
  for (std::size_t i = 0; i < still.size(); ++i) CHECK(still.state(i)[0] == 1.0);

  const std::vector<double> start{1.0, 0.0};
  const auto osc = num::integrate_ivp(
      [](double, std::span<const double> x, std::span<double> r) {
        r[0] = x[1];
        r[1] = -x[0];
      },
      start, 0.0, 2.0 * M_PI);
  CHECK(std::abs(osc.back_state()[0] - 1.0) <= 1e-6);
  CHECK(std::abs(osc.back_state()[1]) <= 1e-6);
}

TEST_CASE("ivp reports a domain exit") {
  const std::vector<double> start{0.0};
  num::IvpOptions opts;
  opts.domain = [](std::span<const double> x) { return x[0] < 1.0; };
  CHECK_THROWS_AS(num::integrate_ivp([](double, std::span<const double>, std::span<double> r) { r[0] = 1.0; }, start,
                                     0.0, 2.0, opts),
                  DomainExitError);
}

TEST_CASE("scalar roots") {
  CHECK(std::abs(num::solve_scalar_root([](double t) { return t * t - 2.0; }, 0.0, 2.0) - std::sqrt(2.0)) <= 1e-10);
  CHECK(std::abs(num::solve_scalar_root([](double t) { return t; }, -1.0, 3.0)) <= 1e-12);
  CHECK(std::abs(num::solve_scalar_root_from([](double t) { return t * t - 2.0; }, 1.0) - std::sqrt(2.0)) <= 1e-10);
  CHECK_THROWS_AS(num::solve_scalar_root([](double) { return 1.0; }, 0.0, 1.0), NoSignChangeError);
}

TEST_CASE("quadrature of smooth integrands") {
  CHECK(num::integrate([](double t) { return std::exp(t); }, 0.0, 1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  CHECK(num::integrate([](double t) { return 1.0 / (1.0 - t); }, 0.0, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("parallel_for visits every index and rethrows") {
  std::vector<int> hits(100, 0);
  num::parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(num::parallel_for(10, 3, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}
