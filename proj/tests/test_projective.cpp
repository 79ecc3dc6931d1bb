#include <doctest.h>

#include <cmath>
#include <random>

#include "finslerlab/errors.hpp"
#include "finslerlab/projective.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace finslerlab;
using namespace fixture;
using num::Jet;

namespace {

// Round sphere of curvature 1 in stereographic coordinates: F = 2|y| / (1 + |x|^2).
FinslerStructure sphere() {
  FinslerStructure::Parts parts;
  parts.name = "sphere";
  parts.dimension = 2;
  parts.reversible = true;
  parts.evaluate = [](std::span<const double> x, std::span<const double> y) {
    return 2.0 * std::hypot(y[0], y[1]) / (1.0 + x[0] * x[0] + x[1] * x[1]);
  };
  parts.evaluate_jet = [](std::span<const Jet> x, std::span<const Jet> y) {
    return 2.0 * sqrt(y[0] * y[0] + y[1] * y[1]) / (1.0 + x[0] * x[0] + x[1] * x[1]);
  };
  return FinslerStructure(std::move(parts));
}

std::shared_ptr<const Geodesic> ray(const FinslerStructure& s, const Vector& x0, const Vector& y0, double length) {
  return std::make_shared<const Geodesic>(geodesic_ivp(s, x0, y0, length));
}

}  // namespace

TEST_CASE("schwarzian examples") {
  for (double t : {-1.0, 0.0, 0.7}) {
    CHECK(schwarzian([](const Jet& x) { return x; }, t) == 0.0);
    CHECK(std::abs(schwarzian([](const Jet& x) { return (2.0 * x + 1.0) / (x + 3.0); }, t)) <= 1e-12);
    CHECK(std::abs(schwarzian([](const Jet& x) { return exp(2.0 * x); }, t) + 2.0) <= 1e-9);
  }
  CHECK_THROWS_AS(schwarzian([](const Jet& x) { return x * x; }, 0.0), CriticalPointError);
}

TEST_CASE("schwarzian vanishes on Mobius maps and is invariant under them") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int tested = 0;
  while (tested < 50) {
    const MobiusMap m{u(rng), u(rng), u(rng), u(rng)};
    const double t = u(rng) * 0.3;
    if (std::abs(m.determinant()) < 0.1 || std::abs(m.c * t + m.d) < 0.2) continue;
    const auto mob = [m](const Jet& x) { return (m.a * x + m.b) / (m.c * x + m.d); };
    CHECK(std::abs(schwarzian(mob, t)) <= 1e-10);
    const auto f = [](const Jet& x) { return exp(x) + 0.3 * x * x; };
    const auto fx = [f, m](const Jet& x) {
      const Jet y = f(x);
      return (m.a * y + m.b) / (m.c * y + m.d);
    };
    const double base = std::exp(t) + 0.3 * t * t;
    if (std::abs(m.c * base + m.d) < 0.2) continue;
    CHECK(std::abs(schwarzian(fx, t) - schwarzian(f, t)) <= 1e-8);
    ++tested;
  }
}

TEST_CASE("mobius map algebra") {
  const MobiusMap m = MobiusMap::through(0.0, 1.0, 2.0, 1.0, 3.0, 4.0);
  CHECK(m(0.0) == doctest::Approx(1.0));
  CHECK(m(1.0) == doctest::Approx(3.0));
  CHECK(m(2.0) == doctest::Approx(4.0));
  CHECK(m.inverse()(m(0.37)) == doctest::Approx(0.37));
  CHECK(m.compose(m.inverse())(1.25) == doctest::Approx(1.25));
  const double h = 1e-6;
  CHECK(m.derivative(0.5) == doctest::Approx((m(0.5 + h) - m(0.5 - h)) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("mobius fit examples") {
  std::vector<double> s, e, pi;
  for (int i = 0; i <= 10; ++i) {
    s.push_back(0.1 * i);
    e.push_back(std::exp(0.2 * i));
    pi.push_back(-std::expm1(-0.2 * i));
  }
  const MobiusFit same = mobius_fit(s, e, e);
  CHECK(same.residual <= 1e-12);
  CHECK(same.map(2.5) == doctest::Approx(2.5));
  const MobiusFit rel = mobius_fit(s, e, pi);
  CHECK(rel.residual <= 1e-10);
  for (double t : {1.0, 1.7, 3.0}) CHECK(rel.map(t) == doctest::Approx((t - 1.0) / t));
  const std::vector<double> three{0.0, 1.0, 2.0};
  CHECK_THROWS_AS(mobius_fit(three, three, three), std::invalid_argument);
  const std::vector<double> flat{1.0, 1.0, 1.0, 1.0}, line{0.0, 1.0, 2.0, 3.0};
  CHECK_THROWS(mobius_fit(line, line, flat));
}

TEST_CASE("funk gauge and distance examples") {
  const FunkGauge g(1.0);
  CHECK(funk_distance(g, 0.3, 0.3) == 0.0);
  CHECK(std::abs(funk_distance(g, 0.0, 0.5) - std::log(2.0)) <= 1e-15);
  CHECK(std::abs(funk_distance(g, 0.5, 0.0) - std::log(1.5)) <= 1e-15);
  CHECK(g.metric(0.0, 1.0) == 1.0);
  CHECK(g.metric(0.0, -1.0) == 1.0);
  CHECK_THROWS_AS(FunkGauge(0.0), ConfigError);
  CHECK_THROWS_AS(funk_distance(g, 1.0, 0.0), PreconditionError);
}

TEST_CASE("funk distance equals quadrature of the gauge") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  for (double k : {0.5, 1.0, 2.0}) {
    const FunkGauge g(k);
    for (int i = 0; i < 100; ++i) {
      const double a = u(rng), b = u(rng);
      const double quad = num::integrate([&](double t) { return g.metric(a + t * (b - a), b - a); }, 0.0, 1.0);
      CHECK(std::abs(funk_distance(g, a, b) - quad) <= 1e-9);
      const double closed = b > a ? std::log((1 - a) / (1 - b)) / k : std::log((1 + a) / (1 + b)) / k;
      CHECK(std::abs(funk_distance(g, a, b) - closed) <= 1e-12);
    }
  }
}

TEST_CASE("projective parameter on flat space is the arc length") {
  const auto e = euclid(2);
  const Geodesic geo = geodesic_ivp(e, v2(-0.5, 0.1), v2(1, 0.2), 1.0);
  const ProjectiveParameter pp = projective_parameter(e, geo);
  for (std::size_t i = 0; i < pp.arc.size(); ++i) {
    CHECK(std::abs(pp.values[i] - pp.arc[i]) <= 1e-12);
    CHECK(std::abs(pp.curvature_term[i]) <= 1e-12);
  }
}

TEST_CASE("klein diameter projective parameter has schwarzian -2") {
  const auto klein = build(Family::klein_ball, 2);
  const Geodesic geo = geodesic_ivp(klein, v2(0, 0), v2(1, 0), 1.5);
  ProjectiveParameterOptions opts;
  opts.einstein_constant = 1.0;
  const ProjectiveParameter pp = projective_parameter(klein, geo, opts);
  for (std::size_t i = 1; i + 1 < pp.arc.size(); ++i) {
    CHECK(std::abs(pp.curvature_term[i] + 2.0) <= 1e-6);
    CHECK(std::abs(schwarzian(pp.derivatives[i], pp.second_derivatives[i], pp.third_derivatives[i]) + 2.0) <= 1e-6);
    CHECK(pp.derivatives[i] > 0.0);
    CHECK(pp.values[i] > pp.values[i - 1]);
  }
  REQUIRE(pp.j);
  CHECK(*pp.j == doctest::Approx(1.0));
  CHECK(pp.mobius_residual <= 1e-6);
  CHECK(std::abs(pp.values.back() - std::tanh(1.5)) <= 1e-8);
  CHECK(std::abs(pp.value_at(0.77) - std::tanh(0.77)) <= 1e-7);
}

TEST_CASE("projective parameter raises a pole error on the sphere") {
  const auto s = sphere();
  const Geodesic geo = geodesic_ivp(s, v2(-0.9, 0), v2(1, 0), 2.0);
  try {
    (void)projective_parameter(s, geo);
    FAIL("expected a pole");
  } catch (const PoleError& e) {
    CHECK(e.arc_length() == doctest::Approx(M_PI / 2).epsilon(1e-3));
  }
  const Geodesic shorter = geodesic_ivp(s, v2(-0.9, 0), v2(1, 0), 1.0);
  const ProjectiveParameter pp = projective_parameter(s, shorter);
  CHECK(std::abs(pp.values.back() - std::tan(1.0)) <= 1e-7);
}

TEST_CASE("canonical projective map examples") {
  const auto klein = build(Family::klein_ball, 2);
  const auto geo = ray(klein, v2(0, 0), v2(1, 0), std::log(2.0));
  const ProjectiveMap map = canonical_projective_map(klein, geo, 1.0);
  CHECK(map.start_parameter() == 0.0);
  CHECK(std::abs(map.end_parameter() - 0.75) <= 1e-12);
  CHECK((map(0.0) - v2(0, 0)).norm() <= 1e-14);
  CHECK(std::abs(map.arc_length(0.5) - std::log(2.0) / 2.0) <= 1e-14);
  const auto empty = ray(klein, v2(0.1, 0.2), v2(1, 0), 0.0);
  CHECK(canonical_projective_map(klein, empty, 1.0).end_parameter() == 0.0);
  for (double j : {0.5, 1.0, std::sqrt(2.0)}) {
    CHECK(std::abs(schwarzian([j](const Jet& s) { return 1.0 - exp(-2.0 * j * s); }, 0.3) + 2.0 * j * j) <= 1e-10);
  }
  CHECK_THROWS_AS(canonical_projective_map(klein, geo, 0.0), PreconditionError);
  const EinsteinReport flat = einstein_classify(euclid(2), 10, 1, 1e-6);
  CHECK_THROWS_AS(canonical_projective_map(euclid(2), geo, flat), PreconditionError);
}

TEST_CASE("chain length examples") {
  const auto klein = build(Family::klein_ball, 2);
  const FunkGauge g(1.0);
  const auto long_ray = ray(klein, v2(0, 0), v2(1, 0), 2.0);
  const ProjectiveMap first(long_ray, 1.0);
  Chain single{{first(0.0), first(0.5)}, {ChainSegment{first, 0.0, 0.5}}};
  CHECK(std::abs(chain_length(g, single) - std::log(2.0)) <= 1e-14);

  const Vector mid = first(0.3);
  const ProjectiveMap second(ray(klein, mid, v2(1, 0), 2.0), 1.0);
  Chain two{{first(0.0), mid, second(0.3)}, {ChainSegment{first, 0.0, 0.3}, ChainSegment{second, 0.0, 0.3}}};
  CHECK(std::abs(chain_length(g, two) - 2.0 * funk_distance(g, 0.0, 0.3)) <= 1e-14);

  Chain broken{{first(0.0), v2(0.4, 0.1)}, {ChainSegment{first, 0.0, 0.5}}};
  CHECK_THROWS_AS(chain_length(g, broken), MalformedChainError);
  Chain missing{{first(0.0), first(0.5)}, {}};
  CHECK_THROWS_AS(chain_length(g, missing), MalformedChainError);

  const std::vector<Vector> pts{v2(0, 0), v2(0.5, 0)};
  const Chain canonical = canonical_chain(klein, pts, 1.0);
  CHECK(std::abs(chain_length(g, canonical) - 2.0 * std::atanh(0.5)) <= 1e-8);
}

TEST_CASE("canonical chains are invariant under subdivision") {
  const auto klein = build(Family::klein_ball, 2);
  const FunkGauge g(1.0);
  const Vector p = v2(-0.3, 0.2), q = v2(0.5, -0.1);
  const DistanceResult d = finsler_distance(klein, p, q);
  const double whole = chain_length(g, canonical_chain(klein, std::vector<Vector>{p, q}, 1.0));
  for (double frac : {0.2, 0.5, 0.9}) {
    const Vector split = d.geodesic->position(frac * d.distance);
    const double parts = chain_length(g, canonical_chain(klein, std::vector<Vector>{p, split, q}, 1.0));
    CHECK(std::abs(parts - whole) <= 1e-6);
  }
}

TEST_CASE("pseudo-distance examples") {
  const FunkGauge g(1.0);
  const auto k2 = build(Family::klein_ball, 2);
  const EinsteinReport e2 = einstein_classify(k2, 12, 1, 1e-6);
  const auto zero = pseudo_distance(k2, v2(0.1, 0.1), v2(0.1, 0.1), g, e2);
  CHECK(zero.finsler_distance == 0.0);
  CHECK(*zero.theoretical == 0.0);
  CHECK(*zero.canonical == 0.0);

  const auto r = pseudo_distance(k2, v2(0, 0), v2(0.5, 0), g, e2);
  CHECK(r.theoretical_available);
  CHECK(std::abs(*r.factor - 2.0) <= 1e-8);
  CHECK(std::abs(*r.theoretical - 2.0 * std::atanh(0.5)) <= 1e-7);
  CHECK(std::abs(*r.canonical - *r.theoretical) <= 1e-4 * *r.theoretical);

  const auto k3 = build(Family::klein_ball, 3);
  const EinsteinReport e3 = einstein_classify(k3, 12, 1, 1e-6);
  const Vector p3 = (Vector(3) << 0.1, -0.2, 0.3).finished(), q3 = (Vector(3) << -0.4, 0.2, 0.1).finished();
  const auto r3 = pseudo_distance(k3, p3, q3, g, e3);
  CHECK(std::abs(*r3.factor - 2.0) <= 1e-6);
  CHECK(std::abs(*r3.canonical - 2.0 * r3.finsler_distance) <= 1e-4 * *r3.canonical);

  PseudoDistanceOptions opts;
  opts.random_chains = 20;
  opts.threads = 2;
  const auto rc = pseudo_distance(k2, v2(-0.2, 0.1), v2(0.4, 0.3), g, e2, opts);
  REQUIRE(rc.random_best);
  CHECK(*rc.random_best >= *rc.theoretical - 1e-4);

  const auto c = curved();
  const auto nc = pseudo_distance(c, v2(0, 0), v2(0.3, 0.1), g, einstein_classify(c, 10, 1, 1e-6));
  CHECK_FALSE(nc.theoretical_available);
  CHECK_FALSE(nc.theoretical);
  CHECK(nc.finsler_distance > 0.0);
}

TEST_CASE("lemma 2 with the canonical map and its forward sub-segments") {
  const auto klein = build(Family::klein_ball, 2);
  const FunkGauge g(1.0);
  const auto geo = ray(klein, v2(0, 0), v2(1, 0), std::atanh(0.5));
  const ProjectiveMap map = canonical_projective_map(klein, geo, 1.0);
  const Lemma2Result whole = lemma2_check(klein, g, map, 0.0, map.end_parameter(), 1.0);
  CHECK(whole.holds);
  CHECK(std::abs(whole.margin) <= 1e-6);
  const Lemma2Result sub = lemma2_check(klein, g, map, 0.2, 0.5, 1.0);
  CHECK(sub.holds);
  CHECK(std::abs(sub.margin) <= 1e-6);
}

TEST_CASE("lemma 2 with a non-canonical Mobius representative on [-0.2, 0.4]") {
  const auto klein = build(Family::klein_ball, 2);
  const FunkGauge g(1.0);
  const auto geo = ray(klein, v2(0, 0), v2(1, 0), std::atanh(0.5));
  const ProjectiveMap canonical = canonical_projective_map(klein, geo, 1.0);
  const double end = canonical.end_parameter();
  const ProjectiveMap renormalized =
      canonical.renormalized(MobiusMap::through(0.0, end, 1.0, -0.2, 0.4, 1.0));
  CHECK(renormalized.covers_interval());
  CHECK(renormalized.start_parameter() == doctest::Approx(-0.2));
  CHECK(renormalized.end_parameter() == doctest::Approx(0.4));
  const Lemma2Result r = lemma2_check(klein, g, renormalized, -0.2, 0.4, 1.0);
  CHECK(std::abs(r.funk - std::log(2.0)) <= 1e-12);
  CHECK(std::abs(r.finsler - std::atanh(0.5)) <= 1e-8);
  CHECK(std::abs(r.margin - (std::log(2.0) - 2.0 * std::atanh(0.5))) <= 1e-8);
  CHECK_FALSE(r.holds);
}

TEST_CASE("projective relation examples") {
  const auto klein = build(Family::klein_ball, 2);
  const auto twice = build(Family::klein_ball, 2, 2.0);
  const auto funk = build(Family::funk_ball, 2);

  const ProjectiveRelation scaled = projective_relation(klein, twice, 20, 1);
  CHECK(scaled.related);
  CHECK(scaled.homothetic);
  REQUIRE(scaled.homothety_ratio);
  CHECK(std::abs(*scaled.homothety_ratio - 2.0) <= 1e-10);
  for (double p : scaled.factors) CHECK(std::abs(p) <= 1e-9);

  const ProjectiveRelation kf = projective_relation(klein, funk, 20, 2);
  CHECK(kf.related);
  CHECK_FALSE(kf.homothetic);
  CHECK(kf.homogeneity_residual <= 1e-8);

  const ProjectiveRelation ke = projective_relation(klein, euclid(2), 20, 3);
  CHECK(ke.related);
  CHECK_FALSE(ke.homothetic);

  const ProjectiveRelation kc = projective_relation(klein, curved(), 20, 4);
  CHECK_FALSE(kc.related);
  CHECK_THROWS_AS(projective_relation(klein, build(Family::klein_ball, 3), 5, 1), PreconditionError);
}

TEST_CASE("klein and funk projective parameters along a shared line are Mobius related") {
  const auto klein = build(Family::klein_ball, 2);
  const auto funk = build(Family::funk_ball, 2);
  const Vector d = v2(std::cos(0.4), std::sin(0.4));
  const Vector p = -0.7 * d, q = 0.7 * d;
  ProjectiveParameterOptions ok, of;
  ok.einstein_constant = 1.0;
  of.einstein_constant = 0.5;
  const ProjectiveParameter pk =
      projective_parameter(klein, geodesic_ivp(klein, p, d, oracle::klein_distance(p, q)), ok);
  const ProjectiveParameter pf = projective_parameter(funk, geodesic_ivp(funk, p, d, oracle::funk_ball_distance(p, q)), of);
  std::vector<double> t, a, b;
  for (int i = 0; i <= 20; ++i) {
    const double tau = 1.4 * i / 20.0;
    const Vector x = p + tau * d;
    t.push_back(tau);
    a.push_back(pk.value_at(std::min(oracle::klein_distance(p, x), pk.arc.back())));
    b.push_back(pf.value_at(std::min(oracle::funk_ball_distance(p, x), pf.arc.back())));
  }
  CHECK(mobius_fit(t, a, b).residual <= 1e-4);
}

TEST_CASE("theorem 1 on small samples") {
  const FunkGauge g1(1.0), g2(2.0);
  const auto k2 = build(Family::klein_ball, 2);
  const Theorem1Report r = theorem1_verify(k2, g1, 4, 9, 1e-4);
  CHECK(r.passed);
  CHECK(std::abs(*r.factor - 2.0) <= 1e-8);
  CHECK(r.pairs.size() == 4);
  const Theorem1Report half = theorem1_verify(k2, g2, 3, 9, 1e-4);
  CHECK(std::abs(*half.factor - 1.0) <= 1e-8);
  for (const auto& pair : half.pairs) CHECK(std::abs(pair.canonical - pair.finsler) <= 1e-4 * pair.finsler);
  CHECK_THROWS_AS(theorem1_verify(curved(), g1, 2, 1, 1e-4), PreconditionError);
}
