#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "finslerlab/curvature.hpp"
#include "finslerlab/geodesics.hpp"
#include "finslerlab/metrics.hpp"

namespace finslerlab {

// ---------------------------------------------------------------------------
// Schwarzian derivative {f, t} = f'''/f' - 3/2 (f''/f')^2.

using UnivariateJetFunction = std::function<num::Jet(const num::Jet&)>;

// f is evaluated on an order-3 jet; throws CriticalPointError when |f'(t)| <= 1e-12.
double schwarzian(const UnivariateJetFunction& f, double t);
// From the first three derivatives.
double schwarzian(double d1, double d2, double d3);

// ---------------------------------------------------------------------------

// Linear fractional map t -> (a t + b) / (c t + d).
struct MobiusMap {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static MobiusMap identity() { return {}; }
  // The unique map sending t1, t2, t3 to s1, s2, s3.
  static MobiusMap through(double t1, double t2, double t3, double s1, double s2, double s3);

  double operator()(double t) const;
  double derivative(double t) const;
  double determinant() const noexcept { return a * d - b * c; }
  MobiusMap inverse() const;
  // (this o other)(t) = this(other(t))
  MobiusMap compose(const MobiusMap& other) const;
  // Value t with c t + d = 0, if any.
  std::optional<double> pole() const;
};

struct MobiusFit {
  MobiusMap map;
  double residual = 0.0;  // max |map(pi1) - pi2| over all samples
};

// Fits pi2 ~ map(pi1) through three anchor samples (first, middle, last) and
// reports the residual on every sample. Throws DegenerateFitError.
MobiusFit mobius_fit(std::span<const double> t, std::span<const double> pi1, std::span<const double> pi2);

// ---------------------------------------------------------------------------

// L_f(u, y) = (|y| + u y) / ((1 - u^2) k) on I = (-1, 1).
class FunkGauge {
 public:
  explicit FunkGauge(double k = 1.0);
  double k() const noexcept { return k_; }
  static bool contains(double u) noexcept { return u > -1.0 && u < 1.0; }
  double metric(double u, double y) const;

 private:
  double k_;
};

// Ordered Funk distance D_f(a, b). Throws PreconditionError outside I.
double funk_distance(const FunkGauge& gauge, double a, double b);

// ---------------------------------------------------------------------------

struct ProjectiveParameterOptions {
  double tolerance = 1e-11;
  int grid_points = 41;
  // When the structure is Einstein with Ric_ij = -c^2 g_ij, fit pi against
  // exp(2 j s), j = c / sqrt(n - 1).
  std::optional<double> einstein_constant;
};

// Solution of {pi, s} = q(s) = 2/(n-1) Ric_jk x'^j x'^k along a geodesic,
// via u'' + q u / 2 = 0 and pi = u1 / u2, normalized to pi(0) = 0, pi'(0) = 1.
struct ProjectiveParameter {
  std::vector<double> arc;
  std::vector<double> values;
  std::vector<double> derivatives;
  std::vector<double> second_derivatives;
  std::vector<double> third_derivatives;
  std::vector<double> curvature_term;  // q(s)
  bool einstein = false;
  std::optional<double> j;
  std::optional<MobiusMap> mobius;  // pi = mobius(exp(2 j s))
  double mobius_residual = 0.0;

  // Quintic Hermite interpolation between grid points.
  double value_at(double s) const;
};

// Throws PoleError when u2 vanishes inside the geodesic.
ProjectiveParameter projective_parameter(const FinslerStructure& structure, const Geodesic& geodesic,
                                         const ProjectiveParameterOptions& options = {});

// ---------------------------------------------------------------------------

// A geodesic with a projective parameter tau in I:
// tau = normalization(1 - exp(-2 j s)).
class ProjectiveMap {
 public:
  ProjectiveMap(std::shared_ptr<const Geodesic> geodesic, double j, MobiusMap normalization = MobiusMap::identity());

  const Geodesic& geodesic() const noexcept { return *geodesic_; }
  double j() const noexcept { return j_; }
  const MobiusMap& normalization() const noexcept { return normalization_; }

  double parameter(double arc_length) const;
  double arc_length(double parameter) const;
  // Point of the geodesic at the given parameter; it must fall inside the
  // integrated arc.
  Vector operator()(double parameter) const;

  // Parameters of the geodesic end points.
  double start_parameter() const { return parameter(0.0); }
  double end_parameter() const { return parameter(geodesic_->length()); }

  ProjectiveMap renormalized(const MobiusMap& m) const;
  // True when every tau in I corresponds to a real arc length, so that the map
  // is defined on the whole interval (given a complete geodesic).
  bool covers_interval() const;

 private:
  std::shared_ptr<const Geodesic> geodesic_;
  double j_;
  MobiusMap normalization_;
};

// pi(s) = 1 - exp(-2 j s), j = c / sqrt(n - 1). Throws PreconditionError
// unless c > 0.
ProjectiveMap canonical_projective_map(const FinslerStructure& structure, std::shared_ptr<const Geodesic> geodesic,
                                       double einstein_constant);
ProjectiveMap canonical_projective_map(const FinslerStructure& structure, std::shared_ptr<const Geodesic> geodesic,
                                       const EinsteinReport& report);

// ---------------------------------------------------------------------------

struct ChainSegment {
  ProjectiveMap map;
  double a = 0.0;
  double b = 0.0;
};

struct Chain {
  std::vector<Vector> points;  // x0 = p, ..., xk = q
  std::vector<ChainSegment> segments;
};

// Sum of D_f(a_i, b_i). Throws MalformedChainError when the segments do not
// stitch the points together or a parameter leaves I.
double chain_length(const FunkGauge& gauge, const Chain& chain, double stitch_tolerance = 1e-8);

// One canonical leg per consecutive pair of points.
Chain canonical_chain(const FinslerStructure& structure, std::span<const Vector> points, double einstein_constant,
                      const DistanceOptions& options = {});

// ---------------------------------------------------------------------------

struct PseudoDistanceOptions {
  DistanceOptions distance;
  int random_chains = 0;
  int max_intermediate = 3;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct PseudoDistanceResult {
  double finsler_distance = 0.0;
  bool theoretical_available = false;
  std::optional<double> einstein_constant;
  std::optional<double> factor;       // 2c / (sqrt(n - 1) k)
  std::optional<double> canonical;    // canonical-chain upper bound
  std::optional<double> theoretical;  // factor * d_F
  std::optional<double> random_best;  // shortest sampled random chain
  int random_chains = 0;
  double discrepancy = 0.0;           // |canonical - theoretical| / theoretical
};

PseudoDistanceResult pseudo_distance(const FinslerStructure& structure, const Vector& p, const Vector& q,
                                     const FunkGauge& gauge, const EinsteinReport& einstein,
                                     const PseudoDistanceOptions& options = {});

// ---------------------------------------------------------------------------

struct Lemma2Result {
  bool holds = false;
  double margin = 0.0;  // D_f(a, b) - factor d_F(f(a), f(b))
  double funk = 0.0;
  double finsler = 0.0;
  double factor = 0.0;
};

// Compares D_f(a, b) with (2c / (sqrt(n - 1) k)) d_F(f(a), f(b)).
Lemma2Result lemma2_check(const FinslerStructure& structure, const FunkGauge& gauge, const ProjectiveMap& map,
                          double a, double b, double einstein_constant, const DistanceOptions& options = {});

// ---------------------------------------------------------------------------

struct ProjectiveRelation {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  bool related = false;
  double quotient_disagreement = 0.0;   // max spread of (G_B^i - G_A^i) / y^i over i
  double homogeneity_residual = 0.0;    // max |P(x, 2y) - 2 P(x, y)|
  std::vector<double> factors;          // P(x, y) per sample
  bool homothetic = false;
  double ratio_spread = 0.0;            // relative spread of F_B / F_A
  std::optional<double> homothety_ratio;
};

ProjectiveRelation projective_relation(const FinslerStructure& a, const FinslerStructure& b, std::size_t samples,
                                       std::uint64_t seed, double tolerance = 1e-6);

// ---------------------------------------------------------------------------

struct Theorem1Pair {
  Vector p;
  Vector q;
  double finsler = 0.0;
  double theoretical = 0.0;
  double canonical = 0.0;
  double discrepancy = 0.0;
  double lemma2_margin = 0.0;        // canonical map
  double lemma2_sub_margin = 0.0;    // a random forward sub-segment of it
  double parameter_fit_residual = 0.0;
};

struct Theorem1Options {
  DistanceOptions distance;
  std::size_t einstein_samples = 12;
  double einstein_tolerance = 1e-6;
  int threads = 1;
};

struct Theorem1Report {
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  double k = 1.0;
  EinsteinReport einstein;
  std::optional<double> einstein_constant;
  std::optional<double> factor;
  std::vector<Theorem1Pair> pairs;
  double max_discrepancy = 0.0;
  double min_lemma2_margin = 0.0;
  double max_parameter_fit_residual = 0.0;
  bool passed = false;
};

// Throws PreconditionError when the structure is not Einstein with a negative
// constant factor.
Theorem1Report theorem1_verify(const FinslerStructure& structure, const FunkGauge& gauge, std::size_t pairs,
                               std::uint64_t seed, double tolerance, const Theorem1Options& options = {});

}  // namespace finslerlab
