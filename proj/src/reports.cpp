#include "finslerlab/reports.hpp"

#include "finslerlab/errors.hpp"

namespace finslerlab {

using nlohmann::json;

namespace {

template <class T>
json optional_json(const std::optional<T>& value) {
  return value ? json(*value) : json(nullptr);
}

}  // namespace

json to_json(const Vector& v) { return json(std::vector<double>(v.begin(), v.end())); }

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Vector(m.row(i).transpose())));
  return rows;
}

json to_json(const ValidationReport& r) {
  return {{"samples", r.samples},
          {"seed", r.seed},
          {"passed", r.passed()},
          {"positive", r.positive},
          {"worst_homogeneity_residual", r.worst_homogeneity_residual},
          {"min_hessian_eigenvalue", r.min_hessian_eigenvalue},
          {"worst_euler_residual", r.worst_euler_residual},
          {"worst_inverse_residual", r.worst_inverse_residual},
          {"max_reversibility_gap", r.max_reversibility_gap},
          {"reversible", r.reversible},
          {"violations", r.violations}};
}

json to_json(const EinsteinReport& r) {
  json points = json::array();
  for (const auto& p : r.points) {
    points.push_back({{"x", to_json(p.x)},
                      {"ricci_mean", p.ricci_mean},
                      {"ricci_spread", p.ricci_spread},
                      {"factor", p.factor},
                      {"fit_residual", p.fit_residual}});
  }
  return {{"samples", r.samples},
          {"directions", r.directions},
          {"seed", r.seed},
          {"tolerance", r.tolerance},
          {"is_einstein", r.is_einstein},
          {"constant_factor", r.constant_factor},
          {"factor", r.factor},
          {"y_dependence", r.y_dependence},
          {"x_dependence", r.x_dependence},
          {"fit_residual", r.fit_residual},
          {"flag_curvature", optional_json(r.flag_curvature)},
          {"flag_spread", r.flag_spread},
          {"c", optional_json(r.einstein_constant)},
          {"orientation_gap", optional_json(r.orientation_gap)},
          {"points", points}};
}

json to_json(const DistanceResult& r) {
  return {{"d_F", r.distance},
          {"initial_direction", to_json(r.initial_direction)},
          {"residual", r.residual},
          {"shots", r.shots},
          {"newton_iterations", r.newton_iterations}};
}

json to_json(const PseudoDistanceResult& r) {
  return {{"d_F", r.finsler_distance},
          {"theoretical_available", r.theoretical_available},
          {"c", optional_json(r.einstein_constant)},
          {"factor", optional_json(r.factor)},
          {"d_M_canonical", optional_json(r.canonical)},
          {"d_M_theoretical", optional_json(r.theoretical)},
          {"d_M_random_best", optional_json(r.random_best)},
          {"random_chains", r.random_chains},
          {"discrepancy", r.discrepancy}};
}

json to_json(const Theorem1Report& r) {
  json pairs = json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"p", to_json(p.p)},
                     {"q", to_json(p.q)},
                     {"d_F", p.finsler},
                     {"d_M_theoretical", p.theoretical},
                     {"d_M_canonical", p.canonical},
                     {"discrepancy", p.discrepancy},
                     {"lemma2_margin", p.lemma2_margin},
                     {"lemma2_sub_margin", p.lemma2_sub_margin},
                     {"parameter_fit_residual", p.parameter_fit_residual}});
  }
  return {{"seed", r.seed},
          {"tolerance", r.tolerance},
          {"k", r.k},
          {"einstein", to_json(r.einstein)},
          {"pairs", pairs},
          {"summary",
           {{"max_discrepancy", r.max_discrepancy},
            {"pair_count", r.pairs.size()},
            {"c", optional_json(r.einstein_constant)},
            {"factor", optional_json(r.factor)},
            {"min_lemma2_margin", r.min_lemma2_margin},
            {"max_parameter_fit_residual", r.max_parameter_fit_residual},
            {"passed", r.passed}}}};
}

json to_json(const ProjectiveRelation& r) {
  return {{"samples", r.samples},
          {"seed", r.seed},
          {"tolerance", r.tolerance},
          {"related", r.related},
          {"quotient_disagreement", r.quotient_disagreement},
          {"homogeneity_residual", r.homogeneity_residual},
          {"projective_factors", r.factors},
          {"homothetic", r.homothetic},
          {"ratio_spread", r.ratio_spread},
          {"homothety_ratio", optional_json(r.homothety_ratio)}};
}

json curvature_report(const FinslerStructure& structure, const Vector& x, const Vector& y,
                      const std::vector<Vector>& flags) {
  const RiemannCurvature riemann = riemann_curvature(structure, x, y);
  const RicciData ricci = ricci_tensor(structure, x, y);
  json flag_samples = json::array();
  for (const auto& u : flags) {
    json entry{{"u", to_json(u)}};
    try {
      entry["K"] = flag_curvature(structure, x, y, u);
    } catch (const DegenerateFlagError&) {
      entry["K"] = nullptr;
    }
    flag_samples.push_back(entry);
  }
  const double f = structure(x, y);
  const Matrix g = fundamental_tensor(structure, x, y).g;
  const double factor = (ricci.tensor.array() * g.array()).sum() / g.squaredNorm();
  return {{"point", to_json(x)},
          {"flagpole", to_json(y)},
          {"F", f},
          {"R", to_json(riemann.matrix)},
          {"flags", flag_samples},
          {"Ric", ricci.scalar},
          {"Ric_ij", to_json(ricci.tensor)},
          {"g_ij", to_json(g)},
          {"classification",
           {{"ricci_factor", factor},
            {"ricci_fit_residual", (ricci.tensor - factor * g).norm() / g.norm()}}}};
}

}  // namespace finslerlab
