#pragma once

#include <json.hpp>

#include "finslerlab/curvature.hpp"
#include "finslerlab/geodesics.hpp"
#include "finslerlab/metrics.hpp"
#include "finslerlab/projective.hpp"

namespace finslerlab {

nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const EinsteinReport& report);
nlohmann::json to_json(const DistanceResult& result);
nlohmann::json to_json(const PseudoDistanceResult& result);
nlohmann::json to_json(const Theorem1Report& report);
nlohmann::json to_json(const ProjectiveRelation& relation);

// Riemann matrix, Ricci data and classification of flag samples at (x, y).
// Flags through y and each u in `flags`; degenerate flags are reported as null.
nlohmann::json curvature_report(const FinslerStructure& structure, const Vector& x, const Vector& y,
                                const std::vector<Vector>& flags);

}  // namespace finslerlab
