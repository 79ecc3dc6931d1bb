#include <fstream>
#include <set>
#include <sstream>

#include "finslerlab/errors.hpp"
#include "finslerlab/metrics.hpp"

namespace finslerlab {

using nlohmann::json;

Polynomial::Polynomial(std::vector<Monomial> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    for (int p : t.powers) {
      if (p < 0) throw ConfigError("polynomial: negative exponent");
    }
  }
}

Polynomial Polynomial::constant(int dimension, double value) {
  return Polynomial({Monomial{value, std::vector<int>(static_cast<std::size_t>(dimension), 0)}});
}

int Polynomial::degree() const noexcept {
  int d = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int p : t.powers) s += p;
    d = std::max(d, s);
  }
  return d;
}

double Polynomial::operator()(std::span<const double> x) const {
  double acc = 0.0;
  for (const auto& t : terms_) {
    double m = t.coefficient;
    for (std::size_t i = 0; i < t.powers.size(); ++i) {
      for (int p = 0; p < t.powers[i]; ++p) m *= x[i];
    }
    acc += m;
  }
  return acc;
}

num::Jet Polynomial::operator()(std::span<const num::Jet> x) const {
  num::Jet acc = num::Jet(x[0].space(), 0.0).truncated(x[0].order());
  for (const auto& t : terms_) {
    if (t.coefficient == 0.0) continue;
    num::Jet m = num::Jet(x[0].space(), t.coefficient).truncated(x[0].order());
    for (std::size_t i = 0; i < t.powers.size(); ++i) {
      for (int p = 0; p < t.powers[i]; ++p) m *= x[i];
    }
    acc += m;
  }
  return acc;
}

Polynomial Polynomial::derivative(int variable) const {
  std::vector<Monomial> out;
  const auto v = static_cast<std::size_t>(variable);
  for (const auto& t : terms_) {
    if (v >= t.powers.size() || t.powers[v] == 0) continue;
    Monomial m = t;
    m.coefficient *= t.powers[v];
    m.powers[v] -= 1;
    out.push_back(std::move(m));
  }
  return Polynomial(std::move(out));
}

// ---------------------------------------------------------------------------

std::string to_string(Family family) {
  switch (family) {
    case Family::riemannian: return "riemannian";
    case Family::randers: return "randers";
    case Family::funk_ball: return "funk_ball";
    case Family::klein_ball: return "klein_ball";
    case Family::interval_funk: return "interval_funk";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  for (Family f : {Family::riemannian, Family::randers, Family::funk_ball, Family::klein_ball, Family::interval_funk}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown metric family '" + name + "'");
}

namespace {

void reject_unknown_keys(const json& object, const std::set<std::string>& allowed, const std::string& where) {
  if (!object.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : object.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown field '" + key + "'");
  }
}

// A polynomial is a number (constant) or a list of {"coefficient", "powers"} terms.
Polynomial parse_polynomial(const json& j, int dimension, const std::string& where) {
  if (j.is_number()) return Polynomial::constant(dimension, j.get<double>());
  if (!j.is_array()) throw ConfigError(where + ": polynomial must be a number or a list of terms");
  std::vector<Monomial> terms;
  for (const auto& term : j) {
    reject_unknown_keys(term, {"coefficient", "powers"}, where);
    if (!term.contains("coefficient") || !term["coefficient"].is_number()) {
      throw ConfigError(where + ": term needs a numeric 'coefficient'");
    }
    Monomial m;
    m.coefficient = term["coefficient"].get<double>();
    if (term.contains("powers")) {
      if (!term["powers"].is_array()) throw ConfigError(where + ": 'powers' must be a list");
      for (const auto& p : term["powers"]) {
        if (!p.is_number_integer() || p.get<int>() < 0) throw ConfigError(where + ": powers must be non-negative integers");
        m.powers.push_back(p.get<int>());
      }
      if (static_cast<int>(m.powers.size()) != dimension) {
        throw ConfigError(where + ": 'powers' must have one entry per coordinate");
      }
    } else {
      m.powers.assign(static_cast<std::size_t>(dimension), 0);
    }
    terms.push_back(std::move(m));
  }
  Polynomial poly(std::move(terms));
  if (poly.degree() > 4) throw ConfigError(where + ": polynomial degree exceeds 4");
  return poly;
}

PolynomialMatrix parse_matrix(const json& j, int dimension, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dimension) {
    throw ConfigError(where + ": matrix must have " + std::to_string(dimension) + " rows");
  }
  PolynomialMatrix m;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != dimension) {
      throw ConfigError(where + ": matrix row " + std::to_string(i) + " must have " + std::to_string(dimension) +
                        " entries");
    }
    std::vector<Polynomial> r;
    for (std::size_t k = 0; k < row.size(); ++k) {
      r.push_back(parse_polynomial(row[k], dimension, where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
    }
    m.push_back(std::move(r));
  }
  return m;
}

std::vector<Polynomial> parse_one_form(const json& j, int dimension) {
  if (!j.is_array() || static_cast<int>(j.size()) != dimension) {
    throw ConfigError("randers.one_form must have " + std::to_string(dimension) + " entries");
  }
  std::vector<Polynomial> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(parse_polynomial(j[i], dimension, "randers.one_form[" + std::to_string(i) + "]"));
  }
  return out;
}

json polynomial_to_json(const Polynomial& p) {
  json terms = json::array();
  for (const auto& t : p.terms()) terms.push_back({{"coefficient", t.coefficient}, {"powers", t.powers}});
  return terms;
}

json matrix_to_json(const PolynomialMatrix& m) {
  json rows = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& p : row) r.push_back(polynomial_to_json(p));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

MetricConfig parse_metric_config(const json& document) {
  reject_unknown_keys(document, {"family", "dimension", "k", "scale", "riemannian", "randers"}, "metric config");
  if (!document.contains("family") || !document["family"].is_string()) {
    throw ConfigError("metric config: 'family' must be a string");
  }
  MetricConfig config;
  config.family = family_from_string(document["family"].get<std::string>());
  if (config.family == Family::interval_funk) {
    config.dimension = 1;
  }
  if (document.contains("dimension")) {
    if (!document["dimension"].is_number_integer()) throw ConfigError("metric config: 'dimension' must be an integer");
    config.dimension = document["dimension"].get<int>();
  } else if (config.family != Family::interval_funk) {
    throw ConfigError("metric config: 'dimension' is required");
  }
  if (config.family == Family::interval_funk ? config.dimension != 1 : config.dimension < 2) {
    throw ConfigError("metric config: invalid dimension " + std::to_string(config.dimension));
  }
  if (document.contains("k")) {
    if (config.family != Family::interval_funk) throw ConfigError("metric config: 'k' applies to interval_funk only");
    if (!document["k"].is_number()) throw ConfigError("metric config: 'k' must be a number");
    config.k = document["k"].get<double>();
    if (!(config.k > 0.0)) throw ConfigError("metric config: 'k' must be positive");
  }
  if (document.contains("scale")) {
    if (!document["scale"].is_number()) throw ConfigError("metric config: 'scale' must be a number");
    config.scale = document["scale"].get<double>();
    if (!(config.scale > 0.0)) throw ConfigError("metric config: 'scale' must be positive");
  }
  if (document.contains("riemannian")) {
    if (config.family != Family::riemannian) throw ConfigError("metric config: 'riemannian' block needs that family");
    const auto& block = document["riemannian"];
    reject_unknown_keys(block, {"matrix"}, "riemannian");
    if (block.contains("matrix")) config.matrix = parse_matrix(block["matrix"], config.dimension, "riemannian.matrix");
  }
  if (document.contains("randers")) {
    if (config.family != Family::randers) throw ConfigError("metric config: 'randers' block needs that family");
    const auto& block = document["randers"];
    reject_unknown_keys(block, {"matrix", "one_form"}, "randers");
    if (!block.contains("matrix") || !block.contains("one_form")) {
      throw ConfigError("randers: 'matrix' and 'one_form' are required");
    }
    config.matrix = parse_matrix(block["matrix"], config.dimension, "randers.matrix");
    config.one_form = parse_one_form(block["one_form"], config.dimension);
  } else if (config.family == Family::randers) {
    throw ConfigError("metric config: randers family needs a 'randers' block");
  }
  return config;
}

MetricConfig load_metric_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open metric config '" + path + "'");
  json document;
  try {
    in >> document;
  } catch (const json::parse_error& e) {
    throw ConfigError("metric config '" + path + "': " + e.what());
  }
  return parse_metric_config(document);
}

json to_json(const MetricConfig& config) {
  json out{{"family", to_string(config.family)}, {"dimension", config.dimension}};
  if (config.family == Family::interval_funk) out["k"] = config.k;
  if (config.scale != 1.0) out["scale"] = config.scale;
  if (config.family == Family::riemannian && config.matrix) {
    out["riemannian"] = {{"matrix", matrix_to_json(*config.matrix)}};
  }
  if (config.family == Family::randers && config.matrix && config.one_form) {
    json form = json::array();
    for (const auto& p : *config.one_form) form.push_back(polynomial_to_json(p));
    out["randers"] = {{"matrix", matrix_to_json(*config.matrix)}, {"one_form", form}};
  }
  return out;
}

}  // namespace finslerlab
