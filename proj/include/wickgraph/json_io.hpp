#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wickgraph/engine.hpp"
#include "wickgraph/errors.hpp"
#include "wickgraph/kernel.hpp"
#include "wickgraph/monte_carlo.hpp"
#include "wickgraph/multigraph.hpp"
#include "wickgraph/polynomial.hpp"
#include "wickgraph/quadrature.hpp"

namespace wickgraph {

using nlohmann::json;

// Polynomial schema: {"m": int, "terms": [{"alpha": [int,...], "q": float}, ...]}.
// Duplicate alphas are summed on load.
inline Polynomial polynomial_from_json(const json& j) {
  if (!j.is_object() || !j.contains("m"))
    throw ValidationError("polynomial: expected an object with \"m\"");
  const int m = j.at("m").get<int>();
  std::vector<std::pair<MultiIndex, double>> terms;
  if (j.contains("terms")) {
    if (!j.at("terms").is_array()) throw ValidationError("polynomial: \"terms\" must be an array");
    for (const auto& t : j.at("terms")) {
      if (!t.contains("alpha") || !t.contains("q"))
        throw ValidationError("polynomial: each term needs \"alpha\" and \"q\"");
      std::vector<int> alpha = t.at("alpha").get<std::vector<int>>();
      if (static_cast<int>(alpha.size()) != m)
        throw ValidationError("polynomial: alpha length must equal m");
      terms.emplace_back(MultiIndex(std::move(alpha)), t.at("q").get<double>());
    }
  }
  return Polynomial(m, terms);
}

inline json polynomial_to_json(const Polynomial& p) {
  json terms = json::array();
  for (const auto& [alpha, q] : p.terms())
    terms.push_back({{"alpha", alpha.exponents()}, {"q", q}});
  return {{"m", p.dimension()}, {"terms", terms}};
}

// Graph schema: {"n": int, "upper": [[...], ...]} with a square
// upper-triangular matrix (strictly-lower entries zero).
inline Multigraph multigraph_from_json(const json& j) {
  if (!j.contains("n") || !j.contains("upper"))
    throw ValidationError("graph: expected {\"n\", \"upper\"}");
  const int n = j.at("n").get<int>();
  const auto rows = j.at("upper").get<std::vector<std::vector<int>>>();
  if (static_cast<int>(rows.size()) != n) throw ValidationError("graph: row count must equal n");
  return Multigraph::from_upper_rows(rows);
}

inline json multigraph_to_json(const Multigraph& g) {
  return {{"n", g.order()}, {"upper", g.upper_rows()}, {"edges", g.edge_list_string()}};
}

// Kernel spec: {"preset": "brownian_bridge"} | {"preset": "exponential", "rho": x}
// | {"grid_file": "path.csv"}.
inline CovarianceKernel kernel_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("kernel: expected an object");
  if (j.contains("grid_file")) return CovarianceKernel::load_grid_csv(j.at("grid_file"));
  if (j.contains("preset")) {
    const std::string name = j.at("preset").get<std::string>();
    const double rho = j.value("rho", 1.0);
    return CovarianceKernel::from_preset_name(name, rho);
  }
  throw ValidationError("kernel: need \"preset\" or \"grid_file\"");
}

// Quadrature spec: {"kind": "gauss_legendre"|"trapezoid", "order": int, "panels": int}.
inline QuadratureRule quadrature_from_json(const json& j) {
  QuadratureRule rule;
  if (!j.is_object()) throw ValidationError("quadrature: expected an object");
  if (j.contains("kind")) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "gauss_legendre")
      rule.kind = QuadratureRule::Kind::GaussLegendre;
    else if (kind == "trapezoid")
      rule.kind = QuadratureRule::Kind::Trapezoid;
    else
      throw ValidationError("quadrature: unknown kind " + kind);
  }
  rule.order = j.value("order", rule.order);
  rule.panels = j.value("panels", rule.panels);
  rule.validate();
  return rule;
}

inline json term_to_json(const Term& t) {
  json alphas = json::array();
  for (const auto& a : t.alphas) alphas.push_back(a.exponents());
  json comps = json::array();
  for (const auto& [key, count] : t.components)
    comps.push_back({{"key", key}, {"count", count}});
  json out = {{"alphas", alphas},
              {"coeff_q", t.coeff_q},
              {"coeff_comb", fraction_string(t.coeff_comb)},
              {"components", comps}};
  out["value"] = std::isfinite(t.value) ? json(t.value) : json(nullptr);
  return out;
}

inline json diagnostics_to_json(const EvaluationDiagnostics& d) {
  return {{"tuple_count", d.tuple_count},
          {"skipped_parity", d.skipped_parity},
          {"term_count", d.term_count},
          {"term_budget", d.term_budget},
          {"quad_error_envelope", d.quad_error_envelope},
          {"terms_truncated", d.terms_truncated}};
}

// Result schema: {"total": float, "n": int, "terms": [...], "diagnostics": {...}}.
inline json result_to_json(const EvaluationResult& r, bool with_terms = true) {
  json terms = json::array();
  if (with_terms)
    for (const auto& t : r.terms) terms.push_back(term_to_json(t));
  return {{"total", r.total},
          {"n", r.n},
          {"terms", terms},
          {"diagnostics", diagnostics_to_json(r.diagnostics)}};
}

inline json expansion_to_json(const Expansion& ex, bool with_terms = true) {
  json shapes = json::array();
  for (const auto& s : ex.shapes) {
    json comps = json::array();
    for (const auto& [key, count] : s.components)
      comps.push_back({{"key", key}, {"count", count}});
    shapes.push_back(
        {{"components", comps}, {"weight", s.weight}, {"term_count", s.term_count}});
  }
  json terms = json::array();
  if (with_terms)
    for (const auto& t : ex.terms) terms.push_back(term_to_json(t));
  return {{"n", ex.n},
          {"shapes", shapes},
          {"terms", terms},
          {"diagnostics", diagnostics_to_json(ex.diagnostics)}};
}

inline json mc_to_json(const McEstimate& e) {
  return {{"mean", e.mean}, {"stderr", e.stderr_of_mean}, {"samples", e.samples}};
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("bad JSON in " + path + ": " + e.what());
  }
  return j;
}

inline json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("bad JSON for " + what + ": " + e.what());
  }
}

}  // namespace wickgraph
