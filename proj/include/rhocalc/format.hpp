#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "rhocalc/dsl.hpp"
#include "rhocalc/volume.hpp"

namespace rhocalc {

using Json = nlohmann::ordered_json;

// Canonical DSL text for every value type. Each printer has a parser with
// print(parse(print(x))) == print(x).

/// "phases [[0,1/4],[-1/4,0]] on Z^2"; presets are always expanded.
std::string format_factor(const CommutationFactor& f);
CommutationFactor parse_factor(std::string_view text);

std::string format_degree(const Degree& d);
Degree parse_degree(const CommutationFactor& f, std::string_view text);

/// Polynomials print with GradedPoly::to_string.
GradedPoly parse_poly(const ContextPtr& ctx, std::string_view text);

/// "c1 * d/dx + ..." with every coefficient parenthesized.
std::string format_derivation(const Derivation& x);
Derivation parse_derivation(const ContextPtr& ctx, std::string_view text);

/// "[[a, b], [c, d]] : deg (0) rows ((0), (1)) cols ((0), (1))".
std::string format_matrix(const GradedMatrix& m);
GradedMatrix parse_matrix(const ContextPtr& ctx, std::string_view text);

// JSON payloads. Polynomials are stored in canonical text form.

Json to_json(const CommutationFactor& f);
CommutationFactor factor_from_json(const Json& j);
Json to_json(const Derivation& x);
Json to_json(const GradedMatrix& m);
GradedMatrix matrix_from_json(const ContextPtr& ctx, const Json& j);
Json to_json(const CheckReport& r);
Json to_json(const PropertyResult& p);
/// {"representative", "closed", "verdict", "certificate"} plus the preimage
/// when the class is exact.
Json to_json(const ModularClassReport& r);
Json to_json(const ScenarioResult& r);

// Values evaluated from DSL expressions.

using Value = std::variant<GradedPoly, Derivation>;

/// Named values visible to expression evaluation.
struct Scope {
  ContextPtr ctx;
  std::function<const Value*(const std::string&)> lookup;
};

/// Names resolve to the scope's variables first, then to scope.lookup.
/// Throws SourceError located at the offending subexpression.
Value evaluate(const dsl::Expr& e, const Scope& scope);
GradedPoly evaluate_poly(const dsl::Expr& e, const Scope& scope);
Derivation evaluate_derivation(const dsl::Expr& e, const Scope& scope);
Degree to_degree(const CommutationFactor& f, const dsl::DegreeLit& d);

}  // namespace rhocalc
