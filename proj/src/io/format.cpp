#include "rhocalc/format.hpp"

#include "rhocalc/errors.hpp"

namespace rhocalc {

using dsl::Expr;
using dsl::SourceError;

namespace {

[[noreturn]] void fail_at(const dsl::Span& span, ErrorCode code, const std::string& message) {
  throw SourceError(code, span, message);
}

// Runs f and relocates plain library errors to `span`.
template <class F>
auto located(const dsl::Span& span, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SourceError&) {
    throw;
  } catch (const Error& e) {
    throw SourceError(e.code(), span, e.detail());
  }
}

const char* describe(const Value& v) { return std::holds_alternative<GradedPoly>(v) ? "function" : "vector field"; }

GradedPoly power_of(const GradedPoly& f, std::int64_t n) {
  if (n < 0) return pow(invert(f), static_cast<int>(-n));
  return pow(f, static_cast<int>(n));
}

std::string join_tuple(const DegreeTuple& t) {
  std::string out = "(";
  for (std::size_t k = 0; k < t.size(); ++k) out += (k ? ", " : "") + format_degree(t[k]);
  return out + ")";
}

Json tuple_json(const DegreeTuple& t) {
  Json a = Json::array();
  for (const auto& d : t.degs) a.push_back(format_degree(d));
  return a;
}

DegreeTuple tuple_from_json(const CommutationFactor& f, const Json& j) {
  DegreeTuple t;
  for (const auto& d : j) t.degs.push_back(parse_degree(f, d.get<std::string>()));
  return t;
}

}  // namespace

Degree to_degree(const CommutationFactor& f, const dsl::DegreeLit& d) {
  return located(d.span, [&] { return f.degree(d.comps); });
}

Value evaluate(const Expr& e, const Scope& scope) {
  const ContextPtr& ctx = scope.ctx;
  auto poly_of = [&](const Expr& sub) -> GradedPoly {
    Value v = evaluate(sub, scope);
    if (!std::holds_alternative<GradedPoly>(v))
      fail_at(sub.span, ErrorCode::ShapeMismatch, "expected a function, got a vector field");
    return std::get<GradedPoly>(std::move(v));
  };
  return located(e.span, [&]() -> Value {
    switch (e.kind) {
      case Expr::Kind::Number:
        return GradedPoly::constant(ctx, CycloScalar(e.number));
      case Expr::Kind::Zeta:
        return GradedPoly::constant(ctx, CycloScalar::root_of_unity(static_cast<int>(e.n), 1));
      case Expr::Kind::Name: {
        if (ctx->index_of(e.name)) return GradedPoly::variable(ctx, e.name);
        const Value* v = scope.lookup ? scope.lookup(e.name) : nullptr;
        if (!v) fail_at(e.span, ErrorCode::ResolveError, "unknown name '" + e.name + "'");
        const ContextPtr& vc =
            std::holds_alternative<GradedPoly>(*v) ? std::get<GradedPoly>(*v).context() : std::get<Derivation>(*v).context();
        if (!same_context(vc, ctx))
          fail_at(e.span, ErrorCode::ContextMismatch, "'" + e.name + "' lives on a different space");
        return *v;
      }
      case Expr::Kind::Partial: {
        auto a = ctx->index_of(e.name);
        if (!a) fail_at(e.span, ErrorCode::ResolveError, "unknown coordinate '" + e.name + "'");
        return Derivation::partial(ctx, *a);
      }
      case Expr::Kind::Neg: {
        Value v = evaluate(e.args[0], scope);
        if (auto* p = std::get_if<GradedPoly>(&v)) return -*p;
        return -std::get<Derivation>(v);
      }
      case Expr::Kind::Add:
      case Expr::Kind::Sub: {
        Value a = evaluate(e.args[0], scope), b = evaluate(e.args[1], scope);
        if (a.index() != b.index())
          fail_at(e.span, ErrorCode::ShapeMismatch,
                  std::string("cannot combine a ") + describe(a) + " with a " + describe(b));
        bool add = e.kind == Expr::Kind::Add;
        if (auto* p = std::get_if<GradedPoly>(&a)) return add ? *p + std::get<GradedPoly>(b) : *p - std::get<GradedPoly>(b);
        auto& x = std::get<Derivation>(a);
        auto& y = std::get<Derivation>(b);
        if (x.is_zero()) return add ? y : -y;
        if (y.is_zero()) return x;
        return add ? x + y : x - y;
      }
      case Expr::Kind::Mul: {
        Value a = evaluate(e.args[0], scope), b = evaluate(e.args[1], scope);
        if (!std::holds_alternative<GradedPoly>(a))
          fail_at(e.span, ErrorCode::ShapeMismatch, "a vector field can only be multiplied from the left");
        if (auto* q = std::get_if<GradedPoly>(&b)) return std::get<GradedPoly>(a) * *q;
        return std::get<GradedPoly>(a) * std::get<Derivation>(b);
      }
      case Expr::Kind::Div: {
        Value a = evaluate(e.args[0], scope);
        GradedPoly inv = invert(poly_of(e.args[1]));
        if (auto* p = std::get_if<GradedPoly>(&a)) return *p * inv;
        return inv * std::get<Derivation>(a);
      }
      case Expr::Kind::Pow: {
        const Expr& base = e.args[0];
        if (base.kind == Expr::Kind::Name && ctx->index_of(base.name))
          return GradedPoly::variable(ctx, base.name, static_cast<int>(e.n));
        return power_of(poly_of(base), e.n);
      }
    }
    fail(ErrorCode::SyntaxError, "unknown expression");
  });
}

GradedPoly evaluate_poly(const Expr& e, const Scope& scope) {
  Value v = evaluate(e, scope);
  if (auto* p = std::get_if<GradedPoly>(&v)) return *p;
  fail_at(e.span, ErrorCode::ShapeMismatch, "expected a function, got a vector field");
}

Derivation evaluate_derivation(const Expr& e, const Scope& scope) {
  Value v = evaluate(e, scope);
  if (auto* x = std::get_if<Derivation>(&v)) return *x;
  const auto& p = std::get<GradedPoly>(v);
  if (p.is_zero()) return Derivation(scope.ctx, scope.ctx->zero_degree());
  fail_at(e.span, ErrorCode::ShapeMismatch, "expected a vector field, got a function");
}

std::string format_factor(const CommutationFactor& f) {
  std::string out = "phases [";
  const auto& q = f.phases();
  for (std::size_t a = 0; a < q.size(); ++a) {
    out += a ? ",[" : "[";
    for (std::size_t b = 0; b < q[a].size(); ++b) out += (b ? "," : "") + rational_to_string(q[a][b]);
    out += "]";
  }
  return out + "] on " + f.group().to_string();
}

CommutationFactor parse_factor(std::string_view text) {
  auto s = dsl::parse_session("factor " + std::string(text) + ";");
  const auto& d = std::get<dsl::FactorDecl>(s.items.at(0).stmt);
  if (d.preset != dsl::FactorDecl::Preset::Phases || !d.group)
    fail(ErrorCode::SyntaxError, "expected 'phases [[...]] on GROUP'");
  auto f = CommutationFactor::validate(*d.group, d.phases);
  return d.prime ? f.extend_prime() : f;
}

std::string format_degree(const Degree& d) { return d.to_string(); }

Degree parse_degree(const CommutationFactor& f, std::string_view text) {
  return to_degree(f, dsl::parse_degree(text));
}

GradedPoly parse_poly(const ContextPtr& ctx, std::string_view text) {
  return evaluate_poly(dsl::parse_expr(text), Scope{ctx, {}});
}

std::string format_derivation(const Derivation& x) { return x.to_string(); }

Derivation parse_derivation(const ContextPtr& ctx, std::string_view text) {
  return evaluate_derivation(dsl::parse_expr(text), Scope{ctx, {}});
}

std::string format_matrix(const GradedMatrix& m) {
  return m.to_string() + " : deg " + format_degree(m.degree()) + " rows " + join_tuple(m.rows()) + " cols " +
         join_tuple(m.cols());
}

GradedMatrix parse_matrix(const ContextPtr& ctx, std::string_view text) {
  auto s = dsl::parse_session("matrix M = " + std::string(text) + ";");
  const auto& d = std::get<dsl::MatrixDecl>(s.items.at(0).stmt);
  const auto& f = ctx->factor();
  DegreeTuple rows, cols;
  for (const auto& r : d.rows) rows.degs.push_back(to_degree(f, r));
  if (d.cols) {
    for (const auto& c : *d.cols) cols.degs.push_back(to_degree(f, c));
  } else {
    cols = rows;
  }
  Degree deg = d.degree ? to_degree(f, *d.degree) : f.zero();
  std::vector<GradedPoly> entries;
  for (const auto& row : d.entries)
    for (const auto& e : row) entries.push_back(evaluate_poly(e, Scope{ctx, {}}));
  if (d.entries.size() == 1 && d.entries[0].empty()) entries.clear();
  return GradedMatrix::make(ctx, rows, cols, deg, std::move(entries));
}

Json to_json(const CommutationFactor& f) { return Json::parse(f.to_json()); }

CommutationFactor factor_from_json(const Json& j) {
  GroupSpec g(j.at("free_rank").get<int>(), j.at("torsion").get<std::vector<int>>());
  std::vector<std::vector<Rational>> q;
  for (const auto& row : j.at("phase")) {
    std::vector<Rational> r;
    for (const auto& v : row) {
      Rational x(v.get<std::string>());
      x.canonicalize();
      r.push_back(x);
    }
    q.push_back(std::move(r));
  }
  return CommutationFactor::validate(g, std::move(q));
}

Json to_json(const Derivation& x) {
  Json comps = Json::object();
  const auto& ctx = x.context();
  for (std::size_t a = 0; a < x.components().size(); ++a)
    if (!x.component(a).is_zero()) comps[ctx->var(a).name] = x.component(a).to_string();
  return Json{{"degree", format_degree(x.degree())}, {"components", comps}, {"text", format_derivation(x)}};
}

Json to_json(const GradedMatrix& m) {
  Json entries = Json::array();
  for (std::size_t k = 0; k < m.nrows(); ++k) {
    Json row = Json::array();
    for (std::size_t l = 0; l < m.ncols(); ++l) row.push_back(m.at(k, l).to_string());
    entries.push_back(row);
  }
  return Json{{"degree", format_degree(m.degree())},
              {"rows", tuple_json(m.rows())},
              {"cols", tuple_json(m.cols())},
              {"entries", entries}};
}

GradedMatrix matrix_from_json(const ContextPtr& ctx, const Json& j) {
  const auto& f = ctx->factor();
  std::vector<GradedPoly> entries;
  for (const auto& row : j.at("entries"))
    for (const auto& e : row) entries.push_back(parse_poly(ctx, e.get<std::string>()));
  return GradedMatrix::make(ctx, tuple_from_json(f, j.at("rows")), tuple_from_json(f, j.at("cols")),
                            parse_degree(f, j.at("degree").get<std::string>()), std::move(entries));
}

Json to_json(const CheckReport& r) {
  return Json{{"holds", r.holds}, {"checked", r.checked}, {"failures", r.failures}};
}

Json to_json(const PropertyResult& p) {
  Json j{{"name", p.name}, {"applicable", p.applicable}, {"pass", p.pass}};
  if (!p.detail.empty()) j["detail"] = p.detail;
  return j;
}

Json to_json(const ModularClassReport& r) {
  Json j{{"representative", r.representative.to_string()},
         {"closed", r.closed},
         {"verdict", to_string(r.exactness.verdict)},
         {"certificate", r.exactness.certificate}};
  if (r.exactness.preimage) j["preimage"] = r.exactness.preimage->to_string();
  return j;
}

Json to_json(const ScenarioResult& r) {
  Json classes = Json::array();
  for (const auto& c : r.classes) {
    Json j{{"label", c.label}};
    j.update(to_json(c.report));
    j["expected"] = c.expected.to_string();
    j["expected_verdict"] = c.expected_verdict ? Json(to_string(*c.expected_verdict)) : Json(nullptr);
    j["matches"] = c.matches;
    classes.push_back(j);
  }
  Json checks = Json::array();
  for (const auto& [name, ok] : r.checks) checks.push_back(Json{{"name", name}, {"ok", ok}});
  return Json{{"scenario", r.name},
              {"description", r.description},
              {"classes", classes},
              {"checks", checks},
              {"passed", r.passed()}};
}

}  // namespace rhocalc
