#include "rhocalc/session.hpp"

#include <cstdlib>
#include <map>
#include <set>

#include "rhocalc/errors.hpp"

namespace rhocalc {

using dsl::Expr;
using dsl::Name;
using dsl::SourceError;
using dsl::Span;

int trunc_from_env() {
  const char* v = std::getenv("RHOCALC_TRUNC");
  if (!v || !*v) return 8;
  char* end = nullptr;
  long t = std::strtol(v, &end, 10);
  if (*end != '\0' || t < 0 || t > 1000) return 8;
  return static_cast<int>(t);
}

bool SessionOutcome::ok() const {
  if (aborted) return false;
  for (const auto& r : reports)
    if (!r.ok) return false;
  return true;
}

namespace {

[[noreturn]] void fail_at(const Span& span, ErrorCode code, const std::string& message) {
  throw SourceError(code, span, message);
}

template <class F>
auto located(const Span& span, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SourceError&) {
    throw;
  } catch (const Error& e) {
    throw SourceError(e.code(), span, e.detail());
  }
}

template <class Map>
const typename Map::mapped_type& find_named(const Map& m, const Name& n, const char* what) {
  auto it = m.find(n.text);
  if (it == m.end()) fail_at(n.span, ErrorCode::ResolveError, std::string("unknown ") + what + " '" + n.text + "'");
  return it->second;
}

Name name_arg(const Expr& e, const char* what) {
  if (e.kind != Expr::Kind::Name)
    fail_at(e.span, ErrorCode::SyntaxError, std::string("expected ") + what + " name");
  return Name{e.name, e.span};
}

Rational constant_of(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Number:
      return e.number;
    case Expr::Kind::Neg:
      return -constant_of(e.args[0]);
    case Expr::Kind::Add:
      return constant_of(e.args[0]) + constant_of(e.args[1]);
    case Expr::Kind::Sub:
      return constant_of(e.args[0]) - constant_of(e.args[1]);
    case Expr::Kind::Mul:
      return constant_of(e.args[0]) * constant_of(e.args[1]);
    case Expr::Kind::Div: {
      Rational d = constant_of(e.args[1]);
      if (d == 0) fail_at(e.span, ErrorCode::ConstraintViolation, "division by zero");
      return constant_of(e.args[0]) / d;
    }
    default:
      fail_at(e.span, ErrorCode::SyntaxError, "expected a rational constant");
  }
}

std::int64_t integer_of(const Expr& e) {
  Rational q = constant_of(e);
  if (q.get_den() != 1) fail_at(e.span, ErrorCode::SyntaxError, "expected an integer");
  return q.get_num().get_si();
}

struct Space {
  std::string key;
  ContextPtr ctx;
  std::optional<Chart> chart;
  const DeRham* dr = nullptr;
  const ShiftedCotangent* ts = nullptr;
};

Degree poly_degree(const GradedPoly& f) { return f.is_zero() ? f.context()->zero_degree() : f.degree(); }

class Runner {
 public:
  explicit Runner(const RunOptions& opts) : opts_(opts) {}

  SessionOutcome run(const dsl::Session& s) {
    SessionOutcome out;
    out.trunc = opts_.trunc;
    for (const auto& item : s.items) {
      Report r;
      r.command = item.text;
      r.span = item.span;
      try {
        if (const auto* c = std::get_if<dsl::Command>(&item.stmt)) {
          r.verb = c->verb.text;
          r.result = command(*c);
          r.diagnostics = diagnostics();
        } else {
          declare(item);
          continue;
        }
      } catch (const Error& e) {
        r.ok = false;
        r.error = error_json(e, item.span);
        if (!item.is_command()) {
          r.verb = "declare";
          out.reports.push_back(std::move(r));
          out.aborted = true;
          break;
        }
      }
      out.reports.push_back(std::move(r));
    }
    out.factor = factor_;
    return out;
  }

  static Json error_json(const Error& e, const Span& fallback) {
    Span sp = fallback;
    if (const auto* se = dynamic_cast<const SourceError*>(&e)) sp = se->span();
    return Json{{"code", to_string(e.code())},
                {"message", e.detail()},
                {"line", sp.line},
                {"col", sp.col},
                {"length", sp.length}};
  }

 private:
  Json diagnostics() const {
    return Json{{"trunc", opts_.trunc}, {"conductor", factor_ ? factor_->conductor() : 1}};
  }

  // ---- declarations

  void declare(const dsl::Item& item) {
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, dsl::GroupDecl>) {
            declare_group(d, item.span);
          } else if constexpr (std::is_same_v<T, dsl::FactorDecl>) {
            declare_factor(d, item.span);
          } else if constexpr (std::is_same_v<T, dsl::ChartDecl>) {
            declare_chart(d);
          } else if constexpr (std::is_same_v<T, dsl::TransitionDecl>) {
            declare_transition(d, item.span);
          } else if constexpr (std::is_same_v<T, dsl::AtlasDecl>) {
            declare_atlas(d);
          } else if constexpr (std::is_same_v<T, dsl::BundleDecl>) {
            declare_bundle(d);
          } else if constexpr (std::is_same_v<T, dsl::ValueDecl>) {
            declare_value(d);
          } else if constexpr (std::is_same_v<T, dsl::MatrixDecl>) {
            declare_matrix(d);
          } else if constexpr (std::is_same_v<T, dsl::VolumeDecl>) {
            declare_volume(d);
          }
        },
        item.stmt);
  }

  template <class Map>
  void fresh(const Map& m, const Name& n, const char* what) {
    if (m.count(n.text)) fail_at(n.span, ErrorCode::ConstraintViolation, std::string(what) + " '" + n.text + "' is already declared");
  }

  const CommutationFactor& factor(const Span& at) const {
    if (!factor_) fail_at(at, ErrorCode::ResolveError, "no factor declared");
    return *factor_;
  }

  void declare_group(const dsl::GroupDecl& d, const Span& at) {
    if (group_) fail_at(at, ErrorCode::ConstraintViolation, "one grading group per session");
    group_ = d.group;
  }

  void declare_factor(const dsl::FactorDecl& d, const Span& at) {
    if (factor_) fail_at(at, ErrorCode::ConstraintViolation, "one commutation factor per session");
    if (d.group && group_ && !(*d.group == *group_))
      fail_at(d.preset_span, ErrorCode::ConstraintViolation, "factor group differs from the declared group");
    std::optional<GroupSpec> g = d.group ? d.group : group_;
    CommutationFactor f = located(d.preset_span, [&] {
      using P = dsl::FactorDecl::Preset;
      switch (d.preset) {
        case P::Super:
          if (!g) fail(ErrorCode::ResolveError, "factor super needs a group");
          return CommutationFactor::super(*g);
        case P::Trivial:
          if (!g) fail(ErrorCode::ResolveError, "factor trivial needs a group");
          return CommutationFactor::trivial(*g);
        case P::Torus: {
          auto t = CommutationFactor::torus(d.phases);
          if (g && !(t.group() == *g))
            fail(ErrorCode::ConstraintViolation, "torus factor lives on " + t.group().to_string() + ", not " + g->to_string());
          return t;
        }
        case P::Phases:
          if (!g) fail(ErrorCode::ResolveError, "factor phases needs a group");
          return CommutationFactor::validate(*g, d.phases);
      }
      fail(ErrorCode::SyntaxError, "unknown factor preset");
    });
    factor_ = d.prime ? f.extend_prime() : f;
  }

  void declare_chart(const dsl::ChartDecl& d) {
    fresh(charts_, d.name, "chart");
    if (d.like) {
      charts_.emplace(d.name.text, Chart{d.name.text, find_named(charts_, *d.like, "chart").ctx});
      current_ = d.name.text;
      return;
    }
    const CommutationFactor& f = factor(d.name.span);
    std::vector<Variable> vars;
    std::set<std::string> seen;
    for (const auto& v : d.vars) {
      if (!seen.insert(v.name.text).second)
        fail_at(v.name.span, ErrorCode::ConstraintViolation, "variable '" + v.name.text + "' declared twice");
      Degree deg = v.degree ? to_degree(f, *v.degree) : f.zero();
      VarKind kind = v.kind;
      if (kind == VarKind::FormalEven) {
        if (!v.degree) fail_at(v.name.span, ErrorCode::SyntaxError, "formal variable '" + v.name.text + "' needs a degree");
        bool odd = f.is_odd(deg);
        if (v.odd && *v.odd != odd)
          fail_at(v.name.span, ErrorCode::ConstraintViolation,
                  "'" + v.name.text + "' has degree " + deg.to_string() + ", which is " + (odd ? "odd" : "even"));
        if (odd) kind = VarKind::FormalOdd;
      } else if (v.odd && *v.odd) {
        fail_at(v.name.span, ErrorCode::ConstraintViolation, "'" + v.name.text + "' is not formal and cannot be odd");
      }
      vars.push_back(Variable{v.name.text, deg, kind, v.invertible, v.nilpotent});
    }
    auto ctx = located(d.name.span, [&] { return Context::make(f, vars, opts_.trunc); });
    charts_.emplace(d.name.text, Chart{d.name.text, ctx});
    current_ = d.name.text;
  }

  void declare_transition(const dsl::TransitionDecl& d, const Span& at) {
    const Chart& from = find_named(charts_, d.from, "chart");
    const Chart& to = find_named(charts_, d.to, "chart");
    std::map<std::string, GradedPoly> images;
    Scope scope = scope_for(from.ctx, "");
    for (const auto& [n, e] : d.images) {
      if (!to.ctx->index_of(n.text))
        fail_at(n.span, ErrorCode::ResolveError, "'" + n.text + "' is not a coordinate of " + to.name);
      if (!images.emplace(n.text, evaluate_poly(e, scope)).second)
        fail_at(n.span, ErrorCode::ConstraintViolation, "'" + n.text + "' assigned twice");
    }
    auto t = located(at, [&] { return TransitionMap::make(from, to, images); });
    transitions_.insert_or_assign({d.from.text, d.to.text}, std::move(t));
  }

  void declare_atlas(const dsl::AtlasDecl& d) {
    fresh(atlases_, d.name, "atlas");
    Atlas at;
    std::set<std::string> names;
    for (const auto& n : d.charts) {
      at.charts.push_back(find_named(charts_, n, "chart"));
      if (!names.insert(n.text).second) fail_at(n.span, ErrorCode::ConstraintViolation, "chart listed twice");
    }
    for (const auto& [key, t] : transitions_)
      if (names.count(key.first) && names.count(key.second)) at.add(t);
    atlases_.emplace(d.name.text, std::move(at));
  }

  void declare_bundle(const dsl::BundleDecl& d) {
    fresh(bundles_, d.name, "bundle");
    const Atlas& at = find_named(atlases_, d.atlas, "atlas");
    BundleSpec b = located(d.name.span, [&] {
      BundleSpec out = d.cotangent ? cotangent(at) : tangent(at);
      if (d.shift) out = shift_degree(out, to_degree(at.charts.front().ctx->factor(), *d.shift));
      if (d.pi) out = shift_pi(out);
      return out;
    });
    b.name = d.name.text;
    bundles_.emplace(d.name.text, std::move(b));
  }

  void declare_value(const dsl::ValueDecl& d) {
    fresh(values_, d.name, "value");
    Space sp = space(d.space, d.name.span);
    Scope scope = scope_for(sp.ctx, sp.key);
    Value v = d.kind == dsl::ValueDecl::Kind::Poly ? Value(evaluate_poly(d.value, scope))
                                                   : Value(evaluate_derivation(d.value, scope));
    values_.emplace(d.name.text, std::move(v));
  }

  void declare_matrix(const dsl::MatrixDecl& d) {
    fresh(matrices_, d.name, "matrix");
    Space sp = space(d.space, d.name.span);
    const auto& f = sp.ctx->factor();
    DegreeTuple rows, cols;
    for (const auto& r : d.rows) rows.degs.push_back(to_degree(f, r));
    if (d.cols) {
      for (const auto& c : *d.cols) cols.degs.push_back(to_degree(f, c));
    } else {
      cols = rows;
    }
    Degree deg = d.degree ? to_degree(f, *d.degree) : f.zero();
    Scope scope = scope_for(sp.ctx, sp.key);
    std::vector<GradedPoly> entries;
    for (const auto& row : d.entries)
      for (const auto& e : row) entries.push_back(evaluate_poly(e, scope));
    auto m = located(d.name.span, [&] { return GradedMatrix::make(sp.ctx, rows, cols, deg, entries); });
    matrices_.emplace(d.name.text, std::move(m));
  }

  void declare_volume(const dsl::VolumeDecl& d) {
    fresh(volumes_, d.name, "volume");
    if (!d.atlas) {
      Space sp = space(d.space, d.name.span);
      GradedPoly s = evaluate_poly(d.densities.front().second, scope_for(sp.ctx, sp.key));
      Chart c = sp.chart ? *sp.chart : Chart{sp.key, sp.ctx};
      auto vol = located(d.densities.front().second.span, [&] { return VolumeForm::single(c, s); });
      volumes_.emplace(d.name.text, std::move(vol));
      return;
    }
    const Atlas& at = find_named(atlases_, *d.atlas, "atlas");
    std::vector<std::optional<GradedPoly>> dens(at.charts.size());
    for (const auto& [n, e] : d.densities) {
      std::size_t k = located(n.span, [&] { return at.index_of(n.text); });
      if (dens[k]) fail_at(n.span, ErrorCode::ConstraintViolation, "density for " + n.text + " given twice");
      dens[k] = evaluate_poly(e, scope_for(at.charts[k].ctx, at.charts[k].name));
    }
    std::vector<GradedPoly> s;
    for (std::size_t k = 0; k < dens.size(); ++k) {
      if (!dens[k]) fail_at(d.name.span, ErrorCode::ResolveError, "no density for chart " + at.charts[k].name);
      s.push_back(*dens[k]);
    }
    auto vol = located(d.name.span, [&] { return VolumeForm::make(at, s); });
    volumes_.emplace(d.name.text, std::move(vol));
  }

  // ---- spaces and scopes

  Space space(const std::optional<dsl::SpaceRef>& ref, const Span& at) {
    if (!ref) {
      if (current_.empty()) fail_at(at, ErrorCode::ResolveError, "no chart declared");
      const Chart& c = charts_.at(current_);
      return Space{c.name, c.ctx, c, nullptr, nullptr};
    }
    const Chart& c = find_named(charts_, ref->chart, "chart");
    std::string key = ref->key();
    switch (ref->kind) {
      case dsl::SpaceRef::Kind::Chart:
        return Space{key, c.ctx, c, nullptr, nullptr};
      case dsl::SpaceRef::Kind::DeRham: {
        auto it = derhams_.find(key);
        if (it == derhams_.end()) {
          it = derhams_.emplace(key, located(ref->span, [&] { return de_rham(c); })).first;
          extras_[key].emplace("d", it->second.d);
        }
        return Space{key, it->second.forms, std::nullopt, &it->second, nullptr};
      }
      case dsl::SpaceRef::Kind::ShiftedCotangent: {
        auto it = tstars_.find(key);
        if (it == tstars_.end()) {
          Degree i = to_degree(c.ctx->factor(), *ref->shift);
          it = tstars_.emplace(key, located(ref->span, [&] { return shifted_cotangent(c.ctx, i); })).first;
        }
        return Space{key, it->second.ctx, std::nullopt, nullptr, &it->second};
      }
    }
    fail_at(at, ErrorCode::SyntaxError, "unknown space");
  }

  Scope scope_for(const ContextPtr& ctx, const std::string& key) {
    const auto* extras = extras_.count(key) ? &extras_.at(key) : nullptr;
    return Scope{ctx, [this, extras](const std::string& n) -> const Value* {
                   if (extras) {
                     auto it = extras->find(n);
                     if (it != extras->end()) return &it->second;
                   }
                   auto it = values_.find(n);
                   return it == values_.end() ? nullptr : &it->second;
                 }};
  }

  static ContextPtr context_of(const Value& v) {
    return std::holds_alternative<GradedPoly>(v) ? std::get<GradedPoly>(v).context() : std::get<Derivation>(v).context();
  }

  // First named value referenced by the expressions, if any.
  const Value* first_value(const std::vector<Expr>& exprs) const {
    std::vector<const Expr*> stack;
    for (auto it = exprs.rbegin(); it != exprs.rend(); ++it) stack.push_back(&*it);
    while (!stack.empty()) {
      const Expr* e = stack.back();
      stack.pop_back();
      if (e->kind == Expr::Kind::Name) {
        auto it = values_.find(e->name);
        if (it != values_.end()) return &it->second;
      }
      for (auto a = e->args.rbegin(); a != e->args.rend(); ++a) stack.push_back(&*a);
    }
    return nullptr;
  }

  // Explicit space, else the space of the first named value, else the current chart.
  Space command_space(const dsl::Command& c) {
    if (c.space) return space(c.space, c.verb.span);
    if (const Value* v = first_value(c.args)) {
      ContextPtr ctx = context_of(*v);
      if (!current_.empty() && same_context(charts_.at(current_).ctx, ctx)) return space(std::nullopt, c.verb.span);
      for (const auto& [name, dr] : derhams_)
        if (same_context(dr.forms, ctx)) return Space{name, ctx, std::nullopt, &dr, nullptr};
      for (const auto& [name, ts] : tstars_)
        if (same_context(ts.ctx, ctx)) return Space{name, ctx, std::nullopt, nullptr, &ts};
      for (const auto& [name, ch] : charts_)
        if (same_context(ch.ctx, ctx)) return Space{name, ctx, ch, nullptr, nullptr};
    }
    return space(std::nullopt, c.verb.span);
  }

  // ---- commands

  void arity(const dsl::Command& c, std::size_t lo, std::size_t hi) {
    if (c.args.size() < lo || c.args.size() > hi) {
      std::string want = lo == hi ? std::to_string(lo) : std::to_string(lo) + " to " + std::to_string(hi);
      fail_at(c.verb.span, ErrorCode::SyntaxError, c.verb.text + " takes " + want + " argument(s)");
    }
  }

  // Keys listed in `allowed`; a trailing '*' accepts any suffix (thetaAB).
  std::map<std::string, const Expr*> options(const dsl::Command& c, std::initializer_list<std::string_view> allowed) {
    std::map<std::string, const Expr*> out;
    for (const auto& [k, v] : c.options) {
      bool ok = false;
      for (std::string_view a : allowed) {
        if (!a.empty() && a.back() == '*')
          ok = ok || k.text.rfind(a.substr(0, a.size() - 1), 0) == 0;
        else
          ok = ok || k.text == a;
      }
      if (!ok) fail_at(k.span, ErrorCode::ResolveError, "unknown option '" + k.text + "' for " + c.verb.text);
      if (out.count(k.text)) fail_at(k.span, ErrorCode::ConstraintViolation, "option '" + k.text + "' given twice");
      out[k.text] = &v;
    }
    return out;
  }

  int int_option(const std::map<std::string, const Expr*>& o, const char* k, int dflt) {
    auto it = o.find(k);
    return it == o.end() ? dflt : static_cast<int>(integer_of(*it->second));
  }

  Json value_json(const Value& v) {
    if (const auto* p = std::get_if<GradedPoly>(&v)) {
      Json j{{"kind", "function"}, {"value", p->to_string()}};
      j["degree"] = p->is_zero() || p->is_homogeneous() ? Json(poly_degree(*p).to_string()) : Json(nullptr);
      return j;
    }
    const auto& x = std::get<Derivation>(v);
    return Json{{"kind", "vector field"}, {"value", format_derivation(x)}, {"degree", x.degree().to_string()}};
  }

  Json command(const dsl::Command& c) {
    const std::string& v = c.verb.text;
    if (v == "normalize") return cmd_normalize(c);
    if (v == "commutator") return cmd_commutator(c);
    if (v == "det" || v == "ber" || v == "trace") return cmd_matrix(c);
    if (v == "qcheck") return cmd_qcheck(c);
    if (v == "cartan") return cmd_cartan(c);
    if (v == "schouten") return cmd_schouten(c);
    if (v == "jacobian") return cmd_jacobian(c);
    if (v == "cocycle") return cmd_cocycle(c);
    if (v == "divergence") return cmd_divergence(c);
    if (v == "modular") return cmd_modular(c);
    if (v == "equivalent") return cmd_equivalent(c);
    if (v == "scenarios") return cmd_scenarios(c);
    fail_at(c.verb.span, ErrorCode::SyntaxError, "unknown command '" + v + "'");
  }

  Json cmd_normalize(const dsl::Command& c) {
    arity(c, 1, 1);
    options(c, {});
    Space sp = command_space(c);
    return value_json(evaluate(c.args[0], scope_for(sp.ctx, sp.key)));
  }

  Json cmd_commutator(const dsl::Command& c) {
    arity(c, 2, 2);
    options(c, {});
    Space sp = command_space(c);
    Scope scope = scope_for(sp.ctx, sp.key);
    Value a = evaluate(c.args[0], scope), b = evaluate(c.args[1], scope);
    if (a.index() != b.index())
      fail_at(c.verb.span, ErrorCode::ShapeMismatch, "commutator needs two functions or two vector fields");
    return located(c.verb.span, [&] {
      if (const auto* f = std::get_if<GradedPoly>(&a)) return value_json(rho_commutator(*f, std::get<GradedPoly>(b)));
      return value_json(commutator(std::get<Derivation>(a), std::get<Derivation>(b)));
    });
  }

  Json cmd_matrix(const dsl::Command& c) {
    arity(c, 1, 1);
    options(c, {});
    const Name& n = name_arg(c.args[0], "a matrix");
    const GradedMatrix& m = find_named(matrices_, n, "matrix");
    return located(c.verb.span, [&] {
      if (c.verb.text == "det") return Json{{"value", rho_det(m).to_string()}};
      if (c.verb.text == "ber") return Json{{"value", rho_ber_reordered(m).to_string()}};
      return Json{{"rho_trace", rho_tr(m).to_string()}, {"trace", trace(m).to_string()}};
    });
  }

  Json cmd_qcheck(const dsl::Command& c) {
    arity(c, 1, 1);
    options(c, {});
    Space sp = command_space(c);
    Derivation q = evaluate_derivation(c.args[0], scope_for(sp.ctx, sp.key));
    HomologicalReport r = located(c.verb.span, [&] { return is_homological(q); });
    Json j{{"homological", r.homological}, {"reason", to_string(r.reason)}};
    if (r.witness) {
      j["witness"] = q.context()->var(*r.witness).name;
      j["residual"] = r.residual.to_string();
    }
    return j;
  }

  Json cmd_cartan(const dsl::Command& c) {
    arity(c, 2, 3);
    auto o = options(c, {"samples", "seed"});
    Space sp = command_space(c);
    if (!sp.dr) fail_at(c.verb.span, ErrorCode::ShapeMismatch, "cartan runs on derham(CHART)");
    const DeRham& dr = *sp.dr;
    std::string base_key;
    for (const auto& [name, ch] : charts_)
      if (same_context(ch.ctx, dr.base)) base_key = name;
    Scope base = scope_for(dr.base, base_key);
    Derivation x = evaluate_derivation(c.args[0], base);
    Derivation y = evaluate_derivation(c.args[1], base);
    int samples = int_option(o, "samples", opts_.samples);
    unsigned seed = static_cast<unsigned>(int_option(o, "seed", 1));
    Json j = to_json(located(c.verb.span, [&] { return cartan_check(dr, x, y, samples, seed); }));
    if (c.args.size() == 3) {
      Derivation q = evaluate_derivation(c.args[2], base);
      auto r = located(c.args[2].span, [&] { return differential_sum_check(dr, q, samples, seed); });
      j["differential_sum"] = Json{{"d_squared_zero", r.d_squared_zero},
                                   {"lq_squared_zero", r.lq_squared_zero},
                                   {"bracket_d_lq_zero", r.bracket_d_lq_zero},
                                   {"bilinear_bracket_zero", r.bilinear_bracket_zero},
                                   {"composite_square_zero", r.composite_square_zero},
                                   {"composite_is_twice_d_lq", r.composite_is_twice_d_lq}};
    }
    return j;
  }

  Json cmd_schouten(const dsl::Command& c) {
    arity(c, 1, 3);
    options(c, {});
    Space sp = command_space(c);
    if (!sp.ts) fail_at(c.verb.span, ErrorCode::ShapeMismatch, "schouten runs on tstar(CHART, DEGREE)");
    const ShiftedCotangent& t = *sp.ts;
    if (c.args.size() == 1) {
      // Lift of a homological field on the base chart.
      std::string base_key;
      for (const auto& [name, ch] : charts_)
        if (same_context(ch.ctx, t.base)) base_key = name;
      Derivation q = evaluate_derivation(c.args[0], scope_for(t.base, base_key));
      LiftedQ l = located(c.args[0].span, [&] { return lift_fq(q, t.i); });
      return Json{{"f_q", l.f_q.to_string()},
                  {"q_tilde", format_derivation(l.q_tilde)},
                  {"homological", is_homological(l.q_tilde).homological},
                  {"bracket_f_q_f_q", schouten(l.t, l.f_q, l.f_q).to_string()}};
    }
    Scope scope = scope_for(sp.ctx, sp.key);
    GradedPoly f = evaluate_poly(c.args[0], scope), g = evaluate_poly(c.args[1], scope);
    return located(c.verb.span, [&] {
      GradedPoly v = schouten(t, f, g);
      Json j{{"value", v.to_string()}, {"coordinate_form_agrees", v == schouten_coordinate_form(t, f, g)}};
      if (c.args.size() == 3) {
        GradedPoly h = evaluate_poly(c.args[2], scope);
        Json props = Json::array();
        for (const auto& p : schouten_properties(t, f, g, h)) props.push_back(to_json(p));
        j["properties"] = props;
      }
      return j;
    });
  }

  Json cmd_jacobian(const dsl::Command& c) {
    arity(c, 1, 1);
    auto o = options(c, {"samples", "seed"});
    const Name& from = name_arg(c.args[0], "a chart");
    if (!c.target) fail_at(c.verb.span, ErrorCode::SyntaxError, "expected 'jacobian U -> V'");
    auto it = transitions_.find({from.text, c.target->text});
    if (it == transitions_.end())
      fail_at(c.target->span, ErrorCode::ResolveError, "no transition " + from.text + " -> " + c.target->text);
    const TransitionMap& t = it->second;
    return located(c.verb.span, [&] {
      GradedMatrix j = jacobian(t);
      auto check = chain_rule_check(t, int_option(o, "samples", opts_.samples),
                                    static_cast<unsigned>(int_option(o, "seed", 1)));
      return Json{{"matrix", to_json(j)},
                  {"text", format_matrix(j)},
                  {"ber", rho_ber_reordered(j).to_string()},
                  {"chain_rule", to_json(check)}};
    });
  }

  Json cmd_cocycle(const dsl::Command& c) {
    arity(c, 1, 1);
    options(c, {});
    const Name& n = name_arg(c.args[0], "a bundle");
    const BundleSpec& b = find_named(bundles_, n, "bundle");
    Json j = to_json(located(c.verb.span, [&] { return cocycle_check(b); }));
    j["bundle"] = b.name;
    j["rank"] = b.rank();
    j["pi"] = b.pi;
    return j;
  }

  const VolumeForm& volume_of(const dsl::Command& c) {
    if (!c.wrt) fail_at(c.verb.span, ErrorCode::SyntaxError, "expected 'wrt VOLUME'");
    return find_named(volumes_, *c.wrt, "volume");
  }

  Scope chart_scope(const Chart& ch) { return scope_for(ch.ctx, ch.name); }

  Json cmd_divergence(const dsl::Command& c) {
    const VolumeForm& vol = volume_of(c);
    options(c, {});
    const auto& charts = vol.atlas.charts;
    arity(c, 1, charts.size());
    if (charts.size() == 1) {
      Derivation x = evaluate_derivation(c.args[0], chart_scope(charts[0]));
      return Json{{"value", located(c.verb.span, [&] { return divergence(x, vol); }).to_string()}};
    }
    if (c.args.size() != charts.size())
      fail_at(c.verb.span, ErrorCode::SyntaxError, "give one vector field per chart of the volume's atlas");
    std::vector<Derivation> xs;
    for (std::size_t k = 0; k < charts.size(); ++k) xs.push_back(evaluate_derivation(c.args[k], chart_scope(charts[k])));
    auto divs = located(c.verb.span, [&] { return divergence(xs, vol); });
    Json values = Json::object();
    for (std::size_t k = 0; k < charts.size(); ++k) values[charts[k].name] = divs[k].to_string();
    return Json{{"values", values}};
  }

  Json cmd_modular(const dsl::Command& c) {
    arity(c, 1, 1);
    auto o = options(c, {"bound"});
    const VolumeForm& vol = volume_of(c);
    if (vol.atlas.charts.size() != 1)
      fail_at(c.wrt->span, ErrorCode::ShapeMismatch, "modular needs a single-chart volume form");
    Derivation q = evaluate_derivation(c.args[0], chart_scope(vol.atlas.charts[0]));
    int bound = int_option(o, "bound", opts_.degree_bound);
    return to_json(located(c.verb.span, [&] { return modular_class(q, vol, bound); }));
  }

  Json cmd_equivalent(const dsl::Command& c) {
    arity(c, 2, 2);
    options(c, {});
    const VolumeForm& a = find_named(volumes_, name_arg(c.args[0], "a volume"), "volume");
    const VolumeForm& b = find_named(volumes_, name_arg(c.args[1], "a volume"), "volume");
    EquivalenceResult r = located(c.verb.span, [&] { return volumes_equivalent(a, b); });
    Json h = Json::object();
    for (std::size_t k = 0; k < r.h.size(); ++k) h[a.atlas.charts[k].name] = r.h[k].to_string();
    Json j{{"equivalent", r.equivalent}, {"h", h}};
    if (!r.reason.empty()) j["reason"] = r.reason;
    return j;
  }

  Json cmd_scenarios(const dsl::Command& c) {
    arity(c, 0, 1);
    std::string which = "all";
    if (!c.args.empty()) which = name_arg(c.args[0], "a scenario").text;
    auto o = options(c, {"bound", "m", "i", "theta*"});
    int bound = int_option(o, "bound", opts_.degree_bound);
    std::vector<ScenarioResult> results;
    auto reject = [&](std::initializer_list<const char*> keys) {
      for (const auto& [k, v] : c.options)
        for (const char* bad : keys)
          if (k.text.rfind(bad, 0) == 0)
            fail_at(k.span, ErrorCode::ResolveError, "option '" + k.text + "' does not apply to " + which);
    };
    located(c.verb.span, [&] {
      if (which == "torus") {
        reject({"i"});
        results.push_back(torus_scenario(theta_option(c, o), bound));
      } else if (which == "derham") {
        reject({"i", "m", "theta"});
        results.push_back(de_rham_scenario(bound));
      } else if (which == "cstar") {
        reject({"i", "m", "theta"});
        results.push_back(cstar_scenario(bound));
      } else if (which == "lift") {
        reject({"m", "theta"});
        if (o.count("i")) {
          results.push_back(cotangent_lift_scenario(integer_of(*o.at("i")), bound));
        } else {
          results.push_back(cotangent_lift_scenario(2, bound));
          results.push_back(cotangent_lift_scenario(1, bound));
        }
      } else if (which == "all") {
        reject({"i", "m", "theta"});
        results = builtin_scenarios(bound);
      } else {
        fail_at(c.args[0].span, ErrorCode::ResolveError, "unknown scenario '" + which + "'");
      }
      return 0;
    });
    Json arr = Json::array();
    for (const auto& r : results) arr.push_back(to_json(r));
    return Json{{"scenarios", arr}};
  }

  // m=M with thetaAB=q (1 <= A < B <= M); the default is m=2, theta12=1/4.
  std::vector<std::vector<Rational>> theta_option(const dsl::Command& c, const std::map<std::string, const Expr*>& o) {
    int m = int_option(o, "m", 2);
    if (m < 1 || m > 9) fail_at(o.count("m") ? o.at("m")->span : c.verb.span, ErrorCode::ConstraintViolation, "m must be in 1..9");
    std::vector<std::vector<Rational>> th(m, std::vector<Rational>(m, Rational(0)));
    bool any = false;
    for (const auto& [k, v] : c.options) {
      if (k.text.rfind("theta", 0) != 0) continue;
      any = true;
      std::string ab = k.text.substr(5);
      if (ab.size() != 2 || ab[0] < '1' || ab[1] < '1' || ab[0] - '0' > m || ab[1] - '0' > m || ab[0] >= ab[1])
        fail_at(k.span, ErrorCode::ResolveError, "expected thetaAB with 1 <= A < B <= m");
      int a = ab[0] - '1', b = ab[1] - '1';
      th[a][b] = constant_of(v);
      th[b][a] = -th[a][b];
    }
    if (!any && m == 2) {
      th[0][1] = Rational(1, 4);
      th[1][0] = Rational(-1, 4);
    }
    return th;
  }

  RunOptions opts_;
  std::optional<GroupSpec> group_;
  std::optional<CommutationFactor> factor_;
  std::map<std::string, Chart> charts_;
  std::string current_;
  std::map<std::pair<std::string, std::string>, TransitionMap> transitions_;
  std::map<std::string, Atlas> atlases_;
  std::map<std::string, BundleSpec> bundles_;
  std::map<std::string, Value> values_;
  std::map<std::string, GradedMatrix> matrices_;
  std::map<std::string, VolumeForm> volumes_;
  std::map<std::string, DeRham> derhams_;
  std::map<std::string, ShiftedCotangent> tstars_;
  std::map<std::string, std::map<std::string, Value>> extras_;
};

}  // namespace

SessionOutcome run_session(const dsl::Session& session, const RunOptions& opts) { return Runner(opts).run(session); }

SessionOutcome run_text(std::string_view text, const RunOptions& opts) {
  try {
    return run_session(dsl::parse_session(text), opts);
  } catch (const Error& e) {
    SessionOutcome out;
    out.trunc = opts.trunc;
    out.aborted = true;
    Report r;
    r.verb = "parse";
    r.ok = false;
    r.error = Runner::error_json(e, Span{1, 1, 1});
    out.reports.push_back(std::move(r));
    return out;
  }
}

Json to_json(const SessionOutcome& out) {
  Json reports = Json::array();
  for (const auto& r : out.reports) {
    Json j{{"command", r.command}, {"line", r.span.line}, {"ok", r.ok}};
    if (r.ok) {
      j["result"] = r.result;
      j["diagnostics"] = r.diagnostics;
    } else {
      j["error"] = r.error;
    }
    reports.push_back(j);
  }
  return Json{{"schema", 1},
              {"factor", out.factor ? Json(format_factor(*out.factor)) : Json(nullptr)},
              {"trunc", out.trunc},
              {"ok", out.ok()},
              {"reports", reports}};
}

namespace {

std::string plain(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

std::string to_text(const SessionOutcome& out) {
  std::string s;
  if (out.factor) s += "# factor " + format_factor(*out.factor) + "\n";
  for (const auto& r : out.reports) {
    s += "> " + (r.command.empty() ? r.verb : r.command) + "\n";
    if (!r.ok) {
      s += "  error " + plain(r.error["code"]) + " at " + plain(r.error["line"]) + ":" + plain(r.error["col"]) + ": " +
           plain(r.error["message"]) + "\n";
      continue;
    }
    if (r.verb == "scenarios") {
      for (const auto& sc : r.result["scenarios"]) {
        s += "  " + plain(sc["scenario"]) + ": " + (sc["passed"].get<bool>() ? "passed" : "FAILED") + "\n";
        for (const auto& cl : sc["classes"])
          s += "    [" + plain(cl["label"]) + "] " + plain(cl["representative"]) + " (" + plain(cl["verdict"]) + ")\n";
        for (const auto& ck : sc["checks"])
          s += "    " + plain(ck["name"]) + ": " + (ck["ok"].get<bool>() ? "yes" : "no") + "\n";
      }
      continue;
    }
    if (r.result.is_object() && r.result.size() <= 3 && r.result.contains("value") && !r.result.contains("kind")) {
      s += "  " + plain(r.result["value"]) + "\n";
      continue;
    }
    for (const auto& [k, v] : r.result.items()) s += "  " + k + ": " + plain(v) + "\n";
  }
  return s;
}

Json modular_reports(const SessionOutcome& out) {
  Json arr = Json::array();
  for (const auto& r : out.reports) {
    if (!r.ok) continue;
    if (r.verb == "modular") {
      Json j{{"command", r.command}};
      j.update(r.result);
      arr.push_back(j);
    } else if (r.verb == "scenarios") {
      for (const auto& sc : r.result["scenarios"])
        for (const auto& cl : sc["classes"]) {
          Json j{{"command", r.command}, {"scenario", sc["scenario"]}, {"label", cl["label"]}};
          for (const char* k : {"representative", "closed", "verdict", "certificate", "preimage"})
            if (cl.contains(k)) j[k] = cl[k];
          arr.push_back(j);
        }
    }
  }
  return arr;
}

}  // namespace rhocalc
