#include "rhocalc/derivation.hpp"

#include "rhocalc/errors.hpp"

namespace rhocalc {

Derivation::Derivation(ContextPtr ctx, Degree degree)
    : ctx_(std::move(ctx)), degree_(std::move(degree)), comps_(ctx_->size(), GradedPoly(ctx_)) {}

Derivation Derivation::from_components(ContextPtr ctx, Degree degree, const std::map<std::size_t, GradedPoly>& comps) {
  Derivation out(ctx, degree);
  for (const auto& [a, f] : comps) {
    if (a >= ctx->size()) fail(ErrorCode::ContextMismatch, "derivation component index out of range");
    if (f.is_zero()) continue;
    require_same_context(ctx, f.context(), "derivation component");
    const auto& v = ctx->var(a);
    if (!v.is_coordinate()) fail(ErrorCode::DegreeMismatch, "parameter '" + v.name + "' cannot carry a component");
    Degree d = f.degree();
    Degree want = degree + v.degree;
    if (d != want)
      fail(ErrorCode::DegreeMismatch, "component along " + v.name + " has degree " + d.to_string() + ", expected " +
                                          want.to_string());
    out.comps_[a] = f;
  }
  return out;
}

Derivation Derivation::from_components(ContextPtr ctx, const std::map<std::size_t, GradedPoly>& comps) {
  for (const auto& [a, f] : comps) {
    if (f.is_zero()) continue;
    return from_components(ctx, f.degree() - ctx->var(a).degree, comps);
  }
  return Derivation(ctx, ctx->zero_degree());
}

Derivation Derivation::partial(ContextPtr ctx, std::size_t a) {
  const auto& v = ctx->var(a);
  if (!v.is_coordinate()) fail(ErrorCode::ResolveError, "'" + v.name + "' is a parameter, not a coordinate");
  Derivation out(ctx, -v.degree);
  out.comps_[a] = GradedPoly::constant(ctx, CycloScalar(1L));
  return out;
}

bool Derivation::is_zero() const {
  for (const auto& c : comps_)
    if (!c.is_zero()) return false;
  return true;
}

GradedPoly Derivation::operator()(const GradedPoly& f) const { return apply(*this, f); }

Derivation Derivation::operator-() const {
  Derivation out = *this;
  for (auto& c : out.comps_) c = -c;
  return out;
}

Derivation& Derivation::operator+=(const Derivation& rhs) {
  require_same_context(ctx_, rhs.ctx_, "derivation sum");
  if (rhs.is_zero()) return *this;
  if (is_zero()) {
    degree_ = rhs.degree_;
  } else if (degree_ != rhs.degree_) {
    fail(ErrorCode::NotHomogeneous, "sum of derivations of degrees " + degree_.to_string() + " and " +
                                        rhs.degree_.to_string());
  }
  for (std::size_t a = 0; a < comps_.size(); ++a) comps_[a] += rhs.comps_[a];
  return *this;
}

Derivation& Derivation::operator-=(const Derivation& rhs) { return *this += -rhs; }

Derivation operator*(const CycloScalar& c, const Derivation& x) {
  Derivation out = x;
  for (auto& comp : out.comps_) comp *= c;
  return out;
}

Derivation operator*(const GradedPoly& f, const Derivation& x) {
  require_same_context(f.context(), x.ctx_, "function times derivation");
  Derivation out(x.ctx_, f.degree() + x.degree_);
  for (std::size_t a = 0; a < x.comps_.size(); ++a) out.comps_[a] = f * x.comps_[a];
  return out;
}

bool operator==(const Derivation& a, const Derivation& b) {
  if (a.is_zero() && b.is_zero()) return true;
  if (!same_context(a.ctx_, b.ctx_) || a.degree_ != b.degree_) return false;
  for (std::size_t k = 0; k < a.comps_.size(); ++k)
    if (a.comps_[k] != b.comps_[k]) return false;
  return true;
}

std::string Derivation::to_string() const {
  std::string out;
  for (std::size_t a = 0; a < comps_.size(); ++a) {
    if (comps_[a].is_zero()) continue;
    if (!out.empty()) out += " + ";
    std::string c = comps_[a].to_string();
    std::string d = "d/d" + ctx_->var(a).name;
    if (c == "1") {
      out += d;
    } else {
      out += "(" + c + ") * " + d;
    }
  }
  return out.empty() ? "0" : out;
}

GradedPoly partial_derivative(const GradedPoly& f, std::size_t a) {
  const ContextPtr& ctx = f.context();
  GradedPoly out(ctx);
  if (f.is_zero()) return out;
  const bool self_even = ctx->phase(a, a) == 0;
  for (const auto& [m, c] : f.terms()) {
    if (m[a] == 0) continue;
    // Moving d/dx^a (degree -|x^a|) past the factors x^i, i < a.
    std::int64_t phase = 0;
    for (std::size_t i = 0; i < a; ++i)
      if (m[i] != 0) phase -= static_cast<std::int64_t>(m[i]) * ctx->phase(a, i);
    CycloScalar coeff = c;
    if (self_even) coeff *= CycloScalar(static_cast<long>(m[a]));
    if (phase % ctx->conductor() != 0) coeff *= ctx->root(phase);
    Monomial r = m;
    --r[a];
    out.add_term(r, coeff);
  }
  return out;
}

GradedPoly apply(const Derivation& x, const GradedPoly& f) {
  GradedPoly out(x.context());
  if (f.is_zero()) return out;
  require_same_context(x.context(), f.context(), "apply");
  for (std::size_t a = 0; a < x.components().size(); ++a) {
    const auto& comp = x.component(a);
    if (comp.is_zero()) continue;
    GradedPoly d = partial_derivative(f, a);
    if (!d.is_zero()) out += comp * d;
  }
  return out;
}

Derivation commutator(const Derivation& x, const Derivation& y) {
  require_same_context(x.context(), y.context(), "commutator");
  const ContextPtr& ctx = x.context();
  const CycloScalar r = ctx->rho(x.degree(), y.degree());
  std::map<std::size_t, GradedPoly> comps;
  for (std::size_t c = 0; c < ctx->size(); ++c) {
    if (!ctx->var(c).is_coordinate()) continue;
    comps[c] = apply(x, y.component(c)) - r * apply(y, x.component(c));
  }
  return Derivation::from_components(ctx, x.degree() + y.degree(), comps);
}

TaylorCheck infinitesimal_taylor(const GradedPoly& f, const Derivation& x) {
  const ContextPtr& ctx = x.context();
  require_same_context(ctx, f.context(), "taylor");
  Degree de = -x.degree();
  bool odd = ctx->is_odd(de);
  std::string name = "eps";
  while (ctx->index_of(name)) name += "_";
  ContextPtr ext = ctx->extended_with({{name, de, odd ? VarKind::FormalOdd : VarKind::FormalEven, false, !odd}});
  GradedPoly eps = GradedPoly::variable(ext, ext->size() - 1);
  std::vector<GradedPoly> images;
  for (std::size_t a = 0; a < ctx->size(); ++a) {
    GradedPoly v = GradedPoly::variable(ext, a);
    images.push_back(v + eps * x.component(a).widened(ext));
  }
  TaylorCheck out;
  out.lhs = substitute(f.widened(ext), ext, [&] {
    auto imgs = images;
    imgs.push_back(eps);
    return imgs;
  }());
  out.rhs = f.widened(ext) + eps * apply(x, f).widened(ext);
  out.holds = out.lhs == out.rhs;
  return out;
}

const char* to_string(HomologicalReport::Reason r) {
  switch (r) {
    case HomologicalReport::Reason::Ok: return "ok";
    case HomologicalReport::Reason::Parity: return "parity";
    case HomologicalReport::Reason::Residual: return "residual";
  }
  return "?";
}

HomologicalReport is_homological(const Derivation& q) {
  HomologicalReport rep;
  const ContextPtr& ctx = q.context();
  rep.residual = GradedPoly(ctx);
  if (!ctx->is_odd(q.degree())) {
    rep.reason = HomologicalReport::Reason::Parity;
    return rep;
  }
  // A derivation is determined by its values on generators, and Q^2 is one
  // when rho(|Q|,|Q|) = -1.
  for (std::size_t a = 0; a < ctx->size(); ++a) {
    if (!ctx->var(a).is_coordinate()) continue;
    GradedPoly r = apply(q, q.component(a));
    if (!r.is_zero()) {
      rep.reason = HomologicalReport::Reason::Residual;
      rep.witness = a;
      rep.residual = r;
      return rep;
    }
  }
  rep.homological = true;
  return rep;
}

void LieStructure::validate() const {
  const std::size_t m = dim();
  if (gamma.size() != m) fail(ErrorCode::ShapeMismatch, "structure constants must be m x m x m");
  for (const auto& row : gamma) {
    if (row.size() != m) fail(ErrorCode::ShapeMismatch, "structure constants must be m x m x m");
    for (const auto& col : row)
      if (col.size() != m) fail(ErrorCode::ShapeMismatch, "structure constants must be m x m x m");
  }
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = 0; c < m; ++c) {
        if (gamma[a][b][c].is_zero()) continue;
        if (degrees[a] + degrees[b] + bracket_degree != degrees[c])
          fail(ErrorCode::DegreeMismatch, "gamma_" + std::to_string(a + 1) + std::to_string(b + 1) + "^" +
                                              std::to_string(c + 1) + " is nonzero but |e_a|+|e_b|+d != |e_c|");
      }
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = 0; c < m; ++c)
        if (gamma[a][b][c] != -factor.eval(degrees[a], degrees[b]) * gamma[b][a][c])
          fail(ErrorCode::ConstraintViolation, "structure constants are not rho-antisymmetric at (" +
                                                   std::to_string(a + 1) + "," + std::to_string(b + 1) + ")");
}

Derivation ce_differential(const LieStructure& lie, const std::vector<std::string>& names) {
  lie.validate();
  const std::size_t m = lie.dim();
  CommutationFactor fp = lie.factor.extend_prime();
  std::vector<Variable> vars;
  for (std::size_t a = 0; a < m; ++a) {
    Degree d = (-lie.degrees[a]).prepended(1);
    std::string name = a < names.size() ? names[a] : "xi" + std::to_string(a + 1);
    vars.push_back({name, d, fp.is_odd(d) ? VarKind::FormalOdd : VarKind::FormalEven, false, false});
  }
  ContextPtr ctx = Context::make(fp, vars);
  std::map<std::size_t, GradedPoly> comps;
  // Q(xi^c) = 1/2 sum rho(|e_b|,|e_a|) gamma_ab^c xi^a xi^b, written in the
  // reversed order where each summand is symmetric under a <-> b.
  const CycloScalar half(Rational(-1, 2));
  for (std::size_t c = 0; c < m; ++c) {
    GradedPoly comp(ctx);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        if (lie.gamma[a][b][c].is_zero()) continue;
        comp += (half * lie.gamma[a][b][c]) * (GradedPoly::variable(ctx, b) * GradedPoly::variable(ctx, a));
      }
    comps[c] = comp;
  }
  return Derivation::from_components(ctx, lie.bracket_degree.prepended(1), comps);
}

}  // namespace rhocalc
