#include "rhocalc/poly.hpp"

#include <algorithm>
#include <set>

#include "rhocalc/errors.hpp"

namespace rhocalc {

bool MonomialOrder::operator()(const Monomial& a, const Monomial& b) const {
  long ta = 0, tb = 0;
  for (int e : a) ta += e;
  for (int e : b) tb += e;
  if (ta != tb) return ta < tb;
  return a > b;
}

GradedPoly::GradedPoly(ContextPtr ctx) : ctx_(std::move(ctx)) {}

GradedPoly GradedPoly::constant(ContextPtr ctx, const CycloScalar& c) {
  GradedPoly p(ctx);
  p.add_term(Monomial(ctx->size(), 0), c);
  return p;
}

GradedPoly GradedPoly::variable(ContextPtr ctx, std::size_t index, int power) {
  return normalize_word(ctx, {{index, power}});
}

GradedPoly GradedPoly::variable(ContextPtr ctx, const std::string& name, int power) {
  std::size_t k = ctx->require(name);
  return variable(std::move(ctx), k, power);
}

GradedPoly GradedPoly::monomial(ContextPtr ctx, Monomial exps, const CycloScalar& c) {
  if (exps.size() != ctx->size()) fail(ErrorCode::ContextMismatch, "monomial length does not match context");
  GradedPoly p(ctx);
  for (std::size_t k = 0; k < exps.size(); ++k) {
    const auto& v = ctx->var(k);
    if (exps[k] < 0 && !v.invertible) fail(ErrorCode::NegativePower, "negative power of '" + v.name + "'");
    if (exps[k] > 1 && v.squares_to_zero()) return p;
  }
  p.add_term(exps, c);
  return p;
}

CycloScalar GradedPoly::constant_term() const {
  if (!ctx_) return CycloScalar();
  auto it = terms_.find(Monomial(ctx_->size(), 0));
  return it == terms_.end() ? CycloScalar() : it->second;
}

bool GradedPoly::is_constant() const {
  if (terms_.empty()) return true;
  return terms_.size() == 1 && std::all_of(terms_.begin()->first.begin(), terms_.begin()->first.end(),
                                           [](int e) { return e == 0; });
}

Degree GradedPoly::monomial_degree(const Monomial& m) const {
  Degree d = ctx_->zero_degree();
  for (std::size_t k = 0; k < m.size(); ++k)
    if (m[k] != 0 && !ctx_->var(k).degree.is_zero()) d += ctx_->var(k).degree.scaled(m[k]);
  return d;
}

int GradedPoly::ideal_order(const Monomial& m) const {
  int ord = 0;
  for (std::size_t k = 0; k < m.size(); ++k)
    if (ctx_->var(k).is_formal()) ord += m[k];
  return ord;
}

std::optional<int> GradedPoly::min_ideal_order() const {
  std::optional<int> best;
  for (const auto& [m, c] : terms_) {
    int o = ideal_order(m);
    if (!best || o < *best) best = o;
  }
  return best;
}

bool GradedPoly::is_homogeneous() const { return support_degrees().size() <= 1; }

Degree GradedPoly::degree() const {
  auto ds = support_degrees();
  if (ds.empty()) return ctx_ ? ctx_->zero_degree() : Degree();
  if (ds.size() > 1)
    fail(ErrorCode::NotHomogeneous, "element " + to_string() + " mixes degrees " + ds[0].to_string() + " and " +
                                        ds[1].to_string());
  return ds[0];
}

std::vector<Degree> GradedPoly::support_degrees() const {
  std::set<Degree> out;
  for (const auto& [m, c] : terms_) out.insert(monomial_degree(m));
  return {out.begin(), out.end()};
}

GradedPoly GradedPoly::homogeneous_part(const Degree& d) const {
  GradedPoly out(ctx_);
  for (const auto& [m, c] : terms_)
    if (monomial_degree(m) == d) out.terms_.emplace(m, c);
  return out;
}

GradedPoly GradedPoly::free_part() const {
  GradedPoly out(ctx_);
  for (const auto& [m, c] : terms_)
    if (ideal_order(m) == 0) out.terms_.emplace(m, c);
  return out;
}

GradedPoly GradedPoly::truncated(int t) const {
  GradedPoly out(ctx_);
  for (const auto& [m, c] : terms_)
    if (ideal_order(m) <= t) out.terms_.emplace(m, c);
  return out;
}

GradedPoly GradedPoly::rebased(ContextPtr ctx) const {
  if (ctx->size() != ctx_->size()) fail(ErrorCode::ContextMismatch, "rebase between contexts of different size");
  GradedPoly out(std::move(ctx));
  for (const auto& [m, c] : terms_) out.add_term(m, c);
  return out;
}

GradedPoly GradedPoly::widened(ContextPtr ctx) const {
  if (ctx->size() < ctx_->size()) fail(ErrorCode::ContextMismatch, "widen into a smaller context");
  for (std::size_t k = 0; k < ctx_->size(); ++k)
    if (!(ctx->var(k) == ctx_->var(k)) || !(ctx->factor() == ctx_->factor()))
      fail(ErrorCode::ContextMismatch, "widen target does not extend the source context");
  GradedPoly out(std::move(ctx));
  for (const auto& [m, c] : terms_) {
    Monomial w = m;
    w.resize(out.ctx_->size(), 0);
    out.add_term(w, c);
  }
  return out;
}

void GradedPoly::add_term(const Monomial& m, const CycloScalar& c) {
  if (c.is_zero()) return;
  if (auto t = ctx_->truncation(); t && ideal_order(m) > *t) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (inserted) return;
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

GradedPoly GradedPoly::operator-() const {
  GradedPoly out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

GradedPoly& GradedPoly::operator+=(const GradedPoly& rhs) {
  if (!ctx_) ctx_ = rhs.ctx_;
  if (rhs.terms_.empty()) return *this;
  require_same_context(ctx_, rhs.ctx_, "add");
  for (const auto& [m, c] : rhs.terms_) add_term(m, c);
  return *this;
}

GradedPoly& GradedPoly::operator-=(const GradedPoly& rhs) {
  if (!ctx_) ctx_ = rhs.ctx_;
  if (rhs.terms_.empty()) return *this;
  require_same_context(ctx_, rhs.ctx_, "sub");
  for (const auto& [m, c] : rhs.terms_) add_term(m, -c);
  return *this;
}

GradedPoly& GradedPoly::operator*=(const GradedPoly& rhs) { return *this = *this * rhs; }

GradedPoly& GradedPoly::operator*=(const CycloScalar& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

std::optional<std::pair<Monomial, std::int64_t>> multiply_monomials(const Context& ctx, const Monomial& a,
                                                                    const Monomial& b) {
  const std::size_t n = a.size();
  Monomial out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = a[k] + b[k];
    if (out[k] > 1 && a[k] != 0 && b[k] != 0 && ctx.var(k).squares_to_zero()) return std::nullopt;
  }
  // Moving x_j^{b_j} left past x_i^{a_i} for every i > j.
  std::int64_t phase = 0;
  const std::int64_t N = ctx.conductor();
  if (N > 1) {
    for (std::size_t j = 0; j < n; ++j) {
      if (b[j] == 0) continue;
      for (std::size_t i = j + 1; i < n; ++i) {
        if (a[i] == 0) continue;
        std::int64_t k = ctx.phase(i, j);
        if (k != 0) phase = (phase + static_cast<std::int64_t>(a[i]) * b[j] % N * k) % N;
      }
    }
    if (phase < 0) phase += N;
  }
  return std::make_pair(std::move(out), phase);
}

GradedPoly operator*(const GradedPoly& a, const GradedPoly& b) {
  if (a.is_zero() || b.is_zero()) return GradedPoly(a.ctx_ ? a.ctx_ : b.ctx_);
  require_same_context(a.ctx_, b.ctx_, "mul");
  GradedPoly out(a.ctx_);
  const Context& ctx = *a.ctx_;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      auto prod = multiply_monomials(ctx, ma, mb);
      if (!prod) continue;
      CycloScalar c = ca * cb;
      if (prod->second != 0) c *= ctx.root(prod->second);
      out.add_term(prod->first, c);
    }
  }
  return out;
}

bool operator==(const GradedPoly& a, const GradedPoly& b) {
  if (a.terms_.empty() || b.terms_.empty()) return a.terms_.empty() && b.terms_.empty();
  if (!same_context(a.ctx_, b.ctx_)) return false;
  return a.terms_ == b.terms_;
}

namespace {

std::string monomial_text(const Context& ctx, const Monomial& m) {
  std::string out;
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] == 0) continue;
    if (!out.empty()) out += " * ";
    out += ctx.var(k).name;
    if (m[k] != 1) out += "^" + std::to_string(m[k]);
  }
  return out;
}

}  // namespace

std::string GradedPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    std::string mono = monomial_text(*ctx_, m);
    std::string coef = c.to_string();
    bool negative = false;
    if (c.is_atomic() && coef[0] == '-') {
      negative = true;
      coef = coef.substr(1);
    }
    std::string body;
    if (mono.empty()) {
      body = coef;
    } else if (coef == "1") {
      body = mono;
    } else {
      body = coef + " * " + mono;
    }
    if (first) {
      out += negative ? "-" + body : body;
    } else {
      out += negative ? " - " : " + ";
      out += body;
    }
    first = false;
  }
  return out;
}

GradedPoly normalize_word(const ContextPtr& ctx, const std::vector<WordFactor>& word, const CycloScalar& c) {
  GradedPoly acc = GradedPoly::constant(ctx, c);
  for (const auto& f : word) {
    if (f.var >= ctx->size()) fail(ErrorCode::ContextMismatch, "variable index out of range");
    const auto& v = ctx->var(f.var);
    if (f.power < 0 && !v.invertible) fail(ErrorCode::NegativePower, "negative power of non-invertible '" + v.name + "'");
    if (f.power == 0) continue;
    if (f.power > 1 && v.squares_to_zero()) return GradedPoly(ctx);
    Monomial m(ctx->size(), 0);
    m[f.var] = f.power;
    GradedPoly factor(ctx);
    factor.add_term(m, CycloScalar(1L));
    acc = acc * factor;
  }
  return acc;
}

GradedPoly pow(const GradedPoly& f, int k) {
  if (k < 0) return pow(invert(f), -k);
  GradedPoly result = GradedPoly::constant(f.context(), CycloScalar(1L));
  GradedPoly base = f;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

GradedPoly rho_commutator(const GradedPoly& f, const GradedPoly& g) {
  const Degree df = f.degree();
  const Degree dg = g.degree();
  if (f.is_zero() || g.is_zero()) return GradedPoly(f.context() ? f.context() : g.context());
  return f * g - f.context()->rho(df, dg) * (g * f);
}

namespace {

bool is_nilpotent_series(const GradedPoly& h) {
  const Context& ctx = *h.context();
  for (const auto& [m, c] : h.terms()) {
    bool has = false;
    for (std::size_t k = 0; k < m.size() && !has; ++k) has = m[k] != 0 && ctx.var(k).squares_to_zero();
    if (!has) return false;
  }
  return true;
}

// sum_{k>=1} coeff(k) h^k, for h in I; stops when h^k vanishes.
GradedPoly ideal_series(const GradedPoly& h, const std::function<CycloScalar(int)>& coeff, const char* what) {
  GradedPoly out(h.context());
  if (h.is_zero()) return out;
  if (!h.context()->truncation() && !is_nilpotent_series(h))
    fail(ErrorCode::TruncationRequired,
         std::string(what) + " of " + h.to_string() + " does not terminate; set a truncation order");
  GradedPoly p = h;
  for (int k = 1; !p.is_zero(); ++k) {
    out += p * coeff(k);
    p = p * h;
  }
  return out;
}

void require_degree_zero(const GradedPoly& f, const char* what) {
  Degree d = f.degree();
  if (!d.is_zero()) fail(ErrorCode::NotHomogeneous, std::string(what) + " needs a degree-0 element, got degree " + d.to_string());
}

}  // namespace

GradedPoly invert(const GradedPoly& f) {
  if (f.is_zero()) fail(ErrorCode::NotInvertible, "zero is not invertible");
  require_degree_zero(f, "invert");
  const ContextPtr& ctx = f.context();
  GradedPoly f0 = f.free_part();
  if (f0.size() != 1) fail(ErrorCode::NotInvertible, "I-free part of " + f.to_string() + " is not a unit");
  const auto& [m, c] = *f0.terms().begin();
  Monomial inv_m(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] != 0 && !ctx->var(k).invertible)
      fail(ErrorCode::NotInvertible, "I-free part of " + f.to_string() + " is not a unit");
    inv_m[k] = -m[k];
  }
  GradedPoly f0_inv(ctx);
  f0_inv.add_term(inv_m, c.inverse());
  GradedPoly h = f0_inv * (f - f0);
  // f^{-1} = (1 + h)^{-1} f0^{-1}, with f0 central.
  GradedPoly s = ideal_series(
      h, [](int k) { return CycloScalar(k % 2 ? -1L : 1L); }, "inverse");
  return (GradedPoly::constant(ctx, CycloScalar(1L)) + s) * f0_inv;
}

GradedPoly exp(const GradedPoly& f) {
  const ContextPtr& ctx = f.context();
  if (f.is_zero()) return GradedPoly::constant(ctx, CycloScalar(1L));
  require_degree_zero(f, "exp");
  if (!f.free_part().is_zero())
    fail(ErrorCode::UnsupportedConstantPart, "exp needs an element of I, got " + f.to_string());
  Rational fact = 1;
  GradedPoly s = ideal_series(
      f,
      [&fact](int k) {
        fact *= k;
        return CycloScalar(Rational(1 / fact));
      },
      "exp");
  return GradedPoly::constant(ctx, CycloScalar(1L)) + s;
}

GradedPoly log(const GradedPoly& f) {
  if (f.is_zero()) fail(ErrorCode::UnsupportedConstantPart, "log of 0");
  require_degree_zero(f, "log");
  const ContextPtr& ctx = f.context();
  GradedPoly one = GradedPoly::constant(ctx, CycloScalar(1L));
  if (f.free_part() != one) fail(ErrorCode::UnsupportedConstantPart, "log needs I-free part 1, got " + f.to_string());
  return ideal_series(
      f - one, [](int k) { return CycloScalar(Rational(k % 2 ? 1 : -1, k)); }, "log");
}

GradedPoly substitute(const GradedPoly& f, const ContextPtr& target, const std::vector<GradedPoly>& images) {
  const ContextPtr& src = f.context();
  GradedPoly out(target);
  if (f.is_zero()) return out;
  if (images.size() != src->size()) fail(ErrorCode::ContextMismatch, "substitution needs one image per variable");
  std::map<std::pair<std::size_t, int>, GradedPoly> powers;
  auto power_of = [&](std::size_t k, int e) -> const GradedPoly& {
    auto key = std::make_pair(k, e);
    auto it = powers.find(key);
    if (it == powers.end()) {
      GradedPoly img = images[k].context() ? images[k] : GradedPoly(target);
      require_same_context(img.context(), target, "substitute");
      it = powers.emplace(key, pow(img, e)).first;
    }
    return it->second;
  };
  for (const auto& [m, c] : f.terms()) {
    GradedPoly term = GradedPoly::constant(target, c);
    for (std::size_t k = 0; k < m.size() && !term.is_zero(); ++k)
      if (m[k] != 0) term = term * power_of(k, m[k]);
    out += term;
  }
  return out;
}

GradedPoly map_coefficients(const GradedPoly& f, const std::function<CycloScalar(const CycloScalar&)>& fn) {
  GradedPoly out(f.context());
  for (const auto& [m, c] : f.terms()) out.add_term(m, fn(c));
  return out;
}

}  // namespace rhocalc
