#include "rhocalc/geometry.hpp"

#include <random>

#include "rhocalc/errors.hpp"
#include "rhocalc/sample.hpp"

namespace rhocalc {

namespace {

GradedMatrix regraded(const GradedMatrix& m, const DegreeTuple& rows, const DegreeTuple& cols) {
  std::vector<GradedPoly> entries;
  for (std::size_t k = 0; k < m.nrows(); ++k)
    for (std::size_t l = 0; l < m.ncols(); ++l) entries.push_back(m.at(k, l));
  return GradedMatrix::make(m.context(), rows, cols, m.degree(), std::move(entries));
}

/// Copies every term of f into ctx, whose variables start with f's variables
/// (possibly regraded), padding exponents with zeros.
GradedPoly embed(const GradedPoly& f, const ContextPtr& ctx) {
  GradedPoly out(ctx);
  for (const auto& [m, c] : f.terms()) {
    Monomial w = m;
    w.resize(ctx->size(), 0);
    out.add_term(w, c);
  }
  return out;
}

std::vector<GradedPoly> generators(const ContextPtr& ctx) {
  std::vector<GradedPoly> out;
  for (std::size_t k = 0; k < ctx->size(); ++k) out.push_back(GradedPoly::variable(ctx, k));
  return out;
}

std::vector<GradedPoly> probes(const ContextPtr& ctx, int samples, unsigned seed) {
  std::vector<GradedPoly> out = generators(ctx);
  std::mt19937 rng(seed);
  for (int s = 0; s < samples; ++s) out.push_back(random_poly(ctx, rng, 3, 2));
  return out;
}

}  // namespace

DegreeTuple Chart::tuple() const {
  DegreeTuple t;
  for (std::size_t k : coordinates()) t.degs.push_back(ctx->var(k).degree);
  return t;
}

std::size_t Chart::base_count() const {
  std::size_t n = 0;
  for (const auto& v : ctx->vars()) n += v.kind == VarKind::Base;
  return n;
}

std::size_t Chart::formal_count() const {
  std::size_t n = 0;
  for (const auto& v : ctx->vars()) n += v.is_formal();
  return n;
}

TransitionMap TransitionMap::make(Chart source, Chart target, std::map<std::string, GradedPoly> images) {
  if (!(source.ctx->factor() == target.ctx->factor()))
    fail(ErrorCode::ContextMismatch, "transition " + source.name + "->" + target.name + ": different factors");
  if (!(source.tuple() == target.tuple()))
    fail(ErrorCode::GradingViolation, "transition " + source.name + "->" + target.name + ": coordinate degrees " +
                                          source.tuple().to_string() + " and " + target.tuple().to_string() +
                                          " differ");
  for (const auto& [name, f] : images)
    if (!target.ctx->index_of(name))
      fail(ErrorCode::ResolveError, "transition " + source.name + "->" + target.name + ": unknown target variable " +
                                        name);
  TransitionMap t;
  for (std::size_t k = 0; k < target.ctx->size(); ++k) {
    const Variable& v = target.ctx->var(k);
    auto it = images.find(v.name);
    GradedPoly img;
    if (it != images.end()) {
      img = it->second;
      require_same_context(img.context(), source.ctx, "transition image");
    } else if (v.kind == VarKind::Parameter && source.ctx->index_of(v.name)) {
      img = GradedPoly::variable(source.ctx, v.name);
    } else {
      fail(ErrorCode::ResolveError, "transition " + source.name + "->" + target.name + ": no image for " + v.name);
    }
    if (!img.is_zero() && (!img.is_homogeneous() || !(img.degree() == v.degree)))
      fail(ErrorCode::GradingViolation, "transition image of " + v.name + " must have degree " +
                                            v.degree.to_string() + ": " + img.to_string());
    t.images_.push_back(std::move(img));
  }
  t.source_ = std::move(source);
  t.target_ = std::move(target);
  if (!is_invertible(jacobian(t)))
    fail(ErrorCode::NotInvertible, "transition " + t.source_.name + "->" + t.target_.name +
                                       ": Jacobian is not invertible");
  return t;
}

TransitionMap TransitionMap::identity(const Chart& c) {
  TransitionMap t;
  t.source_ = c;
  t.target_ = c;
  t.images_ = generators(c.ctx);
  return t;
}

GradedPoly TransitionMap::pull(const GradedPoly& f) const {
  require_same_context(f.context(), target_.ctx, "pull");
  return substitute(f, source_.ctx, images_);
}

GradedMatrix TransitionMap::pull(const GradedMatrix& m) const {
  std::vector<GradedPoly> entries;
  for (std::size_t k = 0; k < m.nrows(); ++k)
    for (std::size_t l = 0; l < m.ncols(); ++l) entries.push_back(pull(m.at(k, l)));
  return GradedMatrix::make(source_.ctx, m.rows(), m.cols(), m.degree(), std::move(entries));
}

std::vector<GradedPoly> TransitionMap::pull_components(const Derivation& x) const {
  std::vector<GradedPoly> out;
  for (const auto& c : x.components()) out.push_back(pull(c));
  return out;
}

TransitionMap compose(const TransitionMap& t, const TransitionMap& s) {
  if (!same_context(s.target().ctx, t.source().ctx))
    fail(ErrorCode::ContextMismatch, "compose: " + s.target().name + " is not " + t.source().name);
  std::map<std::string, GradedPoly> images;
  for (std::size_t k = 0; k < t.target().ctx->size(); ++k)
    images.emplace(t.target().ctx->var(k).name, s.pull(t.image(k)));
  return TransitionMap::make(s.source(), t.target(), std::move(images));
}

GradedMatrix jacobian(const TransitionMap& t) {
  const ContextPtr& ctx = t.source().ctx;
  const auto xs = t.source().coordinates();
  const auto ys = t.target().coordinates();
  std::vector<GradedPoly> entries;
  for (std::size_t a : ys) {
    const Degree& ya = t.target().ctx->var(a).degree;
    for (std::size_t b : xs) {
      const Degree& xb = ctx->var(b).degree;
      entries.push_back(partial_derivative(t.image(a), b) * ctx->rho(xb, ya - xb));
    }
  }
  DegreeTuple tup = t.source().tuple();
  return GradedMatrix::make(ctx, tup, tup, ctx->zero_degree(), std::move(entries));
}

void CheckReport::record(bool ok, const std::string& what) {
  ++checked;
  if (ok) return;
  holds = false;
  if (failures.size() < 16) failures.push_back(what);
}

CheckReport chain_rule_check(const TransitionMap& t, int samples, unsigned seed) {
  CheckReport rep;
  const auto xs = t.source().coordinates();
  const auto ys = t.target().coordinates();
  for (const GradedPoly& f : probes(t.target().ctx, samples, seed)) {
    GradedPoly pulled = t.pull(f);
    for (std::size_t b : xs) {
      GradedPoly lhs = partial_derivative(pulled, b);
      GradedPoly rhs(t.source().ctx);
      for (std::size_t a : ys) rhs += partial_derivative(t.image(a), b) * t.pull(partial_derivative(f, a));
      rep.record(lhs == rhs, "d/d" + t.source().ctx->var(b).name + " of " + f.to_string());
    }
  }
  return rep;
}

Derivation push_forward(const Derivation& x, const TransitionMap& t, const TransitionMap& back) {
  require_same_context(x.context(), t.source().ctx, "push_forward");
  std::map<std::size_t, GradedPoly> comps;
  for (std::size_t k : t.target().coordinates()) comps.emplace(k, back.pull(apply(x, t.image(k))));
  return Derivation::from_components(t.target().ctx, x.degree(), comps);
}

bool fields_agree(const Derivation& xu, const Derivation& xv, const TransitionMap& t) {
  for (std::size_t k : t.target().coordinates())
    if (!(apply(xu, t.image(k)) == t.pull(xv.component(k)))) return false;
  return true;
}

Atlas Atlas::single(Chart c) {
  Atlas a;
  a.charts.push_back(std::move(c));
  return a;
}

std::size_t Atlas::index_of(const std::string& name) const {
  for (std::size_t k = 0; k < charts.size(); ++k)
    if (charts[k].name == name) return k;
  fail(ErrorCode::ResolveError, "unknown chart " + name);
}

std::optional<TransitionMap> Atlas::find(std::size_t from, std::size_t to) const {
  if (from == to) return TransitionMap::identity(charts.at(from));
  auto it = maps.find({from, to});
  if (it == maps.end()) return std::nullopt;
  return it->second;
}

void Atlas::add(TransitionMap t) {
  std::size_t a = index_of(t.source().name), b = index_of(t.target().name);
  maps.insert_or_assign({a, b}, std::move(t));
}

std::vector<Degree> BundleSpec::effective_fiber() const {
  std::vector<Degree> out;
  for (const auto& d : fiber.degs) out.push_back(d.prepended(pi ? 1 : 0));
  return out;
}

bool operator==(const BundleSpec& a, const BundleSpec& b) {
  if (a.name != b.name || !(a.fiber == b.fiber) || a.pi != b.pi || a.g.size() != b.g.size()) return false;
  if (a.atlas.charts.size() != b.atlas.charts.size()) return false;
  for (std::size_t k = 0; k < a.atlas.charts.size(); ++k)
    if (a.atlas.charts[k].name != b.atlas.charts[k].name ||
        !same_context(a.atlas.charts[k].ctx, b.atlas.charts[k].ctx))
      return false;
  for (const auto& [key, m] : a.g) {
    auto it = b.g.find(key);
    if (it == b.g.end() || !(it->second == m) || !(it->second.rows() == m.rows())) return false;
  }
  return true;
}

BundleSpec tangent(const Atlas& atlas) {
  if (atlas.charts.empty()) fail(ErrorCode::ShapeMismatch, "tangent: empty atlas");
  BundleSpec b;
  b.name = "T";
  b.atlas = atlas;
  b.fiber = atlas.charts.front().tuple();
  for (const auto& [key, t] : atlas.maps) b.g.emplace(key, jacobian(t));
  return b;
}

BundleSpec cotangent(const Atlas& atlas) {
  if (atlas.charts.empty()) fail(ErrorCode::ShapeMismatch, "cotangent: empty atlas");
  BundleSpec b;
  b.name = "T*";
  b.atlas = atlas;
  b.fiber = atlas.charts.front().tuple().negated();
  for (const auto& [key, t] : atlas.maps) {
    // inverse(J'(t_ab)) = t_ab^*(J'(t_ba)) by the chain rule when t_ba exists.
    auto back = atlas.find(key.second, key.first);
    GradedMatrix inv = back ? t.pull(jacobian(*back)) : inverse(jacobian(t));
    b.g.emplace(key, transpose(inv));
  }
  return b;
}

BundleSpec shift_pi(const BundleSpec& b) {
  BundleSpec out = b;
  out.pi = !b.pi;
  return out;
}

BundleSpec shift_degree(const BundleSpec& b, const Degree& i) {
  BundleSpec out = b;
  for (auto& d : out.fiber.degs) d -= i;
  for (auto& [key, m] : out.g) m = regraded(m, out.fiber, out.fiber);
  return out;
}

CheckReport cocycle_check(const BundleSpec& b) {
  CheckReport rep;
  const Atlas& at = b.atlas;
  const std::size_t n = at.charts.size();
  auto g = [&](std::size_t x, std::size_t y) -> std::optional<GradedMatrix> {
    auto it = b.g.find({x, y});
    if (it == b.g.end()) return std::nullopt;
    return it->second;
  };
  auto label = [&](std::initializer_list<std::size_t> ids) {
    std::string s;
    for (std::size_t k : ids) s += (s.empty() ? "" : ",") + at.charts[k].name;
    return s;
  };
  for (std::size_t a = 0; a < n; ++a) {
    const GradedMatrix id = GradedMatrix::identity(at.charts[a].ctx, b.fiber);
    if (auto gaa = g(a, a)) rep.record(*gaa == id, "g_aa != 1 on " + label({a}));
    for (std::size_t c = 0; c < n; ++c) {
      if (c == a) continue;
      auto gac = g(a, c), gca = g(c, a);
      auto tac = at.find(a, c);
      if (gac && gca && tac) rep.record(tac->pull(*gca) * *gac == id, "g_ca g_ac != 1 on " + label({a, c}));
      for (std::size_t bb = 0; bb < n; ++bb) {
        if (bb == a || bb == c) continue;
        auto gab = g(a, bb), gbc = g(bb, c);
        auto tab = at.find(a, bb);
        if (!gab || !gbc || !gca || !tab || !tac) continue;
        GradedMatrix p = tac->pull(*gca) * tab->pull(*gbc) * *gab;
        rep.record(p == id, "g_ca g_bc g_ab != 1 on " + label({a, bb, c}));
      }
    }
  }
  return rep;
}

GradedPoly DeRham::lift(const GradedPoly& f) const {
  require_same_context(f.context(), base, "de Rham lift");
  return embed(f, forms);
}

DeRham de_rham(const Chart& c) { return de_rham(c.ctx); }

DeRham de_rham(const ContextPtr& base) {
  CommutationFactor fp = base->factor().extend_prime();
  std::vector<Variable> vars;
  for (const auto& v : base->vars()) {
    Variable w = v;
    w.degree = v.degree.prepended(0);
    vars.push_back(std::move(w));
  }
  DeRham dr;
  dr.base = base;
  for (std::size_t a : base->coordinates()) {
    const Variable& v = base->var(a);
    Degree deg = v.degree.prepended(1);
    VarKind kind = fp.is_odd(deg) ? VarKind::FormalOdd : VarKind::FormalEven;
    dr.dx.emplace(a, vars.size());
    vars.push_back(Variable{"d" + v.name, deg, kind, false, false});
  }
  dr.forms = Context::make(fp, std::move(vars), base->truncation());
  std::map<std::size_t, GradedPoly> comps;
  for (const auto& [a, da] : dr.dx) comps.emplace(a, GradedPoly::variable(dr.forms, da));
  dr.d = Derivation::from_components(dr.forms, base->zero_degree().prepended(1), comps);
  return dr;
}

Derivation lie_derivative(const DeRham& dr, const Derivation& x) {
  require_same_context(x.context(), dr.base, "lie_derivative");
  std::map<std::size_t, GradedPoly> comps;
  for (const auto& [b, db] : dr.dx) {
    comps.emplace(b, dr.lift(x.component(b)));
    GradedPoly c(dr.forms);
    for (const auto& [a, da] : dr.dx)
      c += GradedPoly::variable(dr.forms, da) * dr.lift(partial_derivative(x.component(b), a));
    comps.emplace(db, c);
  }
  return Derivation::from_components(dr.forms, x.degree().prepended(0), comps);
}

Derivation interior(const DeRham& dr, const Derivation& x) {
  require_same_context(x.context(), dr.base, "interior");
  std::map<std::size_t, GradedPoly> comps;
  for (const auto& [b, db] : dr.dx) comps.emplace(db, dr.lift(x.component(b)));
  return Derivation::from_components(dr.forms, x.degree().prepended(-1), comps);
}

CheckReport cartan_check(const DeRham& dr, const Derivation& x, const Derivation& y, int samples, unsigned seed) {
  CheckReport rep;
  const Derivation& d = dr.d;
  const Derivation lx = lie_derivative(dr, x), ly = lie_derivative(dr, y);
  const Derivation ix = interior(dr, x), iy = interior(dr, y);
  const Derivation lxy = lie_derivative(dr, commutator(x, y));
  const Derivation dd = commutator(d, d), ll = commutator(lx, ly), dl = commutator(d, lx), di = commutator(d, ix),
                   ii = commutator(ix, iy);
  rep.record(dd.is_zero(), "[d,d] != 0");
  rep.record(ll == lxy, "[L_X,L_Y] != L_[X,Y]");
  rep.record(dl.is_zero(), "[d,L_X] != 0");
  rep.record(di == lx, "[d,i_X] != L_X");
  rep.record(ii.is_zero(), "[i_X,i_Y] != 0");
  const auto& fp = dr.forms->factor();
  auto bracket = [&](const Derivation& a, const Derivation& b, const GradedPoly& f) {
    return apply(a, apply(b, f)) - fp.eval(a.degree(), b.degree()) * apply(b, apply(a, f));
  };
  for (const GradedPoly& f : probes(dr.forms, samples, seed)) {
    const std::string on = " on " + f.to_string();
    rep.record(apply(d, apply(d, f)).is_zero(), "d(d f) != 0" + on);
    rep.record(bracket(lx, ly, f) == apply(lxy, f), "[L_X,L_Y] f != L_[X,Y] f" + on);
    rep.record(bracket(d, lx, f).is_zero(), "[d,L_X] f != 0" + on);
    rep.record(bracket(d, ix, f) == apply(lx, f), "[d,i_X] f != L_X f" + on);
    rep.record(bracket(ix, iy, f).is_zero(), "[i_X,i_Y] f != 0" + on);
  }
  return rep;
}

DifferentialSumReport differential_sum_check(const DeRham& dr, const Derivation& q, int samples, unsigned seed) {
  DifferentialSumReport rep;
  const Derivation& d = dr.d;
  const Derivation lq = lie_derivative(dr, q);
  const auto& fp = dr.forms->factor();
  rep.d_squared_zero = commutator(d, d).is_zero();
  rep.lq_squared_zero = commutator(lq, lq).is_zero();
  rep.bracket_d_lq_zero = commutator(d, lq).is_zero();
  auto bracket = [&](const Derivation& a, const Derivation& b, const GradedPoly& f) {
    return apply(a, apply(b, f)) - fp.eval(a.degree(), b.degree()) * apply(b, apply(a, f));
  };
  rep.bilinear_bracket_zero = true;
  rep.composite_square_zero = true;
  rep.composite_is_twice_d_lq = true;
  for (const GradedPoly& f : probes(dr.forms, samples, seed)) {
    GradedPoly bilinear = bracket(d, d, f) + bracket(lq, lq, f) + bracket(d, lq, f) + bracket(lq, d, f);
    if (!bilinear.is_zero()) rep.bilinear_bracket_zero = false;
    GradedPoly step = apply(d, f) + apply(lq, f);
    GradedPoly square = apply(d, step) + apply(lq, step);
    if (!square.is_zero()) rep.composite_square_zero = false;
    if (!(square == CycloScalar(2L) * apply(d, apply(lq, f)))) rep.composite_is_twice_d_lq = false;
  }
  return rep;
}

ShiftedCotangent shifted_cotangent(const ContextPtr& base, const Degree& i) {
  ShiftedCotangent t;
  t.base = base;
  t.i = i;
  std::vector<Variable> extra;
  for (std::size_t a : base->coordinates()) {
    const Variable& v = base->var(a);
    Degree deg = -v.degree - i;
    VarKind kind = base->is_odd(deg) ? VarKind::FormalOdd : VarKind::FormalEven;
    t.star.emplace(a, base->size() + extra.size());
    extra.push_back(Variable{v.name + "_star", deg, kind, false, false});
  }
  t.ctx = base->extended_with(extra);
  return t;
}

GradedPoly schouten(const ShiftedCotangent& t, const GradedPoly& f, const GradedPoly& g) {
  require_same_context(f.context(), t.ctx, "schouten");
  require_same_context(g.context(), t.ctx, "schouten");
  GradedPoly out(t.ctx);
  if (f.is_zero() || g.is_zero()) return out;
  const Degree fd = f.degree();
  for (const auto& [a, sa] : t.star) {
    const Degree& xa = t.ctx->var(a).degree;
    out += t.ctx->rho(fd + xa + t.i, xa + t.i) * (partial_derivative(f, sa) * partial_derivative(g, a));
    out -= t.ctx->rho(xa, fd + t.i) * (partial_derivative(f, a) * partial_derivative(g, sa));
  }
  return out;
}

GradedPoly schouten_coordinate_form(const ShiftedCotangent& t, const GradedPoly& f, const GradedPoly& g) {
  GradedPoly out(t.ctx);
  if (f.is_zero() || g.is_zero()) return out;
  const Degree fd = f.degree();
  const auto zs = t.ctx->coordinates();
  for (std::size_t a : zs) {
    GradedPoly dfa = partial_derivative(f, a);
    if (dfa.is_zero()) continue;
    const Degree& za = t.ctx->var(a).degree;
    GradedPoly za_poly = GradedPoly::variable(t.ctx, a);
    for (std::size_t b : zs) {
      GradedPoly zz = schouten(t, za_poly, GradedPoly::variable(t.ctx, b));
      if (zz.is_zero()) continue;
      out += t.ctx->rho(za, fd - za) * (dfa * zz * partial_derivative(g, b));
    }
  }
  return out;
}

std::vector<PropertyResult> schouten_properties(const ShiftedCotangent& t, const GradedPoly& f, const GradedPoly& g,
                                                const GradedPoly& h) {
  const auto& ctx = t.ctx;
  const Degree fd = f.degree(), gd = g.degree();
  auto br = [&](const GradedPoly& a, const GradedPoly& b) { return schouten(t, a, b); };
  // A bracket lowers I-adic order by at most 2, so terms dropped above T can
  // reappear at order T - 1 in nested brackets and products.
  auto settle = [&](const GradedPoly& a) {
    return ctx->truncation() ? a.truncated(*ctx->truncation() - 2) : a;
  };
  std::vector<PropertyResult> out;

  GradedPoly fg = br(f, g);
  PropertyResult p1{"(i) degree", true, true, ""};
  p1.pass = fg.is_zero() || (fg.is_homogeneous() && fg.degree() == fd + gd + t.i);
  if (!p1.pass) p1.detail = fg.to_string();
  out.push_back(p1);

  GradedPoly gf = br(g, f);
  PropertyResult p2{"(ii) antisymmetry", true, fg == -(ctx->rho(fd + t.i, gd + t.i) * gf), ""};
  if (!p2.pass) p2.detail = fg.to_string() + " vs " + gf.to_string();
  out.push_back(p2);

  GradedPoly lhs3 = settle(br(f, br(g, h)));
  GradedPoly rhs3 = settle(br(fg, h) + ctx->rho(fd + t.i, gd + t.i) * br(g, br(f, h)));
  PropertyResult p3{"(iii) Jacobi", true, lhs3 == rhs3, ""};
  if (!p3.pass) p3.detail = (lhs3 - rhs3).to_string();
  out.push_back(p3);

  GradedPoly lhs4 = settle(br(f, g * h));
  GradedPoly rhs4 = settle(fg * h + ctx->rho(fd + t.i, gd) * (g * br(f, h)));
  PropertyResult p4{"(iv) Leibniz", true, lhs4 == rhs4, ""};
  if (!p4.pass) p4.detail = (lhs4 - rhs4).to_string();
  out.push_back(p4);

  GradedPoly cf = schouten_coordinate_form(t, f, g);
  PropertyResult p5{"coordinate form", true, cf == fg, ""};
  if (!p5.pass) p5.detail = (cf - fg).to_string();
  out.push_back(p5);
  return out;
}

LiftedQ lift_fq(const Derivation& q, const Degree& i) {
  if (!q.is_zero()) {
    HomologicalReport hr = is_homological(q);
    if (!hr.homological)
      fail(ErrorCode::NotHomological, std::string("lift_fq: Q is not homological (") + to_string(hr.reason) + ")");
  }
  LiftedQ out{shifted_cotangent(q.context(), i), {}, {}};
  const ShiftedCotangent& t = out.t;
  out.f_q = GradedPoly(t.ctx);
  for (const auto& [a, sa] : t.star) out.f_q += t.lift(q.component(a)) * GradedPoly::variable(t.ctx, sa);
  std::map<std::size_t, GradedPoly> comps;
  for (std::size_t z : t.ctx->coordinates()) comps.emplace(z, schouten(t, out.f_q, GradedPoly::variable(t.ctx, z)));
  out.q_tilde = Derivation::from_components(t.ctx, q.degree(), comps);
  return out;
}

}  // namespace rhocalc
