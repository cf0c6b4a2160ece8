#include "rhocalc/volume.hpp"

#include <functional>
#include <map>
#include <sstream>

#include "rhocalc/errors.hpp"

namespace rhocalc {

namespace {

bool is_zero_value(const Rational& q) { return q == 0; }
bool is_zero_value(const CycloScalar& c) { return c.is_zero(); }

/// Reduced row echelon form in place; returns the pivot columns.
template <class T>
std::vector<std::size_t> rref(std::vector<std::vector<T>>& a, std::size_t ncols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < a.size(); ++c) {
    std::size_t p = r;
    while (p < a.size() && is_zero_value(a[p][c])) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[r]);
    T inv = T(1L) / a[r][c];
    for (auto& v : a[r]) v = v * inv;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (k == r || is_zero_value(a[k][c])) continue;
      T f = a[k][c];
      for (std::size_t l = c; l < a[k].size(); ++l) a[k][l] = a[k][l] - f * a[r][l];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::vector<std::vector<Rational>> nullspace(std::vector<std::vector<Rational>> a, std::size_t ncols) {
  auto piv = rref(a, ncols);
  std::vector<bool> is_pivot(ncols, false);
  for (auto p : piv) is_pivot[p] = true;
  std::vector<std::vector<Rational>> out;
  for (std::size_t f = 0; f < ncols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(ncols, Rational(0));
    v[f] = 1;
    for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -a[i][f];
    out.push_back(std::move(v));
  }
  return out;
}

/// Solves A x = b (A given by columns over the row index set). Free
/// variables are set to 0.
template <class T>
std::optional<std::vector<T>> solve(const std::vector<std::vector<T>>& rows_with_rhs, std::size_t nvars) {
  auto a = rows_with_rhs;
  auto piv = rref(a, nvars + 1);
  if (!piv.empty() && piv.back() == nvars) return std::nullopt;
  std::vector<T> x(nvars, T(0L));
  for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = a[i][nvars];
  return x;
}

GradedPoly one(const ContextPtr& ctx) { return GradedPoly::constant(ctx, CycloScalar(1L)); }

GradedPoly checked_inverse(const GradedPoly& s) {
  try {
    return invert(s);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotInvertible || e.code() == ErrorCode::NotHomogeneous)
      fail(ErrorCode::NotInvertibleDensity, "density " + s.to_string() + " is not invertible: " + e.detail());
    throw;
  }
}

}  // namespace

VolumeForm VolumeForm::make(Atlas atlas, std::vector<GradedPoly> s) {
  if (s.size() != atlas.charts.size())
    fail(ErrorCode::ShapeMismatch, "volume form needs one density per chart");
  for (std::size_t k = 0; k < s.size(); ++k) {
    require_same_context(s[k].context(), atlas.charts[k].ctx, "volume density");
    if (s[k].is_zero() || !s[k].is_homogeneous() || !s[k].degree().is_zero())
      fail(ErrorCode::NotInvertibleDensity, "density on " + atlas.charts[k].name + " must be a degree-0 unit: " +
                                                s[k].to_string());
    checked_inverse(s[k]);
  }
  for (const auto& [key, t] : atlas.maps) {
    GradedPoly expect = rho_ber_reordered(jacobian(t)) * t.pull(s[key.second]);
    if (!(expect == s[key.first]))
      fail(ErrorCode::OverlapMismatch, "densities on " + atlas.charts[key.first].name + " and " +
                                           atlas.charts[key.second].name + " do not transform by rhoBer: " +
                                           s[key.first].to_string() + " vs " + expect.to_string());
  }
  return VolumeForm{std::move(atlas), std::move(s)};
}

VolumeForm VolumeForm::single(Chart c, GradedPoly s) { return make(Atlas::single(std::move(c)), {std::move(s)}); }

VolumeForm VolumeForm::times_exp(const std::vector<GradedPoly>& h) const {
  if (h.size() != s.size()) fail(ErrorCode::ShapeMismatch, "times_exp needs one function per chart");
  std::vector<GradedPoly> out;
  for (std::size_t k = 0; k < s.size(); ++k) out.push_back(s[k] * exp(h[k]));
  return make(atlas, std::move(out));
}

GradedPoly lie_derivative_volume(const Derivation& x, const GradedPoly& s) {
  require_same_context(x.context(), s.context(), "lie_derivative_volume");
  const ContextPtr& ctx = x.context();
  GradedPoly out(ctx);
  for (std::size_t a : ctx->coordinates()) {
    const Degree& xa = ctx->var(a).degree;
    out += ctx->rho(xa, xa + x.degree()) * partial_derivative(x.component(a) * s, a);
  }
  return out;
}

GradedPoly divergence(const Derivation& x, const GradedPoly& s) {
  return checked_inverse(s) * lie_derivative_volume(x, s);
}

GradedPoly divergence(const Derivation& x, const VolumeForm& vol) {
  if (vol.atlas.charts.size() != 1)
    fail(ErrorCode::ShapeMismatch, "divergence: give one field per chart for a multi-chart volume form");
  return divergence(x, vol.s.front());
}

std::vector<GradedPoly> divergence(const std::vector<Derivation>& xs, const VolumeForm& vol) {
  const auto& charts = vol.atlas.charts;
  if (xs.size() != charts.size()) fail(ErrorCode::ShapeMismatch, "divergence: one field per chart");
  for (const auto& [key, t] : vol.atlas.maps)
    if (!fields_agree(xs[key.first], xs[key.second], t))
      fail(ErrorCode::OverlapMismatch, "vector fields on " + charts[key.first].name + " and " +
                                           charts[key.second].name + " disagree");
  std::vector<GradedPoly> out;
  for (std::size_t k = 0; k < xs.size(); ++k) out.push_back(divergence(xs[k], vol.s[k]));
  for (const auto& [key, t] : vol.atlas.maps)
    if (!(t.pull(out[key.second]) == out[key.first]))
      fail(ErrorCode::OverlapMismatch, "divergence on " + charts[key.first].name + " and " +
                                           charts[key.second].name + " disagree: " + out[key.first].to_string() +
                                           " vs " + t.pull(out[key.second]).to_string());
  return out;
}

std::vector<PropertyResult> divergence_properties(const Derivation& x, const Derivation& y, const GradedPoly& f,
                                                  const GradedPoly& g, const GradedPoly& s) {
  const ContextPtr& ctx = x.context();
  std::vector<PropertyResult> out;
  GradedPoly dx = divergence(x, s);

  PropertyResult p1{"(i) Div(fX)", true, true, ""};
  if (f.is_zero()) {
    p1.applicable = false;
  } else {
    GradedPoly lhs = divergence(f * x, s);
    GradedPoly rhs = f * dx + ctx->rho(f.degree(), x.degree()) * apply(x, f);
    p1.pass = lhs == rhs;
    if (!p1.pass) p1.detail = (lhs - rhs).to_string();
  }
  out.push_back(p1);

  PropertyResult p2{"(ii) Div_{vol exp g}", true, true, ""};
  GradedPoly lhs2 = divergence(x, s * exp(g));
  GradedPoly rhs2 = dx + apply(x, g);
  p2.pass = lhs2 == rhs2;
  if (!p2.pass) p2.detail = (lhs2 - rhs2).to_string();
  out.push_back(p2);

  PropertyResult p3{"(iii) Div [X,Y]", true, true, ""};
  GradedPoly lhs3 = divergence(commutator(x, y), s);
  GradedPoly rhs3 = apply(x, divergence(y, s)) - ctx->rho(x.degree(), y.degree()) * apply(y, dx);
  p3.pass = lhs3 == rhs3;
  if (!p3.pass) p3.detail = (lhs3 - rhs3).to_string();
  out.push_back(p3);
  return out;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Exact:
      return "exact";
    case Verdict::NotExactDegreeComplete:
      return "not_exact_degree_complete";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

namespace {

using Weights = std::vector<Rational>;

struct WeightLattice {
  // Each basis vector has one entry per variable followed by the shift delta.
  std::vector<std::vector<Rational>> basis;
  std::size_t nvars = 0;

  Weights of(const Monomial& m) const {
    Weights w;
    for (const auto& v : basis) {
      Rational s = 0;
      for (std::size_t k = 0; k < nvars; ++k) s += v[k] * m[k];
      w.push_back(s);
    }
    return w;
  }
};

WeightLattice weight_lattice(const Derivation& q) {
  const ContextPtr& ctx = q.context();
  const std::size_t n = ctx->size();
  std::vector<std::vector<Rational>> rows;
  for (std::size_t a : ctx->coordinates())
    for (const auto& [m, c] : q.component(a).terms()) {
      std::vector<Rational> r(n + 1, Rational(0));
      for (std::size_t k = 0; k < n; ++k) r[k] = m[k];
      r[a] -= 1;
      r[n] = -1;
      rows.push_back(std::move(r));
    }
  return WeightLattice{nullspace(std::move(rows), n + 1), n};
}

struct Candidates {
  std::vector<Monomial> monomials;
  bool complete = false;
};

bool exponent_allowed(const Variable& v, int e) {
  if (v.squares_to_zero()) return e == 0 || e == 1;
  return v.invertible || e >= 0;
}

bool monomial_allowed(const ContextPtr& ctx, const Monomial& m, const Degree& deg) {
  GradedPoly probe(ctx);
  probe.add_term(m, CycloScalar(1L));
  return !probe.is_zero() && probe.monomial_degree(m) == deg;
}

Candidates candidates(const ContextPtr& ctx, const WeightLattice& lat, const Weights& target, const Degree& deg,
                      int bound) {
  const std::size_t n = ctx->size();
  std::vector<std::size_t> sq, rest;
  for (std::size_t k = 0; k < n; ++k) (ctx->var(k).squares_to_zero() ? sq : rest).push_back(k);
  const std::size_t nw = lat.basis.size();
  Candidates out;

  // Rank of the weight matrix restricted to the remaining variables.
  std::vector<std::vector<Rational>> wr(nw, std::vector<Rational>(rest.size()));
  for (std::size_t j = 0; j < nw; ++j)
    for (std::size_t r = 0; r < rest.size(); ++r) wr[j][r] = lat.basis[j][rest[r]];
  auto wr_copy = wr;
  const bool full_rank = rref(wr_copy, rest.size()).size() == rest.size();

  if (full_rank && sq.size() <= 20) {
    out.complete = true;
    for (std::size_t pattern = 0; pattern < (std::size_t(1) << sq.size()); ++pattern) {
      Monomial m(n, 0);
      for (std::size_t b = 0; b < sq.size(); ++b) m[sq[b]] = (pattern >> b) & 1;
      std::vector<std::vector<Rational>> sys(nw, std::vector<Rational>(rest.size() + 1));
      for (std::size_t j = 0; j < nw; ++j) {
        Rational rhs = target[j];
        for (std::size_t b : sq) rhs -= lat.basis[j][b] * m[b];
        for (std::size_t r = 0; r < rest.size(); ++r) sys[j][r] = wr[j][r];
        sys[j][rest.size()] = rhs;
      }
      auto sol = solve(sys, rest.size());
      if (!sol) continue;
      bool ok = true;
      for (std::size_t r = 0; r < rest.size() && ok; ++r) {
        Rational e = (*sol)[r];
        e.canonicalize();
        if (e.get_den() != 1 || !e.get_num().fits_sint_p()) {
          ok = false;
          break;
        }
        m[rest[r]] = static_cast<int>(e.get_num().get_si());
        ok = exponent_allowed(ctx->var(rest[r]), m[rest[r]]);
      }
      if (ok && monomial_allowed(ctx, m, deg)) out.monomials.push_back(m);
    }
    return out;
  }

  Monomial m(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t k, int budget) {
    if (k == n) {
      if (lat.of(m) == target && monomial_allowed(ctx, m, deg)) out.monomials.push_back(m);
      return;
    }
    const Variable& v = ctx->var(k);
    int lo = v.invertible ? -budget : 0;
    int hi = v.squares_to_zero() ? std::min(1, budget) : budget;
    for (int e = lo; e <= hi; ++e) {
      m[k] = e;
      rec(k + 1, budget - std::abs(e));
    }
    m[k] = 0;
  };
  rec(0, bound);
  return out;
}

}  // namespace

ExactnessResult exactness_solve(const GradedPoly& c, const Derivation& q, int degree_bound) {
  require_same_context(c.context(), q.context(), "exactness_solve");
  const ContextPtr& ctx = q.context();
  GradedPoly qc = apply(q, c);
  if (!qc.is_zero()) fail(ErrorCode::NotClosed, "Q(c) = " + qc.to_string() + " is not zero");
  ExactnessResult res;
  if (c.is_zero()) {
    res.verdict = Verdict::Exact;
    res.preimage = GradedPoly(ctx);
    res.certificate = "c = 0 = Q(0)";
    return res;
  }
  const WeightLattice lat = weight_lattice(q);
  const Degree qdeg = q.degree();

  // Parts of c that are homogeneous for the G-degree and every weight.
  std::map<std::pair<Degree, Weights>, GradedPoly> parts;
  for (const auto& [m, coef] : c.terms()) {
    auto key = std::make_pair(c.monomial_degree(m), lat.of(m));
    auto it = parts.try_emplace(key, GradedPoly(ctx)).first;
    it->second.add_term(m, coef);
  }

  GradedPoly h(ctx);
  bool any_complete_failure = false, any_inconclusive = false;
  std::size_t complete_parts = 0;
  for (const auto& [key, part] : parts) {
    Weights target = key.second;
    for (std::size_t j = 0; j < target.size(); ++j) target[j] -= lat.basis[j][lat.nvars];
    Candidates cand = candidates(ctx, lat, target, key.first - qdeg, degree_bound);
    res.candidates += cand.monomials.size();
    complete_parts += cand.complete;

    // Columns Q(m) for each candidate; rows indexed by monomials.
    std::vector<GradedPoly> images;
    std::map<Monomial, std::size_t, MonomialOrder> row_of;
    for (const auto& m : cand.monomials) {
      images.push_back(apply(q, GradedPoly::monomial(ctx, m)));
      for (const auto& [mm, cc] : images.back().terms()) row_of.try_emplace(mm, row_of.size());
    }
    bool solvable = true;
    for (const auto& [mm, cc] : part.terms())
      if (!row_of.count(mm)) solvable = false;
    std::optional<std::vector<CycloScalar>> x;
    if (solvable) {
      const std::size_t nv = images.size();
      std::vector<std::vector<CycloScalar>> sys(row_of.size(), std::vector<CycloScalar>(nv + 1));
      for (std::size_t v = 0; v < nv; ++v)
        for (const auto& [mm, cc] : images[v].terms()) sys[row_of.at(mm)][v] = cc;
      for (const auto& [mm, cc] : part.terms()) sys[row_of.at(mm)][nv] = cc;
      x = solve(sys, nv);
    }
    if (x) {
      for (std::size_t v = 0; v < x->size(); ++v) h.add_term(cand.monomials[v], (*x)[v]);
    } else if (cand.complete) {
      any_complete_failure = true;
    } else {
      any_inconclusive = true;
    }
  }

  std::ostringstream cert;
  cert << "weights " << lat.basis.size() << ", parts " << parts.size() << " (" << complete_parts
       << " degree-complete), candidates " << res.candidates;
  if (any_complete_failure) {
    res.verdict = Verdict::NotExactDegreeComplete;
    cert << "; no preimage among all monomials of the required degree and weight";
  } else if (any_inconclusive) {
    res.verdict = Verdict::Inconclusive;
    cert << "; no preimage with total exponent <= " << degree_bound;
  } else {
    res.verdict = Verdict::Exact;
    res.preimage = h;
    cert << "; h = " << h.to_string();
  }
  res.certificate = cert.str();
  return res;
}

ModularClassReport modular_class(const Derivation& q, const VolumeForm& vol, int degree_bound) {
  if (!q.is_zero()) {
    HomologicalReport hr = is_homological(q);
    if (!hr.homological)
      fail(ErrorCode::NotHomological, std::string("modular_class: Q is not homological (") + to_string(hr.reason) + ")");
  }
  ModularClassReport rep;
  rep.representative = divergence(q, vol);
  rep.closedness = apply(q, rep.representative);
  rep.closed = rep.closedness.is_zero();
  rep.exactness = exactness_solve(rep.representative, q, degree_bound);
  return rep;
}

EquivalenceResult volumes_equivalent(const VolumeForm& v1, const VolumeForm& v2) {
  EquivalenceResult res;
  if (v1.atlas.charts.size() != v2.atlas.charts.size()) {
    res.reason = "different atlases";
    return res;
  }
  for (std::size_t k = 0; k < v1.s.size(); ++k) {
    if (!same_context(v1.s[k].context(), v2.s[k].context())) {
      res.reason = "different chart contexts";
      return res;
    }
    GradedPoly ratio = v2.s[k] * invert(v1.s[k]);
    GradedPoly free = ratio.free_part();
    if (!(free == one(ratio.context()))) {
      res.reason = "ratio on " + v1.atlas.charts[k].name + " has I-free part " + free.to_string() +
                   ", which has no logarithm in the model";
      res.h.clear();
      return res;
    }
    res.h.push_back(log(ratio));
  }
  for (const auto& [key, t] : v1.atlas.maps)
    if (!(t.pull(res.h[key.second]) == res.h[key.first])) {
      res.reason = "logarithms disagree on an overlap";
      res.h.clear();
      return res;
    }
  res.equivalent = true;
  res.reason = "s2 = s1 exp(h)";
  return res;
}

GradedPoly lifted_density(const ShiftedCotangent& t, const GradedPoly& s) {
  const ContextPtr& base = t.base;
  if (base->rho(t.i, t.i) == CycloScalar(-1L)) {
    GradedPoly ls = t.lift(s);
    return ls * ls;
  }
  return one(t.ctx);
}

}  // namespace rhocalc
