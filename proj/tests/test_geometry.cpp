#include <gtest/gtest.h>

#include <random>

#include "rhocalc/errors.hpp"
#include "rhocalc/geometry.hpp"
#include "test_support.hpp"

using namespace rhocalc;
using namespace rhocalc::testing;

namespace {

GradedPoly var(const ContextPtr& c, const std::string& n, int p = 1) { return GradedPoly::variable(c, n, p); }
GradedPoly cst(const ContextPtr& c, long v) { return GradedPoly::constant(c, CycloScalar(v)); }

Chart chart(const std::string& name, ContextPtr ctx) { return Chart{name, std::move(ctx)}; }

// Z^2 torus factor (theta12 = 1/4) with x base, u1 (1,0), u2 (0,1), w (1,1).
ContextPtr torus_w() {
  auto f = CommutationFactor::torus({{0, Rational(1, 4)}, {Rational(-1, 4), 0}});
  return Context::make(f, {{"x", f.degree({0, 0}), VarKind::Base, true, false},
                           {"u1", f.degree({1, 0}), VarKind::FormalEven, false, false},
                           {"u2", f.degree({0, 1}), VarKind::FormalEven, false, false},
                           {"w", f.degree({1, 1}), VarKind::FormalEven, false, false}});
}

bool is_identity_map(const TransitionMap& t) {
  for (std::size_t k = 0; k < t.images().size(); ++k)
    if (!(t.image(k) == GradedPoly::variable(t.source().ctx, k))) return false;
  return true;
}

// Three charts U0, U1, U2 with maps both ways between every pair.
Atlas three_chart_atlas(const ContextPtr& ctx, TransitionMap (*fwd)(const Chart&, const Chart&),
                        TransitionMap (*bwd)(const Chart&, const Chart&)) {
  Atlas at;
  for (const char* n : {"U0", "U1", "U2"}) at.charts.push_back(chart(n, ctx));
  auto t01 = fwd(at.charts[0], at.charts[1]), t10 = bwd(at.charts[1], at.charts[0]);
  auto t12 = fwd(at.charts[1], at.charts[2]), t21 = bwd(at.charts[2], at.charts[1]);
  at.add(t01);
  at.add(t10);
  at.add(t12);
  at.add(t21);
  at.add(compose(t12, t01));
  at.add(compose(t10, t21));
  return at;
}

Atlas linear_super_atlas() {
  auto ctx = super_context();
  Atlas at;
  for (const char* n : {"U0", "U1", "U2"}) at.charts.push_back(chart(n, ctx));
  auto lin = [&](std::size_t s, std::size_t t, long ax, long bx, long k) {
    auto c = ctx;
    return TransitionMap::make(at.charts[s], at.charts[t],
                               {{"x", cst(c, ax) * var(c, "x")},
                                {"y", var(c, "y") + cst(c, bx) * var(c, "x")},
                                {"xi", var(c, "xi") + cst(c, k) * var(c, "eta")},
                                {"eta", var(c, "eta")},
                                {"theta", var(c, "theta")}});
  };
  auto t01 = lin(0, 1, 2, 1, 3), t12 = lin(1, 2, 3, -1, 1);
  auto inv = [&](const TransitionMap& t, std::size_t s, std::size_t r) {
    // Inverse of x -> a x, y -> y + b x, xi -> xi + k eta.
    const auto& im = t.images();
    CycloScalar a = im[0].terms().begin()->second;
    CycloScalar b = (im[1] - var(ctx, "y")).terms().begin()->second;
    CycloScalar k = (im[2] - var(ctx, "xi")).terms().begin()->second;
    auto c = ctx;
    return TransitionMap::make(at.charts[s], at.charts[r],
                               {{"x", (CycloScalar(1L) / a) * var(c, "x")},
                                {"y", var(c, "y") - (b / a) * var(c, "x")},
                                {"xi", var(c, "xi") - k * var(c, "eta")},
                                {"eta", var(c, "eta")},
                                {"theta", var(c, "theta")}});
  };
  at.add(t01);
  at.add(t12);
  auto t10 = inv(t01, 1, 0), t21 = inv(t12, 2, 1);
  at.add(t10);
  at.add(t21);
  at.add(compose(t12, t01));
  at.add(compose(t10, t21));
  return at;
}

void expect_all_pass(const std::vector<PropertyResult>& props) {
  for (const auto& p : props) EXPECT_TRUE(p.pass) << p.name << ": " << p.detail;
}

}  // namespace

TEST(Geometry, IdentityJacobian) {
  auto c = chart("U", super_context());
  auto id = TransitionMap::identity(c);
  EXPECT_EQ(jacobian(id), GradedMatrix::identity(c.ctx, c.tuple()));
  EXPECT_TRUE(chain_rule_check(id).holds);
  EXPECT_EQ(c.base_count(), 2u);
  EXPECT_EQ(c.formal_count(), 3u);
}

TEST(Geometry, LinearJacobianIsTheMatrix) {
  Atlas at = linear_super_atlas();
  const auto& t = at.maps.at({0, 1});
  auto ctx = at.charts[0].ctx;
  GradedMatrix j = jacobian(t);
  std::vector<GradedPoly> expect = {cst(ctx, 2), cst(ctx, 0), cst(ctx, 0), cst(ctx, 0), cst(ctx, 0),
                                    cst(ctx, 1), cst(ctx, 1), cst(ctx, 0), cst(ctx, 0), cst(ctx, 0),
                                    cst(ctx, 0), cst(ctx, 0), cst(ctx, 1), cst(ctx, 3), cst(ctx, 0),
                                    cst(ctx, 0), cst(ctx, 0), cst(ctx, 0), cst(ctx, 1), cst(ctx, 0),
                                    cst(ctx, 0), cst(ctx, 0), cst(ctx, 0), cst(ctx, 0), cst(ctx, 1)};
  auto tup = at.charts[0].tuple();
  EXPECT_EQ(j, GradedMatrix::make(ctx, tup, tup, ctx->zero_degree(), expect));
  EXPECT_TRUE(chain_rule_check(t).holds);
}

TEST(Geometry, InverseMapsCompose) {
  auto ctx = super_context();
  auto u = chart("U", ctx), v = chart("V", ctx);
  EXPECT_TRUE(is_identity_map(compose(super_backward(v, u), super_forward(u, v))));
  EXPECT_TRUE(is_identity_map(compose(super_forward(u, v), super_backward(v, u))));
  auto cc = color_context();
  auto p = chart("P", cc), q = chart("Q", cc);
  EXPECT_TRUE(is_identity_map(compose(color_backward(q, p), color_forward(p, q))));
  EXPECT_TRUE(is_identity_map(compose(color_forward(p, q), color_backward(q, p))));
}

TEST(Geometry, ChainRuleOnTorusComposite) {
  auto ctx = torus_w();
  auto u = chart("U", ctx), v = chart("V", ctx), w = chart("W", ctx);
  auto s = TransitionMap::make(u, v, {{"x", cst(ctx, 2) * var(ctx, "x")},
                                      {"u1", var(ctx, "x") * var(ctx, "u1")},
                                      {"u2", var(ctx, "u2")},
                                      {"w", var(ctx, "w") + var(ctx, "u1") * var(ctx, "u2")}});
  auto t = TransitionMap::make(v, w, {{"x", cst(ctx, 3) * var(ctx, "x", -1)},
                                      {"u1", var(ctx, "u1")},
                                      {"u2", var(ctx, "x", -1) * var(ctx, "u2")},
                                      {"w", var(ctx, "x") * var(ctx, "w") - var(ctx, "u2") * var(ctx, "u1")}});
  auto ts = compose(t, s);
  EXPECT_EQ(jacobian(ts), s.pull(jacobian(t)) * jacobian(s));
  for (const auto* m : {&s, &t, &ts}) {
    auto rep = chain_rule_check(*m, 15, 3);
    EXPECT_TRUE(rep.holds) << (rep.failures.empty() ? "" : rep.failures.front());
  }
}

TEST(Geometry, ChainRuleOnSuperAndColorMaps) {
  auto sc = super_context();
  auto u = chart("U", sc), v = chart("V", sc);
  for (const auto& t : {super_forward(u, v), super_backward(v, u)}) EXPECT_TRUE(chain_rule_check(t, 20, 5).holds);
  auto cc = color_context();
  auto p = chart("P", cc), q = chart("Q", cc);
  auto f = color_forward(p, q), b = color_backward(q, p);
  EXPECT_TRUE(chain_rule_check(f, 20, 7).holds);
  EXPECT_TRUE(chain_rule_check(b, 20, 7).holds);
  // J'(b o f) = f^*(J'(b)) J'(f) = 1.
  EXPECT_EQ(f.pull(jacobian(b)) * jacobian(f), GradedMatrix::identity(cc, p.tuple()));
}

TEST(Geometry, TransitionErrors) {
  auto sc = super_context();
  auto u = chart("U", sc), v = chart("V", sc);
  auto x = var(sc, "x"), xi = var(sc, "xi"), eta = var(sc, "eta");
  std::map<std::string, GradedPoly> good = {
      {"x", x}, {"y", var(sc, "y")}, {"xi", xi}, {"eta", eta}, {"theta", var(sc, "theta")}};
  auto bad_degree = good;
  bad_degree["xi"] = x;
  try {
    TransitionMap::make(u, v, bad_degree);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GradingViolation);
  }
  auto missing = good;
  missing.erase("eta");
  try {
    TransitionMap::make(u, v, missing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ResolveError);
  }
  auto singular = good;
  singular["xi"] = eta;
  try {
    TransitionMap::make(u, v, singular);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInvertible);
  }
  auto other = chart("T", torus_context());
  try {
    TransitionMap::make(u, other, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ContextMismatch);
  }
}

TEST(Geometry, TangentAndCotangentCocycles) {
  Atlas single = Atlas::single(chart("U", super_context()));
  EXPECT_TRUE(tangent(single).g.empty());
  EXPECT_TRUE(cocycle_check(tangent(single)).holds);

  Atlas lin = linear_super_atlas();
  auto tl = tangent(lin);
  for (const auto& [key, m] : tl.g)
    for (std::size_t k = 0; k < m.nrows(); ++k)
      for (std::size_t l = 0; l < m.ncols(); ++l) EXPECT_TRUE(m.at(k, l).is_constant());

  for (const Atlas& at : {lin, three_chart_atlas(super_context(), super_forward, super_backward),
                          three_chart_atlas(color_context(), color_forward, color_backward)}) {
    for (const BundleSpec& b : {tangent(at), cotangent(at)}) {
      auto rep = cocycle_check(b);
      EXPECT_TRUE(rep.holds) << b.name << ": " << (rep.failures.empty() ? "" : rep.failures.front());
      EXPECT_GT(rep.checked, 6u);
    }
  }
  auto tc = cotangent(lin);
  EXPECT_EQ(tc.fiber, lin.charts[0].tuple().negated());
}

TEST(Geometry, BrokenCocycleIsReported) {
  Atlas at = three_chart_atlas(color_context(), color_forward, color_backward);
  BundleSpec t = tangent(at);
  auto ctx = at.charts[0].ctx;
  GradedMatrix g = t.g.at({0, 1});
  g.set(0, 0, cst(ctx, 5));
  t.g.insert_or_assign({0, 1}, g);
  EXPECT_FALSE(cocycle_check(t).holds);
}

TEST(Geometry, Shifts) {
  Atlas at = three_chart_atlas(super_context(), super_forward, super_backward);
  BundleSpec e = tangent(at);
  auto f = at.charts[0].ctx->factor();
  EXPECT_EQ(shift_pi(shift_pi(e)), e);
  EXPECT_FALSE(shift_pi(e) == e);
  EXPECT_EQ(shift_pi(e).effective_fiber()[0], f.degree({0}).prepended(1));
  EXPECT_EQ(shift_degree(e, f.zero()), e);
  Degree i = f.degree({1});
  BundleSpec twice = shift_degree(shift_degree(e, i), i);
  EXPECT_EQ(twice, shift_degree(e, i + i));
  EXPECT_EQ(twice.fiber, e.fiber);  // 2 = 0 in Z/2

  auto tf = CommutationFactor::torus({{0, Rational(1, 4)}, {Rational(-1, 4), 0}});
  Atlas ta = Atlas::single(chart("U", torus_context()));
  BundleSpec tt = tangent(ta);
  Degree j = tf.degree({1, 0}), k = tf.degree({0, 2});
  EXPECT_EQ(shift_degree(shift_degree(tt, j), k).fiber, shift_degree(tt, j + k).fiber);
  EXPECT_FALSE(shift_degree(tt, j).fiber == tt.fiber);
  EXPECT_TRUE(cocycle_check(shift_degree(tangent(at), i)).holds);
}

TEST(Geometry, DeRhamBasics) {
  auto ctx = super_context();
  DeRham dr = de_rham(chart("U", ctx));
  for (std::size_t a : ctx->coordinates())
    EXPECT_EQ(apply(dr.d, GradedPoly::variable(dr.forms, a)), GradedPoly::variable(dr.forms, dr.dx.at(a)));
  EXPECT_TRUE(is_homological(dr.d).homological);
  EXPECT_TRUE(commutator(dr.d, dr.d).is_zero());
  // dx is odd for even x and even for odd x.
  EXPECT_EQ(dr.forms->var(dr.dx.at(0)).kind, VarKind::FormalOdd);
  EXPECT_EQ(dr.forms->var(dr.dx.at(2)).kind, VarKind::FormalEven);

  std::mt19937 rng(11);
  const auto& fp = dr.forms->factor();
  for (int s = 0; s < 30; ++s) {
    GradedPoly f = random_homogeneous(dr.forms, rng), g = random_homogeneous(dr.forms, rng);
    EXPECT_TRUE(apply(dr.d, apply(dr.d, f)).is_zero());
    GradedPoly lhs = apply(dr.d, f * g);
    GradedPoly rhs = apply(dr.d, f) * g + fp.eval(dr.d.degree(), f.degree()) * (f * apply(dr.d, g));
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(Geometry, LieDerivativeAndInterior) {
  auto ctx = color_context();
  DeRham dr = de_rham(ctx);
  std::mt19937 rng(5);
  Derivation x = random_derivation(ctx, ctx->var(1).degree, rng);
  Derivation lx = lie_derivative(dr, x), ix = interior(dr, x);
  for (int s = 0; s < 10; ++s) {
    GradedPoly f = random_poly(ctx, rng);
    EXPECT_EQ(apply(lx, dr.lift(f)), dr.lift(apply(x, f)));
  }
  for (const auto& [a, da] : dr.dx) EXPECT_EQ(apply(ix, GradedPoly::variable(dr.forms, da)), dr.lift(x.component(a)));
  EXPECT_EQ(lx.degree(), x.degree().prepended(0));
  EXPECT_EQ(ix.degree(), x.degree().prepended(-1));
}

TEST(Geometry, CartanIdentities) {
  std::mt19937 rng(21);
  for (auto ctx : {super_context(), color_context(), torus_context()}) {
    DeRham dr = de_rham(ctx);
    for (int s = 0; s < 4; ++s) {
      Degree dx = ctx->var(std::uniform_int_distribution<std::size_t>(0, ctx->size() - 1)(rng)).degree;
      Degree dy = ctx->var(std::uniform_int_distribution<std::size_t>(0, ctx->size() - 1)(rng)).degree;
      Derivation x = random_derivation(ctx, dx, rng), y = random_derivation(ctx, -dy, rng);
      auto rep = cartan_check(dr, x, y, 10, s + 1);
      EXPECT_TRUE(rep.holds) << (rep.failures.empty() ? "" : rep.failures.front());
    }
  }
}

TEST(Geometry, DifferentialPlusLieDerivative) {
  auto ctx = super_context();
  DeRham dr = de_rham(ctx);
  Derivation q = Derivation::from_components(ctx, {{0, var(ctx, "xi")}});
  ASSERT_TRUE(is_homological(q).homological);
  auto rep = differential_sum_check(dr, q, 20, 3);
  EXPECT_TRUE(rep.d_squared_zero);
  EXPECT_TRUE(rep.lq_squared_zero);
  EXPECT_TRUE(rep.bracket_d_lq_zero);
  EXPECT_TRUE(rep.bilinear_bracket_zero);
  EXPECT_TRUE(rep.composite_is_twice_d_lq);
  // d and L_Q rho'-commute, so the composite square is 2 d L_Q, not zero:
  // on x it is 2 dxi.
  EXPECT_FALSE(rep.composite_square_zero);
  Derivation lq = lie_derivative(dr, q);
  GradedPoly x = GradedPoly::variable(dr.forms, "x");
  GradedPoly step = apply(dr.d, x) + apply(lq, x);
  EXPECT_EQ(apply(dr.d, step) + apply(lq, step), CycloScalar(2L) * GradedPoly::variable(dr.forms, "dxi"));
}

TEST(Geometry, SchoutenLemmaValues) {
  for (auto ctx : {super_context(), color_context()}) {
    for (std::size_t pick = 0; pick < 2; ++pick) {
      Degree i = pick == 0 ? ctx->zero_degree() : ctx->var(1).degree;
      auto t = shifted_cotangent(ctx, i);
      for (const auto& [a, sa] : t.star)
        for (const auto& [b, sb] : t.star) {
          GradedPoly xa = GradedPoly::variable(t.ctx, a), xb = GradedPoly::variable(t.ctx, b);
          GradedPoly sta = GradedPoly::variable(t.ctx, sa), stb = GradedPoly::variable(t.ctx, sb);
          const Degree& da = ctx->var(a).degree;
          EXPECT_EQ(schouten(t, sta, xb), cst(t.ctx, a == b ? 1 : 0));
          GradedPoly expect = a == b ? -GradedPoly::constant(t.ctx, ctx->rho(da, da + i)) : cst(t.ctx, 0);
          EXPECT_EQ(schouten(t, xa, stb), expect);
          EXPECT_TRUE(schouten(t, xa, xb).is_zero());
          EXPECT_TRUE(schouten(t, sta, stb).is_zero());
        }
    }
  }
}

TEST(Geometry, SchoutenDegreeZeroIsPoisson) {
  auto f = CommutationFactor::trivial(GroupSpec(1, {}));
  auto ctx = Context::make(f, {{"q", f.zero(), VarKind::Base, false, false}});
  auto t = shifted_cotangent(ctx, f.zero());
  auto q = var(t.ctx, "q"), p = var(t.ctx, "q_star");
  EXPECT_EQ(schouten(t, p, q), cst(t.ctx, 1));
  EXPECT_EQ(schouten(t, q, p), cst(t.ctx, -1));
  EXPECT_TRUE(schouten(t, p, p).is_zero());
  // {p^2, q^3} = 6 p q^2 with {f,g} = df/dp dg/dq - df/dq dg/dp.
  EXPECT_EQ(schouten(t, p * p, q * q * q), cst(t.ctx, 6) * p * q * q);
}

TEST(Geometry, SchoutenProposition) {
  std::mt19937 rng(8);
  for (auto ctx : {super_context(3), color_context(3)}) {
    for (std::size_t pick = 0; pick < 2; ++pick) {
      Degree i = pick == 0 ? ctx->zero_degree() : ctx->var(1).degree;
      auto t = shifted_cotangent(ctx, i);
      for (int s = 0; s < 12; ++s) {
        GradedPoly f = random_homogeneous(t.ctx, rng, 2), g = random_homogeneous(t.ctx, rng, 2),
                   h = random_homogeneous(t.ctx, rng, 2);
        expect_all_pass(schouten_properties(t, f, g, h));
      }
    }
  }
}

TEST(Geometry, SchoutenNeedsHomogeneousLeft) {
  auto ctx = super_context();
  auto t = shifted_cotangent(ctx, ctx->zero_degree());
  GradedPoly mixed = var(t.ctx, "x") + var(t.ctx, "xi");
  try {
    schouten(t, mixed, var(t.ctx, "x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotHomogeneous);
  }
}

TEST(Geometry, LiftFq) {
  auto ctx = super_context();
  auto zero = lift_fq(Derivation(ctx, ctx->var(2).degree), ctx->zero_degree());
  EXPECT_TRUE(zero.f_q.is_zero());
  EXPECT_TRUE(zero.q_tilde.is_zero());

  // Torus BRST field: eta^a odd (1,0,0), u^a even (0,e_a), tau a parameter.
  auto fp = CommutationFactor::torus({{0, Rational(1, 4)}, {Rational(-1, 4), 0}}).extend_prime();
  auto tc = Context::make(fp, {{"tau", fp.zero(), VarKind::Parameter, true, false},
                               {"eta1", fp.degree({1, 0, 0}), VarKind::FormalOdd, false, false},
                               {"eta2", fp.degree({1, 0, 0}), VarKind::FormalOdd, false, false},
                               {"u1", fp.degree({0, 1, 0}), VarKind::FormalEven, false, false},
                               {"u2", fp.degree({0, 0, 1}), VarKind::FormalEven, false, false}});
  GradedPoly tau = var(tc, "tau");
  Derivation q = Derivation::from_components(
      tc, {{3, -(tau * var(tc, "eta1") * var(tc, "u1"))}, {4, -(tau * var(tc, "eta2") * var(tc, "u2"))}});
  ASSERT_TRUE(is_homological(q).homological);
  auto lifted = lift_fq(q, fp.zero());
  EXPECT_EQ(lifted.f_q.degree(), q.degree());
  EXPECT_TRUE(schouten(lifted.t, lifted.f_q, lifted.f_q).is_zero());
  EXPECT_TRUE(is_homological(lifted.q_tilde).homological);

  // de Rham d on a one-variable chart, lifted at an odd i.
  auto f = CommutationFactor::super(GroupSpec(0, {2}));
  auto line = Context::make(f, {{"z", f.zero(), VarKind::Base, true, false}});
  DeRham dr = de_rham(line);
  Degree odd = dr.forms->factor().degree({1, 0});
  auto ld = lift_fq(dr.d, odd);
  EXPECT_EQ(ld.f_q.degree(), dr.d.degree() - odd);
  EXPECT_TRUE(is_homological(ld.q_tilde).homological);
  EXPECT_TRUE(schouten(ld.t, ld.f_q, ld.f_q).is_zero());

  Derivation notq = Derivation::from_components(ctx, {{0, var(ctx, "x")}});
  try {
    lift_fq(notq, ctx->zero_degree());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotHomological);
  }
}
