#include <gtest/gtest.h>

#include <random>

#include "rhocalc/errors.hpp"
#include "rhocalc/volume.hpp"
#include "test_support.hpp"

using namespace rhocalc;
using namespace rhocalc::testing;

namespace {

GradedPoly var(const ContextPtr& c, const std::string& n, int p = 1) { return GradedPoly::variable(c, n, p); }
GradedPoly cst(const ContextPtr& c, long v) { return GradedPoly::constant(c, CycloScalar(v)); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::ConstraintViolation;
}

ContextPtr cstar() {
  auto f = CommutationFactor::super(GroupSpec(1, {}));
  return Context::make(f, {{"z", f.degree({0}), VarKind::Base, true, false},
                           {"dz", f.degree({1}), VarKind::FormalOdd, false, false}});
}

Derivation cstar_q(const ContextPtr& c) { return Derivation::from_components(c, {{0, var(c, "dz")}}); }

// Super line (x | xi) with Q = xi d/dx.
ContextPtr super_line() {
  auto f = CommutationFactor::super(GroupSpec(0, {2}));
  return Context::make(f, {{"x", f.zero(), VarKind::Base, true, false},
                           {"xi", f.degree({1}), VarKind::FormalOdd, false, false}});
}

Derivation line_q(const ContextPtr& c) { return Derivation::from_components(c, {{0, var(c, "xi")}}); }

// Two charts U, V with maps both ways built from fwd/bwd, density 1 on U.
VolumeForm two_chart_volume(const ContextPtr& ctx, TransitionMap (*fwd)(const Chart&, const Chart&),
                            TransitionMap (*bwd)(const Chart&, const Chart&)) {
  Atlas at;
  at.charts = {Chart{"U", ctx}, Chart{"V", ctx}};
  auto uv = fwd(at.charts[0], at.charts[1]);
  auto vu = bwd(at.charts[1], at.charts[0]);
  at.add(uv);
  at.add(vu);
  GradedPoly sv = vu.pull(invert(rho_ber_reordered(jacobian(uv))));
  return VolumeForm::make(at, {cst(ctx, 1), sv});
}

void expect_all_pass(const std::vector<PropertyResult>& props) {
  for (const auto& p : props) EXPECT_TRUE(p.pass) << p.name << ": " << p.detail;
}

}  // namespace

TEST(Volume, DivergenceExamples) {
  auto ctx = super_context();
  auto one = cst(ctx, 1);
  EXPECT_TRUE(divergence(Derivation(ctx, ctx->zero_degree()), one).is_zero());

  // d/dx with density x: x^-1 d/dx(x) = x^-1.
  auto dx = Derivation::partial(ctx, 0);
  EXPECT_EQ(divergence(dx, var(ctx, "x")), var(ctx, "x", -1));

  // Euler field on the even formal coordinates of the torus context.
  auto t = torus_context();
  auto euler = Derivation::from_components(t, {{1, var(t, "u1")}, {2, var(t, "u2")}});
  EXPECT_EQ(divergence(euler, cst(t, 1)), cst(t, 2));

  // Odd Euler field xi d/dxi counts -1 per odd coordinate.
  auto odd_euler = Derivation::from_components(ctx, {{2, var(ctx, "xi")}, {3, var(ctx, "eta")}});
  EXPECT_EQ(divergence(odd_euler, one), cst(ctx, -2));

  auto c = cstar();
  EXPECT_TRUE(divergence(cstar_q(c), cst(c, 1)).is_zero());
  EXPECT_EQ(divergence(cstar_q(c), var(c, "z")), var(c, "z", -1) * var(c, "dz"));

  DeRham dr = de_rham(super_line());
  EXPECT_TRUE(divergence(dr.d, cst(dr.forms, 1)).is_zero());
}

TEST(Volume, LieDerivativeOfVolumeIsDensityTimesDivergence) {
  auto ctx = super_context();
  std::mt19937 rng(7);
  for (int k = 0; k < 10; ++k) {
    auto x = random_derivation(ctx, ctx->factor().degree({k % 2}), rng);
    GradedPoly s = var(ctx, "x", 1 + k % 3) + var(ctx, "xi") * var(ctx, "eta");
    EXPECT_EQ(lie_derivative_volume(x, s), s * divergence(x, s));
  }
}

TEST(Volume, DivergenceProperties) {
  std::mt19937 rng(11);
  for (auto ctx : {super_context(), torus_context(), color_context()}) {
    auto z = ctx->zero_degree();
    for (int k = 0; k < 8; ++k) {
      auto x = random_derivation(ctx, ctx->var(1 + k % (ctx->size() - 1)).degree, rng);
      auto y = random_derivation(ctx, ctx->var(1 + (k + 1) % (ctx->size() - 1)).degree, rng);
      GradedPoly f = random_homogeneous(ctx, rng);
      GradedPoly g = random_of_degree(ctx, z, rng);
      g -= g.free_part();
      GradedPoly s = cst(ctx, 3) * var(ctx, "x", 2) + g * g;
      expect_all_pass(divergence_properties(x, y, f, g, s));
    }
  }
}

TEST(Volume, DivergenceOfHomologicalFieldIsClosed) {
  auto c = cstar();
  auto q = cstar_q(c);
  for (auto s : {var(c, "z"), var(c, "z", -3), cst(c, 5) * var(c, "z", 2)})
    EXPECT_TRUE(apply(q, divergence(q, s)).is_zero()) << s;

  auto l = super_line();
  auto ql = var(l, "x", 2) * line_q(l);
  ASSERT_TRUE(is_homological(ql).homological);
  EXPECT_TRUE(apply(ql, divergence(ql, cst(l, 2) * var(l, "x", 3))).is_zero());
}

TEST(Volume, ChangeOfVolumeShiftsByExactTerm) {
  auto ctx = super_context();
  Derivation q = Derivation::from_components(ctx, {{0, var(ctx, "xi")}, {1, var(ctx, "eta")}});
  ASSERT_TRUE(is_homological(q).homological);
  auto vol = VolumeForm::single(Chart{"U", ctx}, var(ctx, "x"));
  GradedPoly h = var(ctx, "xi") * var(ctx, "eta") + var(ctx, "x") * var(ctx, "xi") * var(ctx, "theta");
  auto vol2 = vol.times_exp({h});
  EXPECT_EQ(divergence(q, vol2) - divergence(q, vol), apply(q, h));
  auto eq = volumes_equivalent(vol, vol2);
  ASSERT_TRUE(eq.equivalent) << eq.reason;
  EXPECT_EQ(eq.h.front(), h);
}

TEST(Volume, VolumeFormErrors) {
  auto ctx = super_context();
  Chart c{"U", ctx};
  EXPECT_EQ(code_of([&] { VolumeForm::single(c, var(ctx, "xi")); }), ErrorCode::NotInvertibleDensity);
  EXPECT_EQ(code_of([&] { VolumeForm::single(c, var(ctx, "y")); }), ErrorCode::NotInvertibleDensity);
  EXPECT_EQ(code_of([&] { VolumeForm::single(c, GradedPoly(ctx)); }), ErrorCode::NotInvertibleDensity);
  EXPECT_EQ(code_of([&] { divergence(Derivation::partial(ctx, 0), var(ctx, "y")); }),
            ErrorCode::NotInvertibleDensity);

  Atlas at;
  at.charts = {Chart{"U", ctx}, Chart{"V", ctx}};
  at.add(super_forward(at.charts[0], at.charts[1]));
  at.add(super_backward(at.charts[1], at.charts[0]));
  EXPECT_EQ(code_of([&] { VolumeForm::make(at, {cst(ctx, 1), var(ctx, "x")}); }), ErrorCode::OverlapMismatch);
}

TEST(Volume, DivergenceAgreesOnOverlaps) {
  std::mt19937 rng(5);
  struct Case {
    ContextPtr ctx;
    TransitionMap (*fwd)(const Chart&, const Chart&);
    TransitionMap (*bwd)(const Chart&, const Chart&);
  };
  for (const auto& cs : {Case{super_context(), super_forward, super_backward},
                         Case{color_context(), color_forward, color_backward}}) {
    VolumeForm vol = two_chart_volume(cs.ctx, cs.fwd, cs.bwd);
    const auto& uv = vol.atlas.maps.at({0, 1});
    const auto& vu = vol.atlas.maps.at({1, 0});
    for (int k = 0; k < 6; ++k) {
      auto d = k % 2 ? cs.ctx->var(1).degree : cs.ctx->zero_degree();
      Derivation xu = random_derivation(cs.ctx, d, rng);
      Derivation xv = push_forward(xu, uv, vu);
      auto divs = divergence(std::vector<Derivation>{xu, xv}, vol);
      EXPECT_EQ(uv.pull(divs[1]), divs[0]);
    }
    Derivation xu = Derivation::partial(cs.ctx, 0);
    EXPECT_EQ(code_of([&] { divergence(std::vector<Derivation>{xu, xu}, vol); }), ErrorCode::OverlapMismatch);
  }
}

TEST(Volume, ExactnessSolver) {
  auto c = cstar();
  auto q = cstar_q(c);
  auto zero = exactness_solve(GradedPoly(c), q, 4);
  EXPECT_EQ(zero.verdict, Verdict::Exact);

  auto r = exactness_solve(var(c, "z", -1) * var(c, "dz"), q, 4);
  EXPECT_EQ(r.verdict, Verdict::NotExactDegreeComplete);
  EXPECT_FALSE(r.preimage);

  GradedPoly h0 = var(c, "z", 2) + cst(c, 3) * var(c, "z", -1);
  auto ex = exactness_solve(apply(q, h0), q, 4);
  ASSERT_EQ(ex.verdict, Verdict::Exact);
  EXPECT_EQ(apply(q, *ex.preimage), apply(q, h0));

  EXPECT_EQ(code_of([&] { exactness_solve(var(c, "z"), q, 4); }), ErrorCode::NotClosed);
}

TEST(Volume, ExactnessOnRandomCoboundaries) {
  std::mt19937 rng(3);
  auto ctx = super_context();
  Derivation q = Derivation::from_components(ctx, {{0, var(ctx, "xi")}, {1, var(ctx, "eta")}});
  for (int k = 0; k < 8; ++k) {
    GradedPoly h0 = random_of_degree(ctx, ctx->factor().degree({k % 2}), rng, 3, 2);
    GradedPoly c = apply(q, h0);
    auto r = exactness_solve(c, q, 4);
    ASSERT_EQ(r.verdict, Verdict::Exact) << c << ": " << r.certificate;
    EXPECT_EQ(apply(q, *r.preimage), c);
  }
}

TEST(Volume, ExactnessInconclusiveWithoutGrading) {
  auto l = super_line();
  auto q = (cst(l, 1) + var(l, "x")) * line_q(l);
  ASSERT_TRUE(is_homological(q).homological);
  // xi = Q(log(1 + x)) has no Laurent preimage, and the weights do not pin
  // the exponent of x, so the search is only bounded.
  auto r = exactness_solve(var(l, "xi"), q, 3);
  EXPECT_EQ(r.verdict, Verdict::Inconclusive);
  EXPECT_GT(r.candidates, 0u);
}

TEST(Volume, ModularClassAndEquivalence) {
  auto c = cstar();
  auto q = cstar_q(c);
  auto v1 = VolumeForm::single(Chart{"U", c}, cst(c, 1));
  auto v2 = VolumeForm::single(Chart{"U", c}, var(c, "z"));
  auto m = modular_class(q, v2, 4);
  EXPECT_TRUE(m.closed);
  EXPECT_EQ(m.representative, var(c, "z", -1) * var(c, "dz"));
  EXPECT_EQ(m.exactness.verdict, Verdict::NotExactDegreeComplete);
  EXPECT_TRUE(volumes_equivalent(v1, v1).equivalent);
  EXPECT_FALSE(volumes_equivalent(v1, v2).equivalent);

  EXPECT_EQ(code_of([&] { modular_class(Derivation::partial(c, 0), v1, 4); }), ErrorCode::NotHomological);
}

TEST(Volume, LiftedDensityAndDivergence) {
  auto c = cstar();
  auto q = cstar_q(c);
  for (std::int64_t i : {1, 2, 3}) {
    Degree id = c->factor().degree({i});
    LiftedQ lq = lift_fq(q, id);
    GradedPoly s = var(c, "z");
    GradedPoly st = lifted_density(lq.t, s);
    if (c->rho(id, id) == CycloScalar(-1L))
      EXPECT_EQ(st, lq.t.lift(s * s));
    else
      EXPECT_EQ(st, cst(lq.t.ctx, 1));
    GradedPoly expected = (CycloScalar(1L) - c->rho(id, id)) * lq.t.lift(divergence(q, s));
    EXPECT_EQ(divergence(lq.q_tilde, st), expected) << "i = " << i;
  }
}

TEST(Volume, BuiltinScenarios) {
  for (const auto& r : builtin_scenarios()) {
    EXPECT_TRUE(r.passed()) << r.name;
    for (const auto& cl : r.classes)
      EXPECT_TRUE(cl.matches) << r.name << " " << cl.label << ": " << cl.report.representative << " vs "
                              << cl.expected;
  }
}

TEST(Volume, TorusScenarioValues) {
  auto r = torus_scenario({{0, Rational(1, 4)}, {Rational(-1, 4), 0}});
  ASSERT_EQ(r.classes.size(), 1u);
  EXPECT_EQ(r.classes[0].report.representative.to_string(), "-tau * eta1 - tau * eta2");
  EXPECT_EQ(r.classes[0].report.exactness.verdict, Verdict::NotExactDegreeComplete);

  auto r3 = torus_scenario({{0, Rational(1, 3), Rational(1, 5)},
                            {Rational(-1, 3), 0, Rational(1, 2)},
                            {Rational(-1, 5), Rational(-1, 2), 0}});
  EXPECT_TRUE(r3.passed());
}

TEST(Volume, LiftScenarioClasses) {
  auto even = cotangent_lift_scenario(2);
  EXPECT_TRUE(even.classes[0].report.representative.is_zero());
  EXPECT_EQ(even.classes[0].report.exactness.verdict, Verdict::Exact);
  auto odd = cotangent_lift_scenario(1);
  EXPECT_EQ(odd.classes[0].report.representative.to_string(), "2 * z^-1 * dz");
  EXPECT_EQ(odd.classes[0].report.exactness.verdict, Verdict::NotExactDegreeComplete);
}
