#include "rhocalc/errors.hpp"
#include "rhocalc/volume.hpp"

namespace rhocalc {

namespace {

GradedPoly var(const ContextPtr& c, const std::string& n, int p = 1) { return GradedPoly::variable(c, n, p); }

ScenarioClass make_class(std::string label, ModularClassReport report, GradedPoly expected,
                         std::optional<Verdict> verdict) {
  ScenarioClass sc{std::move(label), std::move(report), std::move(expected), verdict, false};
  sc.matches = sc.report.closed && sc.report.representative == sc.expected &&
               (!verdict || sc.report.exactness.verdict == *verdict);
  return sc;
}

// Pi T C^x: z invertible of degree 0 and dz odd of degree 1 in Z.
ContextPtr cstar_context() {
  auto f = CommutationFactor::super(GroupSpec(1, {}));
  return Context::make(f, {{"z", f.degree({0}), VarKind::Base, true, false},
                           {"dz", f.degree({1}), VarKind::FormalOdd, false, false}});
}

}  // namespace

bool ScenarioResult::passed() const {
  for (const auto& c : classes)
    if (!c.matches) return false;
  for (const auto& [name, ok] : checks)
    if (!ok) return false;
  return true;
}

ScenarioResult torus_scenario(const std::vector<std::vector<Rational>>& theta, int degree_bound) {
  const std::size_t m = theta.size();
  auto fp = CommutationFactor::torus(theta).extend_prime();
  std::vector<std::int64_t> eta_deg(m + 1, 0);
  eta_deg[0] = 1;
  std::vector<Variable> vars{{"tau", fp.zero(), VarKind::Parameter, true, false}};
  for (std::size_t a = 0; a < m; ++a)
    vars.push_back({"eta" + std::to_string(a + 1), fp.degree(eta_deg), VarKind::FormalOdd, false, false});
  for (std::size_t a = 0; a < m; ++a) {
    std::vector<std::int64_t> d(m + 1, 0);
    d[1 + a] = 1;
    vars.push_back({"u" + std::to_string(a + 1), fp.degree(d), VarKind::FormalEven, false, false});
  }
  auto ctx = Context::make(fp, vars);
  GradedPoly tau = var(ctx, "tau");
  std::map<std::size_t, GradedPoly> comps;
  GradedPoly expected(ctx);
  for (std::size_t a = 0; a < m; ++a) {
    GradedPoly eta = GradedPoly::variable(ctx, 1 + a), u = GradedPoly::variable(ctx, 1 + m + a);
    comps.emplace(1 + m + a, -(tau * eta * u));
    expected -= tau * eta;
  }
  Derivation q = Derivation::from_components(ctx, fp.degree(eta_deg), comps);
  auto vol = VolumeForm::single(Chart{"pt", ctx}, GradedPoly::constant(ctx, CycloScalar(1L)));

  ScenarioResult res;
  res.name = "torus";
  res.description = "BRST differential on Pi g x A_Theta, m = " + std::to_string(m) + ", trivial volume";
  res.classes.push_back(make_class("vol = 1", modular_class(q, vol, degree_bound), expected,
                                   Verdict::NotExactDegreeComplete));
  res.checks.emplace_back("Q homological", is_homological(q).homological);
  return res;
}

ScenarioResult de_rham_scenario(int degree_bound) {
  auto f = CommutationFactor::super(GroupSpec(0, {2}));
  auto base = Context::make(f, {{"x", f.zero(), VarKind::Base, true, false},
                                {"xi", f.degree({1}), VarKind::FormalOdd, false, false}});
  DeRham dr = de_rham(base);
  auto vol = VolumeForm::single(Chart{"U", dr.forms}, GradedPoly::constant(dr.forms, CycloScalar(1L)));
  ScenarioResult res;
  res.name = "derham";
  res.description = "de Rham differential on Pi TM over a (1|1) super chart, volume D(x,dx) 1";
  res.classes.push_back(make_class("vol = 1", modular_class(dr.d, vol, degree_bound), GradedPoly(dr.forms),
                                   Verdict::Exact));
  res.checks.emplace_back("d homological", is_homological(dr.d).homological);
  return res;
}

ScenarioResult cstar_scenario(int degree_bound) {
  auto ctx = cstar_context();
  Chart c{"U", ctx};
  Derivation q = Derivation::from_components(ctx, {{0, var(ctx, "dz")}});
  auto vol1 = VolumeForm::single(c, GradedPoly::constant(ctx, CycloScalar(1L)));
  auto vol2 = VolumeForm::single(c, var(ctx, "z"));
  ScenarioResult res;
  res.name = "cstar";
  res.description = "Pi T C^x with Q = dz d/dz and the volumes D(z,dz) 1 and D(z,dz) z";
  res.classes.push_back(make_class("vol1 = 1", modular_class(q, vol1, degree_bound), GradedPoly(ctx), Verdict::Exact));
  res.classes.push_back(make_class("vol2 = z", modular_class(q, vol2, degree_bound),
                                   var(ctx, "z", -1) * var(ctx, "dz"), Verdict::NotExactDegreeComplete));
  res.checks.emplace_back("vol1 and vol2 not equivalent", !volumes_equivalent(vol1, vol2).equivalent);
  return res;
}

ScenarioResult cotangent_lift_scenario(std::int64_t i, int degree_bound) {
  auto ctx = cstar_context();
  Derivation q = Derivation::from_components(ctx, {{0, var(ctx, "dz")}});
  GradedPoly s = var(ctx, "z");
  Degree id = ctx->factor().degree({i});
  LiftedQ lifted = lift_fq(q, id);
  const ShiftedCotangent& t = lifted.t;
  auto vol = VolumeForm::single(Chart{"U", t.ctx}, lifted_density(t, s));
  CycloScalar factor = CycloScalar(1L) - ctx->rho(id, id);
  GradedPoly base_div = divergence(q, s);

  ScenarioResult res;
  res.name = "cotangent_lift_i" + std::to_string(i);
  res.description = "[-i]T* over Pi T C^x with i = " + std::to_string(i) + ", Q~ = [[f_Q, -]], volume induced by z";
  res.classes.push_back(make_class("induced volume", modular_class(lifted.q_tilde, vol, degree_bound),
                                   factor * t.lift(base_div), std::nullopt));
  res.checks.emplace_back("Q~ homological", is_homological(lifted.q_tilde).homological);
  res.checks.emplace_back("[[f_Q, f_Q]] = 0", schouten(t, lifted.f_q, lifted.f_q).is_zero());
  return res;
}

std::vector<ScenarioResult> builtin_scenarios(int degree_bound) {
  std::vector<ScenarioResult> out;
  out.push_back(torus_scenario({{0, Rational(1, 4)}, {Rational(-1, 4), 0}}, degree_bound));
  out.push_back(de_rham_scenario(degree_bound));
  out.push_back(cstar_scenario(degree_bound));
  out.push_back(cotangent_lift_scenario(2, degree_bound));
  out.push_back(cotangent_lift_scenario(1, degree_bound));
  return out;
}

}  // namespace rhocalc
