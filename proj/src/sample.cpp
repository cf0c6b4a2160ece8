#include "rhocalc/sample.hpp"

namespace rhocalc {

CycloScalar random_scalar(std::mt19937& rng, int conductor) {
  std::uniform_int_distribution<int> num(-5, 5), den(1, 3), root(0, conductor - 1), coin(0, 2);
  int p = num(rng);
  if (p == 0) p = 1;
  CycloScalar c(Rational(p, den(rng)));
  if (conductor > 1 && coin(rng) == 0) c *= CycloScalar::root_of_unity(conductor, root(rng));
  return c;
}

Monomial random_monomial(const Context& ctx, std::mt19937& rng, int max_exp) {
  Monomial m(ctx.size(), 0);
  for (std::size_t k = 0; k < ctx.size(); ++k) {
    const auto& v = ctx.var(k);
    int lo = v.invertible ? -1 : 0;
    int hi = v.squares_to_zero() ? 1 : max_exp;
    m[k] = std::uniform_int_distribution<int>(lo, hi)(rng);
  }
  return m;
}

GradedPoly random_poly(const ContextPtr& ctx, std::mt19937& rng, int terms, int max_exp) {
  GradedPoly f(ctx);
  for (int t = 0; t < terms; ++t) f.add_term(random_monomial(*ctx, rng, max_exp), random_scalar(rng, ctx->conductor()));
  return f;
}

GradedPoly random_of_degree(const ContextPtr& ctx, const Degree& d, std::mt19937& rng, int terms, int max_exp) {
  GradedPoly f(ctx);
  int added = 0;
  for (int attempt = 0; attempt < 400 && added < terms; ++attempt) {
    Monomial m = random_monomial(*ctx, rng, max_exp);
    if (f.monomial_degree(m) != d) continue;
    f.add_term(m, random_scalar(rng, ctx->conductor()));
    ++added;
  }
  return f;
}

GradedPoly random_homogeneous(const ContextPtr& ctx, std::mt19937& rng, int terms, int max_exp) {
  for (int attempt = 0; attempt < 20; ++attempt) {
    Monomial m = random_monomial(*ctx, rng, max_exp);
    GradedPoly probe(ctx);
    probe.add_term(m, CycloScalar(1L));
    if (probe.is_zero()) continue;
    GradedPoly f = random_of_degree(ctx, probe.monomial_degree(m), rng, terms - 1, max_exp);
    f.add_term(m, random_scalar(rng, ctx->conductor()));
    if (!f.is_zero()) return f;
  }
  return GradedPoly::constant(ctx, CycloScalar(1L));
}

Derivation random_derivation(const ContextPtr& ctx, const Degree& d, std::mt19937& rng, int terms) {
  std::map<std::size_t, GradedPoly> comps;
  for (std::size_t a : ctx->coordinates()) comps[a] = random_of_degree(ctx, d + ctx->var(a).degree, rng, terms);
  return Derivation::from_components(ctx, d, comps);
}

}  // namespace rhocalc
