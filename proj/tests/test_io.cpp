#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rhocalc/errors.hpp"
#include "rhocalc/session.hpp"
#include "test_support.hpp"

using namespace rhocalc;
using namespace rhocalc::testing;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SessionOutcome run(std::string_view text) { return run_text(text, RunOptions{}); }

// Column range [col, col + length) of the report error must cover `token`'s
// position in `line`.
void expect_span_inside(const Json& err, const std::string& line, const std::string& token) {
  auto at = line.find(token);
  ASSERT_NE(at, std::string::npos);
  int col = err["col"].get<int>();
  int len = err["length"].get<int>();
  int start = static_cast<int>(at) + 1;
  int stop = start + static_cast<int>(token.size());
  EXPECT_GE(col, start) << err.dump();
  EXPECT_LT(col, stop) << err.dump();
  EXPECT_LE(col + len, stop) << err.dump();
}

}  // namespace

TEST(Io, FactorStatements) {
  auto sup = run("group Z/2; factor super;");
  ASSERT_TRUE(sup.ok());
  EXPECT_EQ(*sup.factor, CommutationFactor::super(GroupSpec(0, {2})));

  auto tor = run("group Z^2; factor phases [[0,1/4],[-1/4,0]];");
  ASSERT_TRUE(tor.ok());
  EXPECT_EQ(*tor.factor, CommutationFactor::torus({{0, Rational(1, 4)}, {Rational(-1, 4), 0}}));
}

TEST(Io, TorsionViolationHasSpan) {
  std::string line = "factor phases [[1/3]] on Z/2;";
  auto out = run(line);
  EXPECT_FALSE(out.ok());
  EXPECT_TRUE(out.aborted);
  ASSERT_EQ(out.reports.size(), 1u);
  const auto& err = out.reports[0].error;
  EXPECT_EQ(err["code"], "ConstraintViolation");
  EXPECT_EQ(err["line"], 1);
  expect_span_inside(err, line, "phases");
}

TEST(Io, SyntaxErrorSpan) {
  auto out = run("group Z/2;\nfactor super;\nchart U { base x; }\npoly f = x + * x;\n");
  EXPECT_TRUE(out.aborted);
  const auto& err = out.reports.back().error;
  EXPECT_EQ(err["code"], "SyntaxError");
  EXPECT_EQ(err["line"], 4);
  expect_span_inside(err, "poly f = x + * x;", "*");
}

TEST(Io, ResolveErrorSpan) {
  std::string line = "poly f = x + zz * x;";
  auto out = run("group Z/2;\nfactor super;\nchart U { base x; }\n" + line + "\n");
  EXPECT_FALSE(out.ok());
  const auto& err = out.reports.back().error;
  EXPECT_EQ(err["code"], "ResolveError");
  EXPECT_EQ(err["line"], 4);
  expect_span_inside(err, line, "zz");
}

TEST(Io, EmptySession) {
  auto out = run("");
  EXPECT_TRUE(out.ok());
  EXPECT_TRUE(out.reports.empty());
  EXPECT_TRUE(to_json(out)["reports"].empty());
  EXPECT_EQ(to_json(out)["schema"], 1);
}

TEST(Io, QcheckDeRham) {
  auto out = run("group Z/2;\nfactor super;\nchart U { base x invertible; formal xi : deg (1) odd; }\nqcheck d on derham(U);\n");
  ASSERT_TRUE(out.ok()) << to_json(out).dump();
  ASSERT_EQ(out.reports.size(), 1u);
  EXPECT_EQ(out.reports[0].result["homological"], true);
}

TEST(Io, CommandErrorsContinueDeclarationErrorsAbort) {
  auto cont = run(
      "group Z/2;\nfactor super;\nchart U { base x invertible; formal xi : deg (1) odd; }\n"
      "derivation X = x * d/dx;\nnormalize zz;\nqcheck X;\n");
  EXPECT_FALSE(cont.ok());
  EXPECT_FALSE(cont.aborted);
  ASSERT_EQ(cont.reports.size(), 2u);
  EXPECT_EQ(cont.reports[0].error["code"], "ResolveError");
  EXPECT_TRUE(cont.reports[1].ok);
  EXPECT_EQ(cont.reports[1].result["homological"], false);

  auto abort = run("group Z/2;\nfactor super;\nchart U { base x; }\npoly f = x^-1;\nnormalize x;\n");
  EXPECT_TRUE(abort.aborted);
  ASSERT_EQ(abort.reports.size(), 1u);
  EXPECT_EQ(abort.reports[0].error["code"], "NegativePower");
}

TEST(Io, FactorAndDegreeRoundTrip) {
  std::vector<CommutationFactor> factors = {
      CommutationFactor::super(GroupSpec(0, {2})), CommutationFactor::trivial(GroupSpec(1, {})),
      CommutationFactor::torus({{0, Rational(1, 4)}, {Rational(-1, 4), 0}}),
      CommutationFactor::validate(GroupSpec(1, {4}), {{Rational(1, 2), Rational(3, 4)}, {Rational(1, 4), Rational(1, 2)}})};
  std::mt19937 rng(3);
  for (const auto& f : factors) {
    std::string once = format_factor(f);
    EXPECT_EQ(parse_factor(once), f) << once;
    EXPECT_EQ(format_factor(parse_factor(once)), once);
    EXPECT_EQ(factor_from_json(to_json(f)), f);
    for (int t = 0; t < 20; ++t) {
      Degree d = random_degree(f, rng);
      std::string s = format_degree(d);
      EXPECT_EQ(format_degree(parse_degree(f, s)), s);
    }
  }
}

TEST(Io, PolyDerivationMatrixRoundTrip) {
  std::mt19937 rng(5);
  for (const auto& ctx : {super_context(4), color_context(4), torus_context(4)}) {
    const auto& fac = ctx->factor();
    for (int t = 0; t < 20; ++t) {
      GradedPoly f = random_poly(ctx, rng);
      std::string s = f.to_string();
      EXPECT_EQ(parse_poly(ctx, s).to_string(), s);
      EXPECT_EQ(parse_poly(ctx, s), f);

      Derivation x = random_derivation(ctx, random_homogeneous(ctx, rng).degree(), rng);
      std::string dx = format_derivation(x);
      EXPECT_EQ(format_derivation(parse_derivation(ctx, dx)), dx);
    }
    DegreeTuple rows = fac.group().rank() == 1 ? tuple(ctx, {{0}, {1}}) : tuple(ctx, {{0, 0}, {1, 0}, {0, 1}});
    for (int t = 0; t < 10; ++t) {
      GradedMatrix m = random_matrix(ctx, rows, rows, ctx->zero_degree(), rng);
      std::string s = format_matrix(m);
      EXPECT_EQ(format_matrix(parse_matrix(ctx, s)), s);
      EXPECT_EQ(format_matrix(matrix_from_json(ctx, to_json(m))), s);
    }
  }
}

TEST(Io, SessionRunsAreDeterministic) {
  for (const auto& entry : std::filesystem::directory_iterator(RHOCALC_SESSION_DIR)) {
    std::string text = slurp(entry.path());
    EXPECT_EQ(to_json(run(text)).dump(), to_json(run(text)).dump()) << entry.path();
  }
}

TEST(Io, GoldenScenarios) {
  for (std::string name : {"torus", "derham", "cstar", "lift"}) {
    auto out = run("scenarios " + name + ";");
    ASSERT_TRUE(out.ok()) << name;
    Json j{{"schema", 1}, {"scenarios", out.reports[0].result["scenarios"]}};
    std::string golden = slurp(std::filesystem::path(RHOCALC_GOLDEN_DIR) / ("scenario_" + name + ".json"));
    EXPECT_EQ(j.dump(2) + "\n", golden) << name;
  }
}

TEST(Io, TorusSessionMatchesScenario) {
  auto out = run(slurp(std::filesystem::path(RHOCALC_SESSION_DIR) / "torus.rc"));
  ASSERT_TRUE(out.ok()) << to_json(out).dump(2);
  Json mods = modular_reports(out);
  ASSERT_GE(mods.size(), 2u);
  EXPECT_EQ(mods[0]["representative"], "-tau * eta1 - tau * eta2");
  EXPECT_EQ(mods[0]["verdict"], "not_exact_degree_complete");
  EXPECT_EQ(mods[0]["representative"], mods[1]["representative"]);
}
