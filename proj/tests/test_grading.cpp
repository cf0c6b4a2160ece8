#include <gtest/gtest.h>

#include <random>

#include "rhocalc/errors.hpp"
#include "rhocalc/grading.hpp"
#include "test_support.hpp"

using namespace rhocalc;
using namespace rhocalc::testing;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::SyntaxError;
}


}  // namespace

TEST(Grading, SuperFactorOnZ2) {
  auto f = CommutationFactor::validate(GroupSpec(0, {2}), {{Rational(1, 2)}});
  EXPECT_EQ(f.eval(f.degree({1}), f.degree({1})), CycloScalar(-1L));
  EXPECT_EQ(f.parity(f.degree({1})), Parity::Odd);
  EXPECT_EQ(f.parity(f.degree({0})), Parity::Even);
  EXPECT_EQ(f.degree({3}), f.degree({1}));
}

TEST(Grading, TrivialFactor) {
  auto f = CommutationFactor::validate(GroupSpec(1, {}), {{Rational(0)}});
  EXPECT_TRUE(f.eval(f.degree({3}), f.degree({-7})).is_one());
  EXPECT_EQ(f.parity(f.degree({5})), Parity::Even);
}

TEST(Grading, TorsionConstraint) {
  EXPECT_EQ(code_of([] { CommutationFactor::validate(GroupSpec(0, {3}), {{Rational(1, 2)}}); }),
            ErrorCode::ConstraintViolation);
  try {
    CommutationFactor::validate(GroupSpec(0, {3}), {{Rational(1, 2)}});
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("torsion"), std::string::npos);
  }
  EXPECT_EQ(code_of([] { CommutationFactor::validate(GroupSpec(0, {2}), {{Rational(1, 3)}}); }),
            ErrorCode::ConstraintViolation);
  EXPECT_EQ(code_of([] {
              CommutationFactor::validate(GroupSpec(2, {}), {{0, Rational(1, 4)}, {Rational(1, 4), 0}});
            }),
            ErrorCode::ConstraintViolation);
  EXPECT_EQ(code_of([] { GroupSpec(0, {1}); }), ErrorCode::ConstraintViolation);
}

TEST(Grading, TorusValues) {
  auto f = CommutationFactor::torus({{0, Rational(1, 4)}, {Rational(-1, 4), 0}});
  auto e1 = f.degree({1, 0}), e2 = f.degree({0, 1});
  EXPECT_EQ(f.eval(e1, e2), CycloScalar::root_of_unity(4, 1));
  EXPECT_EQ(f.eval(e2, e1), CycloScalar::root_of_unity(4, 3));
  std::mt19937 rng(1);
  for (int t = 0; t < 50; ++t) EXPECT_EQ(f.parity(random_degree(f, rng)), Parity::Even);
}

TEST(Grading, ExtendPrime) {
  auto triv = CommutationFactor::trivial(GroupSpec(1, {}));
  auto p = triv.extend_prime();
  EXPECT_EQ(p.eval(p.degree({1, 0}), p.degree({1, 0})), CycloScalar(-1L));
  auto sup = CommutationFactor::super(GroupSpec(0, {2}));
  auto sp = sup.extend_prime();
  EXPECT_TRUE(sp.eval(sp.degree({1, 1}), sp.degree({1, 1})).is_one());
  auto tor = CommutationFactor::torus({{0, Rational(1, 4)}, {Rational(-1, 4), 0}});
  auto pp = tor.extend_prime().extend_prime();
  std::mt19937 rng(2);
  for (int t = 0; t < 50; ++t) {
    auto i = random_degree(tor, rng), j = random_degree(tor, rng);
    // rho''((t,s,i),(t',s',j)) = (-1)^{tt' + ss'} rho(i,j).
    EXPECT_EQ(pp.eval(i.prepended(0).prepended(1), j.prepended(1).prepended(0)), tor.eval(i, j));
    EXPECT_EQ(pp.eval(i.prepended(0).prepended(1), j.prepended(0).prepended(1)), -tor.eval(i, j));
    EXPECT_EQ(pp.eval(i.prepended(1).prepended(1), j.prepended(1).prepended(1)), tor.eval(i, j));
  }
}

TEST(Grading, AxiomsFuzz) {
  std::vector<CommutationFactor> factors = {
      CommutationFactor::super(GroupSpec(0, {2})), CommutationFactor::trivial(GroupSpec(1, {})),
      CommutationFactor::torus({{0, Rational(1, 4)}, {Rational(-1, 4), 0}}),
      CommutationFactor::validate(GroupSpec(1, {4}), {{Rational(1, 2), Rational(3, 4)}, {Rational(1, 4), Rational(1, 2)}})};
  std::mt19937 rng(7);
  for (const auto& f : factors) {
    for (int t = 0; t < 300; ++t) {
      auto i = random_degree(f, rng), j = random_degree(f, rng), k = random_degree(f, rng);
      EXPECT_TRUE((f.eval(i, j) * f.eval(j, i)).is_one());
      EXPECT_EQ(f.eval(i + j, k), f.eval(i, k) * f.eval(j, k));
      EXPECT_EQ(f.eval(i, j + k), f.eval(i, j) * f.eval(i, k));
      auto d = f.eval(i, i);
      EXPECT_TRUE(d == CycloScalar(1L) || d == CycloScalar(-1L));
      EXPECT_TRUE(f.eval(f.zero(), i).is_one());
      bool odd_sum = f.is_odd(i + j);
      EXPECT_EQ(odd_sum, f.is_odd(i) != f.is_odd(j));
    }
  }
}

TEST(Grading, Json) {
  auto f = CommutationFactor::torus({{0, Rational(1, 4)}, {Rational(-1, 4), 0}});
  EXPECT_EQ(f.to_json(), R"({"free_rank":2,"torsion":[],"phase":[["0","1/4"],["-1/4","0"]]})");
}
