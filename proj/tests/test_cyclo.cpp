#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "rhocalc/cyclo.hpp"
#include "rhocalc/errors.hpp"

using namespace rhocalc;

namespace {

std::complex<double> numeric(const CycloScalar& s) {
  std::complex<double> z = 0;
  const double two_pi = 2 * std::acos(-1.0);
  for (std::size_t k = 0; k < s.coeffs().size(); ++k)
    z += s.coeffs()[k].get_d() * std::polar(1.0, two_pi * static_cast<double>(k) / s.conductor());
  return z;
}

CycloScalar random_element(std::mt19937& rng) {
  static const int conductors[] = {1, 3, 4, 5, 8, 12};
  std::uniform_int_distribution<int> pick(0, 5), num(-6, 6), den(1, 4), terms(1, 3);
  CycloScalar out;
  int n = conductors[pick(rng)];
  for (int t = terms(rng); t > 0; --t)
    out += CycloScalar(Rational(num(rng), den(rng))) *
           CycloScalar::root_of_unity(n, std::uniform_int_distribution<int>(0, n - 1)(rng));
  return out;
}

}  // namespace

TEST(Cyclotomic, PolynomialsMatchKnownValues) {
  EXPECT_EQ(cyclotomic_polynomial(1), (std::vector<std::int64_t>{-1, 1}));
  EXPECT_EQ(cyclotomic_polynomial(4), (std::vector<std::int64_t>{1, 0, 1}));
  EXPECT_EQ(cyclotomic_polynomial(12), (std::vector<std::int64_t>{1, 0, -1, 0, 1}));
  EXPECT_EQ(euler_phi(12), 4);
  EXPECT_EQ(euler_phi(7), 6);
}

TEST(Cyclotomic, RootsOfUnity) {
  auto i = CycloScalar::root_of_unity(4, 1);
  EXPECT_EQ(i * i, CycloScalar(-1L));
  EXPECT_EQ(CycloScalar::root_of_unity(8, 2), i);
  EXPECT_EQ(CycloScalar::root_of_unity(2, 1), CycloScalar(-1L));
  EXPECT_EQ(CycloScalar::root_of_unity(4, -1), -i);
  auto z6 = CycloScalar::root_of_unity(6, 1);
  EXPECT_EQ(z6.conductor(), 3);
  EXPECT_EQ(z6, -CycloScalar::root_of_unity(3, 2));
  CycloScalar p = 1;
  for (int k = 0; k < 6; ++k) p *= z6;
  EXPECT_TRUE(p.is_one());
}

TEST(Cyclotomic, ArithmeticAgreesWithComplexNumbers) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    auto a = random_element(rng), b = random_element(rng);
    EXPECT_LT(std::abs(numeric(a + b) - (numeric(a) + numeric(b))), 1e-9);
    EXPECT_LT(std::abs(numeric(a * b) - numeric(a) * numeric(b)), 1e-9);
    if (!b.is_zero()) EXPECT_LT(std::abs(numeric(a / b) - numeric(a) / numeric(b)), 1e-9);
  }
}

TEST(Cyclotomic, FieldAxiomsExact) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_element(rng), b = random_element(rng), c = random_element(rng);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    if (!a.is_zero()) EXPECT_TRUE((a * a.inverse()).is_one());
    EXPECT_TRUE((a - a).is_zero());
  }
}

TEST(Cyclotomic, LiftThenProjectIsIdentity) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_element(rng);
    for (int m : {2, 3, 5}) {
      auto up = a.lifted(a.conductor() * m);
      EXPECT_EQ(up, a);
      auto back = up.project_coeffs(a.conductor());
      ASSERT_TRUE(back.has_value());
      EXPECT_EQ(*back, a.coeffs());
    }
  }
  EXPECT_FALSE(CycloScalar::root_of_unity(8, 1).project_coeffs(4).has_value());
}

TEST(Cyclotomic, CanonicalText) {
  EXPECT_EQ(CycloScalar(Rational(3, 2)).to_string(), "3/2");
  EXPECT_EQ(CycloScalar(-2L).to_string(), "-2");
  EXPECT_EQ(CycloScalar::root_of_unity(4, 1).to_string(), "zeta(4)^1");
  EXPECT_EQ((-CycloScalar::root_of_unity(4, 1)).to_string(), "-zeta(4)^1");
  EXPECT_EQ(CycloScalar::root_of_unity(8, 2).lifted(8).to_string(), "zeta(4)^1");
  EXPECT_EQ((CycloScalar(Rational(1, 2)) + 3 * CycloScalar::root_of_unity(8, 1)).to_string(), "(1/2 + 3 * zeta(8)^1)");
  EXPECT_EQ(CycloScalar().to_string(), "0");
}

TEST(Cyclotomic, ParseRational) {
  EXPECT_EQ(parse_rational("-6/4"), Rational(-3, 2));
  EXPECT_EQ(parse_rational("7"), Rational(7));
  EXPECT_THROW(parse_rational("1/0"), Error);
  EXPECT_THROW(parse_rational("a/2"), Error);
  EXPECT_THROW(CycloScalar().inverse(), Error);
}
