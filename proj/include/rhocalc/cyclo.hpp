#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace rhocalc {

using Rational = mpq_class;

/// Parses "p", "-p" or "p/q" into a canonical rational. Throws
/// Error(SyntaxError) on malformed input or zero denominators.
Rational parse_rational(const std::string& text);
std::string rational_to_string(const Rational& q);

/// Integer coefficients of the n-th cyclotomic polynomial, lowest degree
/// first. Results are memoized.
const std::vector<std::int64_t>& cyclotomic_polynomial(int n);
int euler_phi(int n);

/// Exact element of the cyclotomic field Q(zeta_N), stored in the power basis
/// 1, zeta, ..., zeta^(phi(N)-1) and always reduced modulo Phi_N.
///
/// Values whose coefficients are all in degree 0 are collapsed to conductor 1,
/// and conductors congruent to 2 mod 4 never occur (Q(zeta_2m) = Q(zeta_m) for
/// odd m). Binary operations on mixed conductors lift both operands to the lcm.
class CycloScalar {
 public:
  CycloScalar() = default;
  CycloScalar(long value);  // NOLINT(google-explicit-constructor)
  CycloScalar(const Rational& value);  // NOLINT(google-explicit-constructor)

  /// zeta_n^k where zeta_n = exp(2 pi i / n).
  static CycloScalar root_of_unity(int n, std::int64_t k);

  int conductor() const noexcept { return conductor_; }
  const std::vector<Rational>& coeffs() const noexcept { return coeffs_; }

  bool is_zero() const noexcept { return coeffs_.empty(); }
  bool is_one() const;
  bool is_rational() const noexcept { return coeffs_.size() <= 1; }
  /// Only meaningful when is_rational().
  Rational rational_value() const;

  /// Same element written over Q(zeta_m); m must be a multiple of conductor().
  CycloScalar lifted(int m) const;
  /// Coefficient vector over Q(zeta_n) without conductor normalization, or
  /// nullopt when the element does not lie in that subfield.
  std::optional<std::vector<Rational>> project_coeffs(int n) const;

  CycloScalar inverse() const;

  CycloScalar operator-() const;
  CycloScalar& operator+=(const CycloScalar& rhs);
  CycloScalar& operator-=(const CycloScalar& rhs);
  CycloScalar& operator*=(const CycloScalar& rhs);
  CycloScalar& operator/=(const CycloScalar& rhs);

  friend CycloScalar operator+(CycloScalar a, const CycloScalar& b) { return a += b; }
  friend CycloScalar operator-(CycloScalar a, const CycloScalar& b) { return a -= b; }
  friend CycloScalar operator*(CycloScalar a, const CycloScalar& b) { return a *= b; }
  friend CycloScalar operator/(CycloScalar a, const CycloScalar& b) { return a /= b; }
  friend bool operator==(const CycloScalar& a, const CycloScalar& b);
  friend bool operator!=(const CycloScalar& a, const CycloScalar& b) { return !(a == b); }

  /// Canonical text: "3/2", "-zeta(4)^1", "(1/2 + 3*zeta(8)^1)".
  std::string to_string() const;
  /// True when to_string() needs no parentheses inside a product.
  bool is_atomic() const;

 private:
  CycloScalar(int conductor, std::vector<Rational> coeffs);
  void normalize();

  int conductor_ = 1;
  std::vector<Rational> coeffs_;
};

inline std::ostream& operator<<(std::ostream& os, const CycloScalar& s) { return os << s.to_string(); }

}  // namespace rhocalc
