#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rhocalc/context.hpp"

namespace rhocalc {

using Monomial = std::vector<int>;

/// Graded-lex: ascending total exponent, then lexicographically greater first.
struct MonomialOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Normal-ordered element of the rho-commutative algebra of a context.
/// Zero coefficients are never stored; when the context truncates, terms of
/// I-adic order above T are dropped after every operation.
class GradedPoly {
 public:
  using TermMap = std::map<Monomial, CycloScalar, MonomialOrder>;

  GradedPoly() = default;
  explicit GradedPoly(ContextPtr ctx);

  static GradedPoly constant(ContextPtr ctx, const CycloScalar& c);
  static GradedPoly variable(ContextPtr ctx, std::size_t index, int power = 1);
  static GradedPoly variable(ContextPtr ctx, const std::string& name, int power = 1);
  static GradedPoly monomial(ContextPtr ctx, Monomial exps, const CycloScalar& c = CycloScalar(1L));

  const ContextPtr& context() const noexcept { return ctx_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }
  /// Coefficient of the empty monomial.
  CycloScalar constant_term() const;
  bool is_constant() const;

  Degree monomial_degree(const Monomial& m) const;
  int ideal_order(const Monomial& m) const;
  /// Smallest I-adic order among terms, nullopt for zero.
  std::optional<int> min_ideal_order() const;

  bool is_homogeneous() const;
  /// Degree of a homogeneous element; zero degree for 0. Throws NotHomogeneous.
  Degree degree() const;
  std::vector<Degree> support_degrees() const;
  GradedPoly homogeneous_part(const Degree& d) const;
  /// Terms of I-adic order 0.
  GradedPoly free_part() const;
  /// Terms of I-adic order <= t.
  GradedPoly truncated(int t) const;
  /// Same terms reinterpreted in another context with identical variables.
  GradedPoly rebased(ContextPtr ctx) const;
  /// Embedding into a context whose variable list extends this one.
  GradedPoly widened(ContextPtr ctx) const;

  void add_term(const Monomial& m, const CycloScalar& c);

  GradedPoly operator-() const;
  GradedPoly& operator+=(const GradedPoly& rhs);
  GradedPoly& operator-=(const GradedPoly& rhs);
  GradedPoly& operator*=(const GradedPoly& rhs);
  GradedPoly& operator*=(const CycloScalar& c);
  friend GradedPoly operator+(GradedPoly a, const GradedPoly& b) { return a += b; }
  friend GradedPoly operator-(GradedPoly a, const GradedPoly& b) { return a -= b; }
  friend GradedPoly operator*(const GradedPoly& a, const GradedPoly& b);
  friend GradedPoly operator*(GradedPoly a, const CycloScalar& c) { return a *= c; }
  friend GradedPoly operator*(const CycloScalar& c, GradedPoly a) { return a *= c; }

  friend bool operator==(const GradedPoly& a, const GradedPoly& b);
  friend bool operator!=(const GradedPoly& a, const GradedPoly& b) { return !(a == b); }

  /// Canonical text, e.g. "3/2 * x^2 * xi * eta - tau * u1".
  std::string to_string() const;

 private:
  ContextPtr ctx_;
  TermMap terms_;
};

inline std::ostream& operator<<(std::ostream& os, const GradedPoly& f) { return os << f.to_string(); }

/// Product of two normal-ordered monomials: the reordered exponent vector and
/// the phase exponent k (scalar zeta_N^k), or nullopt if the product vanishes.
std::optional<std::pair<Monomial, std::int64_t>> multiply_monomials(const Context& ctx, const Monomial& a,
                                                                    const Monomial& b);

/// One factor of a word to normalize: variable index and (possibly negative) power.
struct WordFactor {
  std::size_t var;
  int power;
};
/// Normal form of c * v_1^{p_1} ... v_k^{p_k}. Throws NegativePower.
GradedPoly normalize_word(const ContextPtr& ctx, const std::vector<WordFactor>& word, const CycloScalar& c = CycloScalar(1L));

GradedPoly pow(const GradedPoly& f, int k);
/// [f, g]_rho = fg - rho(|f|,|g|) gf. Throws NotHomogeneous.
GradedPoly rho_commutator(const GradedPoly& f, const GradedPoly& g);

/// Inverse of a degree-0 element whose I-free part is a scalar times a Laurent
/// monomial. Throws NotInvertible, NotHomogeneous, TruncationRequired.
GradedPoly invert(const GradedPoly& f);
/// Defined for degree-0 f with zero I-free part.
GradedPoly exp(const GradedPoly& f);
/// Defined for degree-0 f whose I-free part is exactly 1.
GradedPoly log(const GradedPoly& f);

/// Algebra map sending variable k to images[k] (an element of the target
/// context); negative powers use invert. Images must respect the commutation
/// relations for the result to be meaningful.
GradedPoly substitute(const GradedPoly& f, const ContextPtr& target, const std::vector<GradedPoly>& images);

/// Applies fn to every coefficient.
GradedPoly map_coefficients(const GradedPoly& f, const std::function<CycloScalar(const CycloScalar&)>& fn);

}  // namespace rhocalc
