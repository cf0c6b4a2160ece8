#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rhocalc/poly.hpp"

namespace rhocalc {

/// X = sum_a X^a d/dx^a over the coordinate variables of a context. Every
/// component is homogeneous of degree |X| + |x^a|; parameters are annihilated.
class Derivation {
 public:
  Derivation() = default;
  /// Zero derivation of the given degree.
  Derivation(ContextPtr ctx, Degree degree);

  /// Validates component degrees (DegreeMismatch / NotHomogeneous).
  static Derivation from_components(ContextPtr ctx, Degree degree, const std::map<std::size_t, GradedPoly>& comps);
  /// As above, inferring the degree from the first nonzero component.
  static Derivation from_components(ContextPtr ctx, const std::map<std::size_t, GradedPoly>& comps);
  static Derivation partial(ContextPtr ctx, std::size_t a);

  const ContextPtr& context() const noexcept { return ctx_; }
  const Degree& degree() const noexcept { return degree_; }
  const GradedPoly& component(std::size_t a) const { return comps_.at(a); }
  const std::vector<GradedPoly>& components() const noexcept { return comps_; }
  bool is_zero() const;

  GradedPoly operator()(const GradedPoly& f) const;

  Derivation operator-() const;
  Derivation& operator+=(const Derivation& rhs);
  Derivation& operator-=(const Derivation& rhs);
  friend Derivation operator+(Derivation a, const Derivation& b) { return a += b; }
  friend Derivation operator-(Derivation a, const Derivation& b) { return a -= b; }
  friend Derivation operator*(const CycloScalar& c, const Derivation& x);
  /// (fX)(g) = f X(g), degree |f| + |X|.
  friend Derivation operator*(const GradedPoly& f, const Derivation& x);

  friend bool operator==(const Derivation& a, const Derivation& b);

  /// "X^1 * d/dx1 + ..." in variable order; "0" when zero.
  std::string to_string() const;

 private:
  ContextPtr ctx_;
  Degree degree_;
  std::vector<GradedPoly> comps_;
};

inline std::ostream& operator<<(std::ostream& os, const Derivation& x) { return os << x.to_string(); }

/// d f / d x^a by the closed form for normal-ordered monomials.
GradedPoly partial_derivative(const GradedPoly& f, std::size_t a);

GradedPoly apply(const Derivation& x, const GradedPoly& f);

/// [X, Y]_rho with components X(Y^c) - rho(|X|,|Y|) Y(X^c).
Derivation commutator(const Derivation& x, const Derivation& y);

struct TaylorCheck {
  GradedPoly lhs;  // f(x^a + eps X^a)
  GradedPoly rhs;  // f + eps sum X^a df/dx^a
  bool holds = false;
};

/// Adjoins a nilpotent eps of degree -|X| after the existing variables and
/// compares both sides of the infinitesimal Taylor formula.
TaylorCheck infinitesimal_taylor(const GradedPoly& f, const Derivation& x);

struct HomologicalReport {
  enum class Reason { Ok, Parity, Residual };
  bool homological = false;
  Reason reason = Reason::Ok;
  /// Generator x^a with Q(Q(x^a)) != 0, and that residual.
  std::optional<std::size_t> witness;
  GradedPoly residual;
};

const char* to_string(HomologicalReport::Reason r);

/// rho(|Q|,|Q|) = -1 and Q(Q(x^a)) = 0 on every generator.
HomologicalReport is_homological(const Derivation& q);

/// Basis e_1..e_m of a rho-Lie algebra with bracket of degree d:
/// [e_a, e_b] = sum_c gamma[a][b][c] e_c.
struct LieStructure {
  CommutationFactor factor;
  std::vector<Degree> degrees;
  Degree bracket_degree;
  std::vector<std::vector<std::vector<CycloScalar>>> gamma;

  std::size_t dim() const noexcept { return degrees.size(); }
  /// Degree compatibility (DegreeMismatch) and rho-antisymmetry (ConstraintViolation).
  void validate() const;
};

/// Context of the shifted dual coordinates xi^a, |xi^a|' = (1, -|e_a|) under
/// the extended factor, and Q = 1/2 sum rho(|e_b|,|e_a|) gamma_ab^c xi^a xi^b d/dxi^c
/// on it (the plain 1/2 sum gamma_ab^c xi^a xi^b when all those rho are 1).
Derivation ce_differential(const LieStructure& lie, const std::vector<std::string>& names = {});

}  // namespace rhocalc
