#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rhocalc/derivation.hpp"
#include "rhocalc/matrix.hpp"

namespace rhocalc {

/// Coordinate neighbourhood: the coordinate variables of its context, in
/// order, are x^1..x^{n+m}; parameters ride along but are not coordinates.
struct Chart {
  std::string name;
  ContextPtr ctx;

  std::vector<std::size_t> coordinates() const { return ctx->coordinates(); }
  /// (|x^1|, ..., |x^{n+m}|).
  DegreeTuple tuple() const;
  std::size_t base_count() const;
  std::size_t formal_count() const;
};

/// y = y(x): images[k] is the image of target variable k, written in the
/// source chart's variables. Parameters map to the same-named parameter.
class TransitionMap {
 public:
  TransitionMap() = default;
  /// Missing parameter images default to the same-named source parameter
  /// (ResolveError otherwise). Checks degrees (GradingViolation) and that
  /// the Jacobian is invertible (NotInvertible).
  static TransitionMap make(Chart source, Chart target, std::map<std::string, GradedPoly> images);
  static TransitionMap identity(const Chart& c);

  const Chart& source() const noexcept { return source_; }
  const Chart& target() const noexcept { return target_; }
  const std::vector<GradedPoly>& images() const noexcept { return images_; }
  const GradedPoly& image(std::size_t k) const { return images_.at(k); }

  /// f(y) -> f(y(x)).
  GradedPoly pull(const GradedPoly& f) const;
  GradedMatrix pull(const GradedMatrix& m) const;
  /// Derivation on the target pushed into source variables component-wise
  /// (each X^a pulled back); a convenience for building per-chart data.
  std::vector<GradedPoly> pull_components(const Derivation& x) const;

 private:
  Chart source_, target_;
  std::vector<GradedPoly> images_;
};

/// (t after s): first s then t, a map from s.source() to t.target().
TransitionMap compose(const TransitionMap& t, const TransitionMap& s);

/// J'[a][b] = rho(|x^b|, |y^a| - |x^b|) dy^a/dx^b, a square degree-0 matrix
/// over the chart tuple in the source context. It satisfies the chain rule
/// J'(t o s) = s^*(J'(t)) J'(s), and rho_ber(J') is the Berezinian of the
/// coordinate change.
GradedMatrix jacobian(const TransitionMap& t);

struct CheckReport {
  bool holds = true;
  std::size_t checked = 0;
  std::vector<std::string> failures;

  void record(bool ok, const std::string& what);
};

/// d/dx^b (f o y) = sum_a dy^a/dx^b (df/dy^a) o y for every source coordinate
/// b, on all target generators and `samples` random target polynomials.
CheckReport chain_rule_check(const TransitionMap& t, int samples = 20, unsigned seed = 1);

/// The same vector field in target coordinates: X_V(y^k) = back^*(X_U(y^k(x))),
/// where back is the inverse map V -> U.
Derivation push_forward(const Derivation& x, const TransitionMap& t, const TransitionMap& back);

/// True when X_V written in V's coordinates is X_U on the overlap.
bool fields_agree(const Derivation& xu, const Derivation& xv, const TransitionMap& t);

/// Finite atlas: charts plus transition maps keyed by (source, target).
struct Atlas {
  std::vector<Chart> charts;
  std::map<std::pair<std::size_t, std::size_t>, TransitionMap> maps;

  static Atlas single(Chart c);
  std::size_t index_of(const std::string& name) const;
  /// Identity for (a, a); nullopt when the overlap has no map.
  std::optional<TransitionMap> find(std::size_t from, std::size_t to) const;
  void add(TransitionMap t);
};

/// Vector bundle presented by fiber degrees and transitions xi_b = g_ab xi_a,
/// where g_ab lives in chart a's variables. The Pi-shift is a parity flag:
/// the effective fiber degrees are (1, i_k) under extend_prime when set.
struct BundleSpec {
  std::string name;
  Atlas atlas;
  DegreeTuple fiber;
  bool pi = false;
  std::map<std::pair<std::size_t, std::size_t>, GradedMatrix> g;

  std::size_t rank() const noexcept { return fiber.size(); }
  /// Fiber degrees in Z x G under extend_prime (first component 0 or 1).
  std::vector<Degree> effective_fiber() const;

  friend bool operator==(const BundleSpec& a, const BundleSpec& b);
};

BundleSpec tangent(const Atlas& atlas);
/// Transitions transpose(inverse(g_ab)) of the tangent ones, fiber -|x^a|.
BundleSpec cotangent(const Atlas& atlas);
BundleSpec shift_pi(const BundleSpec& b);
/// Fiber degrees i_k - i; transitions unchanged.
BundleSpec shift_degree(const BundleSpec& b, const Degree& i);

/// g_aa = 1, g_ba g_ab = 1 and g_ca g_bc g_ab = 1 in chart a's variables
/// (composition order of xi_b = g_ab xi_a), for every available overlap.
CheckReport cocycle_check(const BundleSpec& b);

/// Functions on Pi TM over one chart: x^a of degree (0, |x^a|) and dx^a of
/// degree (1, |x^a|) under the extended factor, with d = sum dx^a d/dx^a.
struct DeRham {
  ContextPtr base;
  ContextPtr forms;
  /// Index of dx^a in `forms` for each base coordinate index a.
  std::map<std::size_t, std::size_t> dx;
  Derivation d;

  GradedPoly lift(const GradedPoly& f) const;
  Degree lift(const Degree& deg, std::int64_t s = 0) const { return deg.prepended(s); }
};

DeRham de_rham(const Chart& c);
DeRham de_rham(const ContextPtr& base);
/// L_X = sum (dx^a dX^b/dx^a d/ddx^b + X^a d/dx^a), degree (0, |X|).
Derivation lie_derivative(const DeRham& dr, const Derivation& x);
/// i_X = sum X^a d/ddx^a, degree (-1, |X|).
Derivation interior(const DeRham& dr, const Derivation& x);

/// Cartan identities on Pi TM as exact derivation equalities:
/// d^2 = 0, [L_X, L_Y] = L_[X,Y], [d, L_X] = 0, [d, i_X] = L_X and
/// [i_X, i_Y] = 0. Derivation brackets are compared component-wise and, as a
/// second layer, applied to `samples` random forms.
CheckReport cartan_check(const DeRham& dr, const Derivation& x, const Derivation& y, int samples = 20,
                         unsigned seed = 1);

/// Checks on d + L_Q for a homological Q. The bracket [d + L_Q, d + L_Q] is
/// extended bilinearly over the two homogeneous parts. Under
/// rho'((s,i),(t,j)) = (-1)^{st} rho(i,j) the cross terms cancel, so the
/// bracket vanishes; the composite square equals 2 d L_Q and is reported
/// separately.
struct DifferentialSumReport {
  bool d_squared_zero = false;
  bool lq_squared_zero = false;
  bool bracket_d_lq_zero = false;
  /// [d + L_Q, d + L_Q] extended bilinearly over the two homogeneous parts.
  bool bilinear_bracket_zero = false;
  /// (d + L_Q)(d + L_Q) as an operator on generators.
  bool composite_square_zero = false;
  /// The composite square equals 2 d L_Q on generators.
  bool composite_is_twice_d_lq = false;
};

DifferentialSumReport differential_sum_check(const DeRham& dr, const Derivation& q, int samples = 20,
                                             unsigned seed = 1);

/// [-i]T* over a base context: x^a plus x*_a of degree -|x^a| - i (named
/// "<x>_star"), odd formal when that degree is odd, even formal otherwise.
struct ShiftedCotangent {
  ContextPtr base;
  ContextPtr ctx;
  Degree i;
  /// Index of x*_a in `ctx` for each base coordinate index a.
  std::map<std::size_t, std::size_t> star;

  GradedPoly lift(const GradedPoly& f) const { return f.widened(ctx); }
};

ShiftedCotangent shifted_cotangent(const ContextPtr& base, const Degree& i);

/// Degree-i Schouten bracket, summing over every coordinate a:
/// rho(|f|+|x^a|+i, |x^a|+i) df/dx*_a dg/dx^a - rho(|x^a|, |f|+i) df/dx^a dg/dx*_a.
/// Throws NotHomogeneous when f is not homogeneous.
GradedPoly schouten(const ShiftedCotangent& t, const GradedPoly& f, const GradedPoly& g);

/// The coordinate form sum rho(|z^a|, |f|-|z^a|) df/dz^a [[z^a, z^b]] dg/dz^b
/// over all coordinates z of the doubled context.
GradedPoly schouten_coordinate_form(const ShiftedCotangent& t, const GradedPoly& f, const GradedPoly& g);

/// Proposition properties on homogeneous f, g, h: (i) degree, (ii)
/// antisymmetry, (iii) Jacobi, (iv) Leibniz, then the coordinate form.
/// Under truncation T, (iii) and (iv) are compared modulo I^{T-1}.
std::vector<PropertyResult> schouten_properties(const ShiftedCotangent& t, const GradedPoly& f, const GradedPoly& g,
                                                const GradedPoly& h);

struct LiftedQ {
  ShiftedCotangent t;
  GradedPoly f_q;
  Derivation q_tilde;
};

/// f_Q = sum Q^a x*_a and Q~ = [[f_Q, -]]. Throws NotHomological unless Q
/// is zero or homological.
LiftedQ lift_fq(const Derivation& q, const Degree& i);

}  // namespace rhocalc
