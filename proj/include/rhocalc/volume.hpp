#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rhocalc/geometry.hpp"

namespace rhocalc {

/// Berezin volume form D(x) s(x) given chart by chart. Densities are degree 0
/// and invertible; on every overlap s_x = rhoBer(J'_xy) (s_y o t).
struct VolumeForm {
  Atlas atlas;
  std::vector<GradedPoly> s;

  /// Throws NotInvertibleDensity or OverlapMismatch.
  static VolumeForm make(Atlas atlas, std::vector<GradedPoly> s);
  static VolumeForm single(Chart c, GradedPoly s);
  /// Densities s_x exp(h_x).
  VolumeForm times_exp(const std::vector<GradedPoly>& h) const;
};

/// Coefficient of D(x) in L_X(D(x) s): sum rho(|x^a|, |x^a| + |X|) d/dx^a (X^a s).
GradedPoly lie_derivative_volume(const Derivation& x, const GradedPoly& s);
/// s^{-1} times the coefficient above. Throws NotInvertibleDensity.
GradedPoly divergence(const Derivation& x, const GradedPoly& s);
/// Single-chart volume form.
GradedPoly divergence(const Derivation& x, const VolumeForm& vol);
/// One field per chart; checks that the fields and the divergences agree on
/// every overlap (OverlapMismatch).
std::vector<GradedPoly> divergence(const std::vector<Derivation>& xs, const VolumeForm& vol);

/// Divergence Proposition: (i) Div(fX), (ii) Div_{vol exp g} X with |g| = 0,
/// (iii) Div [X,Y]. g must have zero I-free part so exp(g) is defined.
std::vector<PropertyResult> divergence_properties(const Derivation& x, const Derivation& y, const GradedPoly& f,
                                                  const GradedPoly& g, const GradedPoly& s);

enum class Verdict { Exact, NotExactDegreeComplete, Inconclusive };
const char* to_string(Verdict v);

struct ExactnessResult {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<GradedPoly> preimage;
  std::string certificate;
  /// Monomials offered to the linear solve over all homogeneous parts.
  std::size_t candidates = 0;
};

/// Decides c = Q(h) on a finite monomial span. The rational weight vectors w
/// (with shift delta) making every term of Q homogeneous split c into parts;
/// a preimage of a part has weight w(c) - delta and G-degree |c| - |Q|. When
/// those constraints pin down all non-square-zero exponents for each choice
/// of square-zero exponents, the candidate list is complete and failure is
/// reported as NotExactDegreeComplete. Otherwise monomials with total
/// absolute exponent <= degree_bound are searched and failure is
/// Inconclusive. Throws NotClosed when Q(c) != 0.
ExactnessResult exactness_solve(const GradedPoly& c, const Derivation& q, int degree_bound);

struct ModularClassReport {
  GradedPoly representative;  // Div_vol Q
  GradedPoly closedness;      // Q(Div_vol Q)
  bool closed = false;
  ExactnessResult exactness;
};

/// Single-chart volume form; Q must be zero or homological (NotHomological).
ModularClassReport modular_class(const Derivation& q, const VolumeForm& vol, int degree_bound);

struct EquivalenceResult {
  bool equivalent = false;
  /// Per chart h with s2 = s1 exp(h), when equivalent.
  std::vector<GradedPoly> h;
  std::string reason;
};

/// Requires the same charts. Succeeds when every ratio s2/s1 has I-free part
/// exactly 1 (so its log exists in the model) and the logs agree on overlaps.
EquivalenceResult volumes_equivalent(const VolumeForm& v1, const VolumeForm& v2);

/// Density of the induced volume on [-i]T*: s^2 when rho(i,i) = -1, else 1.
GradedPoly lifted_density(const ShiftedCotangent& t, const GradedPoly& s);

// Built-in scenarios reproducing the worked examples.

struct ScenarioClass {
  std::string label;
  ModularClassReport report;
  GradedPoly expected;
  std::optional<Verdict> expected_verdict;
  bool matches = false;
};

struct ScenarioResult {
  std::string name;
  std::string description;
  std::vector<ScenarioClass> classes;
  /// Extra named checks (equivalence verdicts, scaling identities).
  std::vector<std::pair<std::string, bool>> checks;

  bool passed() const;
};

/// Torus A_Theta with m generators, its BRST field Q = -tau sum eta^a u^a d/du^a
/// (tau standing for 2 pi sqrt(-1)) and the trivial volume.
ScenarioResult torus_scenario(const std::vector<std::vector<Rational>>& theta, int degree_bound = 4);
/// de Rham d on Pi TM over a super chart (x, xi) with volume 1.
ScenarioResult de_rham_scenario(int degree_bound = 4);
/// Pi T C^x with Q = dz d/dz and the volumes 1 and z.
ScenarioResult cstar_scenario(int degree_bound = 4);
/// [-i]T* over Pi T C^x with the volume z, for i in the Z-grading of dz.
ScenarioResult cotangent_lift_scenario(std::int64_t i, int degree_bound = 4);

/// torus (m = 2, theta12 = 1/4), de Rham, C^x, and the lift for i = 2 and 1.
std::vector<ScenarioResult> builtin_scenarios(int degree_bound = 4);

}  // namespace rhocalc
