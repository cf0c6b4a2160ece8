#pragma once

#include <string>
#include <vector>

#include "rhocalc/poly.hpp"

namespace rhocalc {

struct DegreeTuple {
  enum class Kind { Even, Odd, Split, Mixed };

  std::vector<Degree> degs;

  std::size_t size() const noexcept { return degs.size(); }
  const Degree& operator[](std::size_t k) const { return degs[k]; }
  DegreeTuple negated() const;
  DegreeTuple slice(std::size_t from, std::size_t to) const;
  DegreeTuple concat(const DegreeTuple& other) const;
  /// Even: all even; Odd: all odd; Split: evens followed by odds (both
  /// present); Mixed otherwise. The empty tuple is Even.
  Kind classify(const CommutationFactor& f) const;
  /// Number of leading even entries (meaningful for Even/Odd/Split).
  std::size_t even_count(const CommutationFactor& f) const;
  std::string to_string() const;

  friend bool operator==(const DegreeTuple&, const DegreeTuple&) = default;
};

/// Element of M_d(I x J; A): |f_kl| = i_k - j_l + d for every nonzero entry.
class GradedMatrix {
 public:
  GradedMatrix() = default;
  /// Zero matrix.
  GradedMatrix(ContextPtr ctx, DegreeTuple rows, DegreeTuple cols, Degree degree);
  /// Checks the grading of every entry (GradingViolation, ShapeMismatch).
  static GradedMatrix make(ContextPtr ctx, DegreeTuple rows, DegreeTuple cols, Degree degree,
                           std::vector<GradedPoly> entries);
  static GradedMatrix identity(ContextPtr ctx, DegreeTuple rows);

  const ContextPtr& context() const noexcept { return ctx_; }
  const DegreeTuple& rows() const noexcept { return rows_; }
  const DegreeTuple& cols() const noexcept { return cols_; }
  const Degree& degree() const noexcept { return degree_; }
  std::size_t nrows() const noexcept { return rows_.size(); }
  std::size_t ncols() const noexcept { return cols_.size(); }
  const GradedPoly& at(std::size_t k, std::size_t l) const { return entries_[k * ncols() + l]; }
  /// Replaces an entry, re-checking its grading.
  void set(std::size_t k, std::size_t l, GradedPoly f);
  bool is_square() const noexcept { return nrows() == ncols() && rows_ == cols_; }
  bool is_zero() const;

  GradedMatrix block(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) const;
  /// Entrywise I-free part (a degree-0 matrix stays graded).
  GradedMatrix free_part() const;

  friend GradedMatrix operator*(const GradedMatrix& a, const GradedMatrix& b);
  friend GradedMatrix operator+(const GradedMatrix& a, const GradedMatrix& b);
  friend GradedMatrix operator-(const GradedMatrix& a, const GradedMatrix& b);
  GradedMatrix operator-() const;
  friend bool operator==(const GradedMatrix& a, const GradedMatrix& b);

  std::string to_string() const;

 private:
  void check_entry(std::size_t k, std::size_t l) const;

  ContextPtr ctx_;
  DegreeTuple rows_, cols_;
  Degree degree_;
  std::vector<GradedPoly> entries_;
};

inline std::ostream& operator<<(std::ostream& os, const GradedMatrix& m) { return os << m.to_string(); }

/// gF = (rho(i_k, |g|) g f_kl).
GradedMatrix left_act(const GradedPoly& g, const GradedMatrix& f);
/// Fg = (rho(j_l, |g|) f_kl g).
GradedMatrix right_act(const GradedMatrix& f, const GradedPoly& g);
/// g_lk = rho(i_k, j_l - i_k) f_kl, an element of M((-J) x (-I)).
GradedMatrix transpose(const GradedMatrix& f);

/// Permutation expansion over all n! bijections; I must be all even or all
/// odd and F of degree 0 (MixedParity, NonzeroDegree).
GradedPoly rho_det(const GradedMatrix& f);

/// Inverse of a square degree-0 matrix via its I-free part. Throws
/// NotInvertible when the free part's determinant is not a Laurent unit.
GradedMatrix inverse(const GradedMatrix& f);
bool is_invertible(const GradedMatrix& f);

/// Schur-complement formula for split I; 0 when F00 or F11 is singular.
GradedPoly rho_ber(const GradedMatrix& f);
/// rho(F00) rho_det(F11 - F10 F00^{-1} F01)^{-1}, the alternate form.
GradedPoly rho_ber_alternate(const GradedMatrix& f);
/// P F P^{-1} for the stable permutation P putting even degrees first.
GradedMatrix split_reordered(const GradedMatrix& f);
/// rho_ber of split_reordered(f); conjugating by the degree-0 permutation
/// matrix does not change the Berezinian, so any tuple order is accepted.
GradedPoly rho_ber_reordered(const GradedMatrix& f);
GradedPoly rho_tr(const GradedMatrix& f);
/// Plain sum of diagonal entries.
GradedPoly trace(const GradedMatrix& f);

struct PropertyResult {
  std::string name;
  bool applicable = true;
  bool pass = true;
  std::string detail;
};

/// Lemma properties of rho_det for F, G in M_0(I): (a) invertible implies a
/// unit, (b) multiplicativity, (c) row additivity, (d) row scaling by c in
/// A_0, (e) repeated rows give 0. Row k0 and the pair for (e) are chosen by
/// the caller; c defaults to rho_det(G).
std::vector<PropertyResult> rho_det_properties(const GradedMatrix& f, const GradedMatrix& g, std::size_t k0 = 0,
                                               std::size_t dup_from = 0, std::size_t dup_to = 1);

struct Linearization {
  GradedPoly lhs;  // rhoBer(1 + eps F) (or rho_det)
  GradedPoly rhs;  // 1 + rho_tr(eps F) (or 1 + tr(eps F))
  bool holds = false;
  std::string eps_name;
};

/// Adjoins eps of degree -|F| (eps^2 = 0) and compares rhoBer(1 + eps F)
/// with 1 + rho_tr(eps F). Needs split I.
Linearization linearize_ber(const GradedMatrix& f);
/// rho_det(1 + eps F) against 1 + tr(eps F). Needs I even or odd.
Linearization linearize_det(const GradedMatrix& f);

}  // namespace rhocalc
