#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rhocalc/grading.hpp"

namespace rhocalc {

enum class VarKind {
  Base,        // degree 0 manifold coordinate, Laurent if invertible
  FormalEven,  // generator of the ideal I, even parity
  FormalOdd,   // generator of I, odd parity, squares to zero
  Parameter,   // degree 0 central unit that is not a coordinate (e.g. tau)
};

const char* to_string(VarKind kind);

struct Variable {
  std::string name;
  Degree degree;
  VarKind kind = VarKind::Base;
  bool invertible = false;
  /// Even formal variable with eps^2 = 0 (dual-number parameter).
  bool nilpotent = false;

  bool is_formal() const noexcept { return kind == VarKind::FormalEven || kind == VarKind::FormalOdd; }
  bool is_coordinate() const noexcept { return kind != VarKind::Parameter; }
  bool squares_to_zero() const noexcept { return kind == VarKind::FormalOdd || nilpotent; }

  friend bool operator==(const Variable&, const Variable&) = default;
};

class Context;
using ContextPtr = std::shared_ptr<const Context>;

/// Variable table plus commutation factor. Immutable once made; the variable
/// order is the normal-ordering order.
class Context {
 public:
  /// Validates kinds against degrees and parities; throws ConstraintViolation.
  static ContextPtr make(CommutationFactor factor, std::vector<Variable> vars,
                         std::optional<int> truncation = std::nullopt);

  const CommutationFactor& factor() const noexcept { return factor_; }
  const std::vector<Variable>& vars() const noexcept { return vars_; }
  std::size_t size() const noexcept { return vars_.size(); }
  const Variable& var(std::size_t k) const { return vars_.at(k); }
  std::optional<std::size_t> index_of(const std::string& name) const;
  std::size_t require(const std::string& name) const;
  std::optional<int> truncation() const noexcept { return truncation_; }
  int conductor() const noexcept { return conductor_; }

  /// Exponent k with rho(|x_i|, |x_j|) = zeta_N^k.
  std::int64_t phase(std::size_t i, std::size_t j) const { return phase_[i * vars_.size() + j]; }
  const CycloScalar& root(std::int64_t k) const;
  CycloScalar rho(const Degree& a, const Degree& b) const { return factor_.eval(a, b); }
  bool is_odd(const Degree& d) const { return factor_.is_odd(d); }
  Degree zero_degree() const { return factor_.zero(); }

  ContextPtr with_truncation(std::optional<int> t) const;
  /// Copy with extra variables appended after the existing ones.
  ContextPtr extended_with(const std::vector<Variable>& extra) const;

  /// Indices of coordinate (non-parameter) variables in order.
  std::vector<std::size_t> coordinates() const;

  std::string describe() const;

  friend bool operator==(const Context& a, const Context& b) {
    return a.factor_ == b.factor_ && a.vars_ == b.vars_ && a.truncation_ == b.truncation_;
  }

 private:
  Context() = default;

  CommutationFactor factor_;
  std::vector<Variable> vars_;
  std::optional<int> truncation_;
  int conductor_ = 1;
  std::vector<std::int64_t> phase_;
  std::vector<CycloScalar> roots_;
};

bool same_context(const ContextPtr& a, const ContextPtr& b);
void require_same_context(const ContextPtr& a, const ContextPtr& b, const char* where);

}  // namespace rhocalc
