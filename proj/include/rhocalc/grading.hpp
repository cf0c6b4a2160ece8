#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rhocalc/cyclo.hpp"

namespace rhocalc {

/// G = Z^r + Z/n_1 + ... + Z/n_t. Generators are ordered free first.
struct GroupSpec {
  int free_rank = 0;
  std::vector<int> torsion;

  GroupSpec() = default;
  GroupSpec(int r, std::vector<int> torsion_orders);

  int rank() const noexcept { return free_rank + static_cast<int>(torsion.size()); }
  /// 0 for free generators, n_k for torsion ones.
  int modulus(int generator) const;
  /// Z x G with the new free generator placed first.
  GroupSpec extended() const;
  std::string to_string() const;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

class Degree {
 public:
  Degree() = default;
  /// Zero degree of the group.
  explicit Degree(const GroupSpec& g);
  /// Components are reduced into [0, n_k) for torsion generators.
  Degree(const GroupSpec& g, std::vector<std::int64_t> comps);

  const std::vector<std::int64_t>& comps() const noexcept { return comps_; }
  std::size_t size() const noexcept { return comps_.size(); }
  std::int64_t operator[](std::size_t k) const { return comps_[k]; }
  bool is_zero() const;

  Degree operator-() const;
  Degree& operator+=(const Degree& rhs);
  Degree& operator-=(const Degree& rhs);
  friend Degree operator+(Degree a, const Degree& b) { return a += b; }
  friend Degree operator-(Degree a, const Degree& b) { return a -= b; }
  Degree scaled(std::int64_t k) const;

  /// (s, i) in Z x G.
  Degree prepended(std::int64_t s) const;
  /// Drops the first component (inverse of prepended).
  Degree tail() const;

  std::string to_string() const;

  friend bool operator==(const Degree& a, const Degree& b) { return a.comps_ == b.comps_; }
  friend auto operator<=>(const Degree& a, const Degree& b) { return a.comps_ <=> b.comps_; }

 private:
  void reduce();

  std::vector<std::int64_t> comps_;
  std::vector<int> moduli_;
};

inline std::ostream& operator<<(std::ostream& os, const Degree& d) { return os << d.to_string(); }

enum class Parity { Even, Odd };

class CommutationFactor {
 public:
  CommutationFactor() = default;

  /// Checks the diagonal, antisymmetry and torsion constraints, in that
  /// order, and throws ConstraintViolation naming the first failure.
  static CommutationFactor validate(const GroupSpec& group, std::vector<std::vector<Rational>> q);

  static CommutationFactor trivial(const GroupSpec& group);
  /// rho(i, j) = (-1)^{(sum i)(sum j)}.
  static CommutationFactor super(const GroupSpec& group);
  /// Free group Z^m with phase matrix theta.
  static CommutationFactor torus(const std::vector<std::vector<Rational>>& theta);

  const GroupSpec& group() const noexcept { return group_; }
  const std::vector<std::vector<Rational>>& phases() const noexcept { return q_; }
  /// lcm of the phase denominators; every value of rho is an N-th root of unity.
  int conductor() const noexcept { return conductor_; }

  /// k with rho(i, j) = zeta_N^k, 0 <= k < N.
  std::int64_t exponent(const Degree& i, const Degree& j) const;
  CycloScalar eval(const Degree& i, const Degree& j) const;
  Parity parity(const Degree& i) const;
  bool is_odd(const Degree& i) const { return parity(i) == Parity::Odd; }

  CommutationFactor extend_prime() const;

  Degree zero() const { return Degree(group_); }
  Degree degree(std::vector<std::int64_t> comps) const { return Degree(group_, std::move(comps)); }

  /// {"free_rank":r,"torsion":[..],"phase":[["p/q",..],..]}
  std::string to_json() const;

  friend bool operator==(const CommutationFactor& a, const CommutationFactor& b) {
    return a.group_ == b.group_ && a.q_ == b.q_;
  }

 private:
  GroupSpec group_;
  std::vector<std::vector<Rational>> q_;
  std::vector<std::vector<std::int64_t>> scaled_;  // q * conductor
  int conductor_ = 1;
};

}  // namespace rhocalc
