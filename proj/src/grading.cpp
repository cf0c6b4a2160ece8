#include "rhocalc/grading.hpp"

#include <numeric>
#include <sstream>

#include "rhocalc/errors.hpp"

namespace rhocalc {

GroupSpec::GroupSpec(int r, std::vector<int> torsion_orders) : free_rank(r), torsion(std::move(torsion_orders)) {
  if (r < 0) fail(ErrorCode::ConstraintViolation, "free rank must be nonnegative");
  for (int n : torsion)
    if (n < 2) fail(ErrorCode::ConstraintViolation, "torsion order " + std::to_string(n) + " is below 2");
}

int GroupSpec::modulus(int generator) const {
  return generator < free_rank ? 0 : torsion.at(static_cast<std::size_t>(generator - free_rank));
}

GroupSpec GroupSpec::extended() const { return GroupSpec(free_rank + 1, torsion); }

std::string GroupSpec::to_string() const {
  if (rank() == 0) return "trivial";
  std::vector<std::string> parts;
  if (free_rank == 1) parts.push_back("Z");
  if (free_rank > 1) parts.push_back("Z^" + std::to_string(free_rank));
  for (int n : torsion) parts.push_back("Z/" + std::to_string(n));
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? " x " : "") + parts[k];
  return out;
}

Degree::Degree(const GroupSpec& g) : comps_(static_cast<std::size_t>(g.rank()), 0) {
  for (int a = 0; a < g.rank(); ++a) moduli_.push_back(g.modulus(a));
}

Degree::Degree(const GroupSpec& g, std::vector<std::int64_t> comps) : comps_(std::move(comps)) {
  if (comps_.size() != static_cast<std::size_t>(g.rank()))
    fail(ErrorCode::ConstraintViolation, "degree has " + std::to_string(comps_.size()) + " components, group rank is " +
                                             std::to_string(g.rank()));
  for (int a = 0; a < g.rank(); ++a) moduli_.push_back(g.modulus(a));
  reduce();
}

void Degree::reduce() {
  for (std::size_t k = 0; k < comps_.size(); ++k) {
    if (moduli_[k] == 0) continue;
    comps_[k] %= moduli_[k];
    if (comps_[k] < 0) comps_[k] += moduli_[k];
  }
}

bool Degree::is_zero() const {
  for (auto c : comps_)
    if (c != 0) return false;
  return true;
}

Degree Degree::operator-() const {
  Degree out = *this;
  for (auto& c : out.comps_) c = -c;
  out.reduce();
  return out;
}

Degree& Degree::operator+=(const Degree& rhs) {
  if (comps_.size() != rhs.comps_.size()) fail(ErrorCode::ContextMismatch, "degrees from different groups");
  for (std::size_t k = 0; k < comps_.size(); ++k) comps_[k] += rhs.comps_[k];
  reduce();
  return *this;
}

Degree& Degree::operator-=(const Degree& rhs) { return *this += -rhs; }

Degree Degree::scaled(std::int64_t k) const {
  Degree out = *this;
  for (auto& c : out.comps_) c *= k;
  out.reduce();
  return out;
}

Degree Degree::prepended(std::int64_t s) const {
  Degree out;
  out.comps_.push_back(s);
  out.moduli_.push_back(0);
  out.comps_.insert(out.comps_.end(), comps_.begin(), comps_.end());
  out.moduli_.insert(out.moduli_.end(), moduli_.begin(), moduli_.end());
  return out;
}

Degree Degree::tail() const {
  Degree out;
  out.comps_.assign(comps_.begin() + 1, comps_.end());
  out.moduli_.assign(moduli_.begin() + 1, moduli_.end());
  return out;
}

std::string Degree::to_string() const {
  std::string out = "(";
  for (std::size_t k = 0; k < comps_.size(); ++k) out += (k ? "," : "") + std::to_string(comps_[k]);
  return out + ")";
}

CommutationFactor CommutationFactor::validate(const GroupSpec& group, std::vector<std::vector<Rational>> q) {
  const auto n = static_cast<std::size_t>(group.rank());
  if (q.size() != n) fail(ErrorCode::ConstraintViolation, "phase matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  for (const auto& row : q)
    if (row.size() != n)
      fail(ErrorCode::ConstraintViolation, "phase matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  for (auto& row : q)
    for (auto& x : row) x.canonicalize();
  auto integral = [](const Rational& x) { return x.get_den() == 1; };
  for (std::size_t a = 0; a < n; ++a)
    if (!integral(2 * q[a][a]))
      fail(ErrorCode::ConstraintViolation, "diagonal: 2*q[" + std::to_string(a) + "][" + std::to_string(a) + "] = " +
                                               Rational(2 * q[a][a]).get_str() + " is not an integer");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (!integral(q[a][b] + q[b][a]))
        fail(ErrorCode::ConstraintViolation, "antisymmetry: q[" + std::to_string(a) + "][" + std::to_string(b) + "] + q[" +
                                                 std::to_string(b) + "][" + std::to_string(a) + "] is not an integer");
  for (std::size_t a = 0; a < n; ++a) {
    int na = group.modulus(static_cast<int>(a));
    if (na == 0) continue;
    for (std::size_t b = 0; b < n; ++b)
      if (!integral(na * q[a][b]))
        fail(ErrorCode::ConstraintViolation, "torsion: " + std::to_string(na) + "*q[" + std::to_string(a) + "][" +
                                                 std::to_string(b) + "] = " + Rational(na * q[a][b]).get_str() +
                                                 " is not an integer");
  }
  CommutationFactor f;
  f.group_ = group;
  f.q_ = std::move(q);
  long lcm = 1;
  for (const auto& row : f.q_)
    for (const auto& x : row) lcm = std::lcm(lcm, x.get_den().get_si());
  f.conductor_ = static_cast<int>(lcm);
  f.scaled_.assign(n, std::vector<std::int64_t>(n, 0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      Rational s = f.q_[a][b] * lcm;
      f.scaled_[a][b] = s.get_num().get_si() % lcm;
    }
  return f;
}

CommutationFactor CommutationFactor::trivial(const GroupSpec& group) {
  auto n = static_cast<std::size_t>(group.rank());
  return validate(group, std::vector<std::vector<Rational>>(n, std::vector<Rational>(n, Rational(0))));
}

CommutationFactor CommutationFactor::super(const GroupSpec& group) {
  auto n = static_cast<std::size_t>(group.rank());
  return validate(group, std::vector<std::vector<Rational>>(n, std::vector<Rational>(n, Rational(1, 2))));
}

CommutationFactor CommutationFactor::torus(const std::vector<std::vector<Rational>>& theta) {
  return validate(GroupSpec(static_cast<int>(theta.size()), {}), theta);
}

std::int64_t CommutationFactor::exponent(const Degree& i, const Degree& j) const {
  const std::size_t n = scaled_.size();
  if (i.size() != n || j.size() != n) fail(ErrorCode::ContextMismatch, "degree does not belong to the factor's group");
  const std::int64_t N = conductor_;
  std::int64_t e = 0;
  for (std::size_t a = 0; a < n; ++a) {
    if (i[a] == 0) continue;
    std::int64_t ia = i[a] % N;
    for (std::size_t b = 0; b < n; ++b) {
      if (scaled_[a][b] == 0 || j[b] == 0) continue;
      e = (e + ia * scaled_[a][b] % N * (j[b] % N)) % N;
    }
  }
  return e < 0 ? e + N : e;
}

CycloScalar CommutationFactor::eval(const Degree& i, const Degree& j) const {
  return CycloScalar::root_of_unity(conductor_, exponent(i, j));
}

Parity CommutationFactor::parity(const Degree& i) const { return exponent(i, i) == 0 ? Parity::Even : Parity::Odd; }

CommutationFactor CommutationFactor::extend_prime() const {
  const std::size_t n = q_.size();
  std::vector<std::vector<Rational>> q(n + 1, std::vector<Rational>(n + 1, Rational(0)));
  q[0][0] = Rational(1, 2);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) q[a + 1][b + 1] = q_[a][b];
  return validate(group_.extended(), std::move(q));
}

std::string CommutationFactor::to_json() const {
  std::ostringstream os;
  os << "{\"free_rank\":" << group_.free_rank << ",\"torsion\":[";
  for (std::size_t k = 0; k < group_.torsion.size(); ++k) os << (k ? "," : "") << group_.torsion[k];
  os << "],\"phase\":[";
  for (std::size_t a = 0; a < q_.size(); ++a) {
    os << (a ? "," : "") << "[";
    for (std::size_t b = 0; b < q_[a].size(); ++b) os << (b ? "," : "") << "\"" << q_[a][b].get_str() << "\"";
    os << "]";
  }
  os << "]}";
  return os.str();
}

}  // namespace rhocalc
