#include "rhocalc/cyclo.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "rhocalc/errors.hpp"

namespace rhocalc {

namespace {

using Poly = std::vector<Rational>;

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j] == 0) continue;
      out[i + j] += a[i] * b[j];
    }
  }
  trim(out);
  return out;
}

// Remainder of a modulo the monic integer polynomial m.
void reduce_monic(Poly& a, const std::vector<std::int64_t>& m) {
  const std::size_t deg = m.size() - 1;
  for (std::size_t top = a.size(); top-- > deg;) {
    if (a[top] == 0) continue;
    Rational c = a[top];
    for (std::size_t k = 0; k <= deg; ++k) {
      if (m[k] != 0) a[top - deg + k] -= c * Rational(static_cast<long>(m[k]));
    }
  }
  if (a.size() > deg) a.resize(deg);
  trim(a);
}

// Polynomial division over Q; returns quotient, leaves remainder in a.
Poly poly_divmod(Poly& a, const Poly& b) {
  Poly q;
  if (a.size() < b.size()) return q;
  q.assign(a.size() - b.size() + 1, Rational(0));
  const Rational& lead = b.back();
  for (std::size_t top = a.size(); top-- >= b.size();) {
    if (a[top] == 0) {
      if (top == 0) break;
      continue;
    }
    Rational c = a[top] / lead;
    q[top - (b.size() - 1)] = c;
    for (std::size_t k = 0; k < b.size(); ++k) a[top - (b.size() - 1) + k] -= c * b[k];
    if (top == 0) break;
  }
  trim(a);
  trim(q);
  return q;
}

Poly poly_sub(const Poly& a, const Poly& b) {
  Poly out(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
  trim(out);
  return out;
}

// x^e reduced modulo Phi_n.
Poly power_of_x(int n, std::int64_t e) {
  Poly p(static_cast<std::size_t>(e) + 1);
  p[static_cast<std::size_t>(e)] = 1;
  reduce_monic(p, cyclotomic_polynomial(n));
  return p;
}

std::vector<int> divisors(int n) {
  std::vector<int> out;
  for (int d = 1; d <= n; ++d)
    if (n % d == 0) out.push_back(d);
  return out;
}

// Solves sum_j x_j * cols[j] = target over Q; nullopt if inconsistent.
std::optional<Poly> solve_columns(const std::vector<Poly>& cols, const Poly& target, std::size_t rows) {
  const std::size_t n = cols.size();
  std::vector<std::vector<Rational>> m(rows, std::vector<Rational>(n + 1));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < cols[j].size(); ++i) m[i][j] = cols[j][i];
  for (std::size_t i = 0; i < target.size(); ++i) m[i][n] = target[i];
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    Rational inv = 1 / m[r][c];
    for (auto& v : m[r]) v *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rational f = m[i][c];
      for (std::size_t k = c; k <= n; ++k) m[i][k] -= f * m[r][k];
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i)
    if (m[i][n] != 0) return std::nullopt;
  Poly x(n);
  for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = m[i][n];
  return x;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s = text;
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s = s.substr(1);
  }
  auto slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den)) fail(ErrorCode::SyntaxError, "malformed rational '" + text + "'");
  mpz_class d(den);
  if (d == 0) fail(ErrorCode::SyntaxError, "zero denominator in '" + text + "'");
  Rational q(mpz_class(num), d);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

std::string rational_to_string(const Rational& q) { return q.get_str(); }

const std::vector<std::int64_t>& cyclotomic_polynomial(int n) {
  static std::recursive_mutex mu;
  static std::map<int, std::vector<std::int64_t>> cache;
  std::lock_guard<std::recursive_mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) fail(ErrorCode::ConstraintViolation, "cyclotomic index must be positive");
  // x^n - 1 divided by Phi_d for every proper divisor d.
  std::vector<std::int64_t> p(static_cast<std::size_t>(n) + 1, 0);
  p[0] = -1;
  p[static_cast<std::size_t>(n)] = 1;
  for (int d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    const auto& f = cyclotomic_polynomial(d);
    std::vector<std::int64_t> q(p.size() - f.size() + 1, 0);
    for (std::size_t top = p.size(); top-- >= f.size();) {
      std::int64_t c = p[top];
      q[top - (f.size() - 1)] = c;
      for (std::size_t k = 0; k < f.size(); ++k) p[top - (f.size() - 1) + k] -= c * f[k];
      if (top == 0) break;
    }
    p = q;
  }
  return cache.emplace(n, p).first->second;
}

int euler_phi(int n) {
  int result = n;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    while (n % p == 0) n /= p;
    result -= result / p;
  }
  if (n > 1) result -= result / n;
  return result;
}

CycloScalar::CycloScalar(long value) {
  if (value != 0) coeffs_.push_back(Rational(value));
}

CycloScalar::CycloScalar(const Rational& value) {
  if (value != 0) {
    coeffs_.push_back(value);
    coeffs_[0].canonicalize();
  }
}

CycloScalar::CycloScalar(int conductor, std::vector<Rational> coeffs)
    : conductor_(conductor), coeffs_(std::move(coeffs)) {}

CycloScalar CycloScalar::root_of_unity(int n, std::int64_t k) {
  if (n < 1) fail(ErrorCode::ConstraintViolation, "root of unity order must be positive");
  k %= n;
  if (k < 0) k += n;
  if (k == 0) return CycloScalar(1L);
  std::int64_t g = std::gcd(k, static_cast<std::int64_t>(n));
  int m = static_cast<int>(n / g);
  CycloScalar out(m, power_of_x(m, k / g));
  out.normalize();
  return out;
}

void CycloScalar::normalize() {
  trim(coeffs_);
  if (coeffs_.size() <= 1) {
    conductor_ = 1;
    return;
  }
  if (conductor_ % 4 == 2) {
    // zeta_{2M} = -zeta_M^{(M+1)/2} for odd M.
    int m = conductor_ / 2;
    Poly z = power_of_x(m, (m + 1) / 2);
    for (auto& c : z) c = -c;
    Poly acc;
    Poly pw{Rational(1)};
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      if (k > 0) {
        pw = poly_mul(pw, z);
        reduce_monic(pw, cyclotomic_polynomial(m));
      }
      if (coeffs_[k] == 0) continue;
      Poly term = pw;
      for (auto& c : term) c *= coeffs_[k];
      acc.resize(std::max(acc.size(), term.size()));
      for (std::size_t i = 0; i < term.size(); ++i) acc[i] += term[i];
    }
    trim(acc);
    conductor_ = m;
    coeffs_ = std::move(acc);
    if (coeffs_.size() <= 1) conductor_ = 1;
  }
}

bool CycloScalar::is_one() const { return coeffs_.size() == 1 && coeffs_[0] == 1; }

Rational CycloScalar::rational_value() const { return coeffs_.empty() ? Rational(0) : coeffs_[0]; }

CycloScalar CycloScalar::lifted(int m) const {
  if (m % conductor_ != 0) fail(ErrorCode::ConstraintViolation, "lift target must be a multiple of the conductor");
  if (m == conductor_) return *this;
  const int step = m / conductor_;
  Poly p(coeffs_.empty() ? 0 : (coeffs_.size() - 1) * step + 1);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) p[k * step] = coeffs_[k];
  reduce_monic(p, cyclotomic_polynomial(m));
  return CycloScalar(m, std::move(p));
}

std::optional<std::vector<Rational>> CycloScalar::project_coeffs(int n) const {
  if (is_zero()) return std::vector<Rational>{};
  if (is_rational()) return coeffs_;
  const int l = std::lcm(conductor_, n);
  CycloScalar up = lifted(l);
  std::vector<Poly> cols;
  const int phi_n = euler_phi(n);
  for (int j = 0; j < phi_n; ++j) cols.push_back(power_of_x(l, static_cast<std::int64_t>(j) * (l / n)));
  auto x = solve_columns(cols, up.coeffs_, static_cast<std::size_t>(euler_phi(l)));
  if (!x) return std::nullopt;
  trim(*x);
  return x;
}

CycloScalar CycloScalar::inverse() const {
  if (is_zero()) fail(ErrorCode::NotInvertible, "division by zero scalar");
  if (is_rational()) return CycloScalar(Rational(1 / coeffs_[0]));
  // Extended Euclid: s*a + t*Phi = 1, so s is the inverse of a.
  const auto& phi = cyclotomic_polynomial(conductor_);
  Poly r0(phi.begin(), phi.end());
  for (std::size_t i = 0; i < phi.size(); ++i) r0[i] = Rational(static_cast<long>(phi[i]));
  Poly r1 = coeffs_;
  Poly s0, s1{Rational(1)};
  while (!r1.empty()) {
    Poly rem = r0;
    Poly q = poly_divmod(rem, r1);
    Poly s2 = poly_sub(s0, poly_mul(q, s1));
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  // r0 is a nonzero constant since Phi is irreducible.
  Rational c = r0[0];
  for (auto& v : s0) v /= c;
  reduce_monic(s0, phi);
  CycloScalar out(conductor_, std::move(s0));
  out.normalize();
  return out;
}

CycloScalar CycloScalar::operator-() const {
  CycloScalar out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

CycloScalar& CycloScalar::operator+=(const CycloScalar& rhs) {
  if (rhs.is_zero()) return *this;
  if (conductor_ == 1 && rhs.conductor_ == 1) {
    if (coeffs_.empty()) {
      coeffs_ = rhs.coeffs_;
    } else {
      coeffs_[0] += rhs.coeffs_[0];
      if (coeffs_[0] == 0) coeffs_.clear();
    }
    return *this;
  }
  const int l = std::lcm(conductor_, rhs.conductor_);
  if (l != conductor_) *this = lifted(l);
  const CycloScalar other = rhs.conductor_ == l ? rhs : rhs.lifted(l);
  coeffs_.resize(std::max(coeffs_.size(), other.coeffs_.size()));
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  normalize();
  return *this;
}

CycloScalar& CycloScalar::operator-=(const CycloScalar& rhs) { return *this += -rhs; }

CycloScalar& CycloScalar::operator*=(const CycloScalar& rhs) {
  if (is_zero()) return *this;
  if (rhs.is_zero()) {
    coeffs_.clear();
    conductor_ = 1;
    return *this;
  }
  if (rhs.conductor_ == 1) {
    for (auto& c : coeffs_) c *= rhs.coeffs_[0];
    return *this;
  }
  if (conductor_ == 1) {
    Rational c = coeffs_[0];
    *this = rhs;
    for (auto& v : coeffs_) v *= c;
    return *this;
  }
  const int l = std::lcm(conductor_, rhs.conductor_);
  CycloScalar a = conductor_ == l ? *this : lifted(l);
  CycloScalar b = rhs.conductor_ == l ? rhs : rhs.lifted(l);
  Poly p = poly_mul(a.coeffs_, b.coeffs_);
  reduce_monic(p, cyclotomic_polynomial(l));
  conductor_ = l;
  coeffs_ = std::move(p);
  normalize();
  return *this;
}

CycloScalar& CycloScalar::operator/=(const CycloScalar& rhs) { return *this *= rhs.inverse(); }

bool operator==(const CycloScalar& a, const CycloScalar& b) {
  if (a.conductor_ == b.conductor_) return a.coeffs_ == b.coeffs_;
  if (a.is_rational() != b.is_rational() && (a.conductor_ == 1 || b.conductor_ == 1)) return false;
  const int l = std::lcm(a.conductor_, b.conductor_);
  return a.lifted(l).coeffs_ == b.lifted(l).coeffs_;
}

namespace {

struct MinimalForm {
  int conductor;
  std::vector<Rational> coeffs;
};

MinimalForm minimal_form(const CycloScalar& s) {
  if (s.is_rational()) return {1, s.coeffs()};
  for (int d : divisors(s.conductor())) {
    if (d == 1 || d % 4 == 2 || d == s.conductor()) continue;
    if (auto c = s.project_coeffs(d)) return {d, *c};
  }
  return {s.conductor(), s.coeffs()};
}

std::string term_text(const Rational& c, int n, std::size_t k, bool with_sign) {
  std::ostringstream os;
  Rational mag = abs(c);
  if (with_sign && c < 0) os << "-";
  if (k == 0) {
    os << mag.get_str();
  } else {
    if (mag != 1) os << mag.get_str() << " * ";
    os << "zeta(" << n << ")^" << k;
  }
  return os.str();
}

}  // namespace

bool CycloScalar::is_atomic() const {
  MinimalForm m = minimal_form(*this);
  return std::count_if(m.coeffs.begin(), m.coeffs.end(), [](const Rational& c) { return c != 0; }) <= 1;
}

std::string CycloScalar::to_string() const {
  if (is_zero()) return "0";
  MinimalForm m = minimal_form(*this);
  std::vector<std::size_t> nz;
  for (std::size_t k = 0; k < m.coeffs.size(); ++k)
    if (m.coeffs[k] != 0) nz.push_back(k);
  if (nz.size() == 1) return term_text(m.coeffs[nz[0]], m.conductor, nz[0], true);
  std::string out = "(";
  for (std::size_t i = 0; i < nz.size(); ++i) {
    const Rational& c = m.coeffs[nz[i]];
    if (i == 0) {
      out += term_text(c, m.conductor, nz[i], true);
    } else {
      out += c < 0 ? " - " : " + ";
      out += term_text(c, m.conductor, nz[i], false);
    }
  }
  return out + ")";
}

}  // namespace rhocalc
