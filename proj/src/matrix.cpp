#include "rhocalc/matrix.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "rhocalc/errors.hpp"

namespace rhocalc {

DegreeTuple DegreeTuple::negated() const {
  DegreeTuple out;
  for (const auto& d : degs) out.degs.push_back(-d);
  return out;
}

DegreeTuple DegreeTuple::slice(std::size_t from, std::size_t to) const {
  DegreeTuple out;
  out.degs.assign(degs.begin() + static_cast<std::ptrdiff_t>(from), degs.begin() + static_cast<std::ptrdiff_t>(to));
  return out;
}

DegreeTuple DegreeTuple::concat(const DegreeTuple& other) const {
  DegreeTuple out = *this;
  out.degs.insert(out.degs.end(), other.degs.begin(), other.degs.end());
  return out;
}

DegreeTuple::Kind DegreeTuple::classify(const CommutationFactor& f) const {
  std::size_t evens = even_count(f);
  std::size_t odds = 0;
  for (std::size_t k = evens; k < degs.size(); ++k)
    if (f.is_odd(degs[k])) ++odds;
  if (evens + odds != degs.size()) return Kind::Mixed;
  if (odds == 0) return Kind::Even;
  if (evens == 0) return Kind::Odd;
  return Kind::Split;
}

std::size_t DegreeTuple::even_count(const CommutationFactor& f) const {
  std::size_t k = 0;
  while (k < degs.size() && !f.is_odd(degs[k])) ++k;
  return k;
}

std::string DegreeTuple::to_string() const {
  std::string out = "[";
  for (std::size_t k = 0; k < degs.size(); ++k) out += (k ? ", " : "") + degs[k].to_string();
  return out + "]";
}

GradedMatrix::GradedMatrix(ContextPtr ctx, DegreeTuple rows, DegreeTuple cols, Degree degree)
    : ctx_(std::move(ctx)), rows_(std::move(rows)), cols_(std::move(cols)), degree_(std::move(degree)) {
  entries_.assign(rows_.size() * cols_.size(), GradedPoly(ctx_));
}

GradedMatrix GradedMatrix::make(ContextPtr ctx, DegreeTuple rows, DegreeTuple cols, Degree degree,
                                std::vector<GradedPoly> entries) {
  if (entries.size() != rows.size() * cols.size())
    fail(ErrorCode::ShapeMismatch, "expected " + std::to_string(rows.size() * cols.size()) + " entries, got " +
                                       std::to_string(entries.size()));
  GradedMatrix m(ctx, std::move(rows), std::move(cols), std::move(degree));
  for (std::size_t k = 0; k < m.nrows(); ++k)
    for (std::size_t l = 0; l < m.ncols(); ++l) m.set(k, l, std::move(entries[k * m.ncols() + l]));
  return m;
}

GradedMatrix GradedMatrix::identity(ContextPtr ctx, DegreeTuple rows) {
  Degree zero = ctx->zero_degree();
  GradedMatrix m(ctx, rows, rows, zero);
  for (std::size_t k = 0; k < m.nrows(); ++k) m.entries_[k * m.ncols() + k] = GradedPoly::constant(ctx, CycloScalar(1L));
  return m;
}

void GradedMatrix::check_entry(std::size_t k, std::size_t l) const {
  const GradedPoly& f = at(k, l);
  if (f.is_zero()) return;
  Degree want = rows_[k] - cols_[l] + degree_;
  if (!f.is_homogeneous() || f.degree() != want)
    fail(ErrorCode::GradingViolation, "entry (" + std::to_string(k + 1) + "," + std::to_string(l + 1) + ") = " +
                                          f.to_string() + " should have degree " + want.to_string());
}

void GradedMatrix::set(std::size_t k, std::size_t l, GradedPoly f) {
  if (k >= nrows() || l >= ncols()) fail(ErrorCode::ShapeMismatch, "matrix index out of range");
  if (!f.context()) f = GradedPoly(ctx_);
  if (!f.is_zero()) require_same_context(ctx_, f.context(), "matrix entry");
  entries_[k * ncols() + l] = std::move(f);
  check_entry(k, l);
}

bool GradedMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const GradedPoly& f) { return f.is_zero(); });
}

GradedMatrix GradedMatrix::block(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) const {
  GradedMatrix out(ctx_, rows_.slice(r0, r1), cols_.slice(c0, c1), degree_);
  for (std::size_t k = r0; k < r1; ++k)
    for (std::size_t l = c0; l < c1; ++l) out.entries_[(k - r0) * out.ncols() + (l - c0)] = at(k, l);
  return out;
}

GradedMatrix GradedMatrix::free_part() const {
  GradedMatrix out = *this;
  for (auto& e : out.entries_) e = e.free_part();
  return out;
}

GradedMatrix operator*(const GradedMatrix& a, const GradedMatrix& b) {
  require_same_context(a.ctx_, b.ctx_, "matrix product");
  if (a.ncols() != b.nrows() || a.cols_ != b.rows_)
    fail(ErrorCode::ShapeMismatch, "cannot multiply " + a.rows_.to_string() + "x" + a.cols_.to_string() + " by " +
                                       b.rows_.to_string() + "x" + b.cols_.to_string());
  GradedMatrix out(a.ctx_, a.rows_, b.cols_, a.degree_ + b.degree_);
  for (std::size_t k = 0; k < a.nrows(); ++k)
    for (std::size_t l = 0; l < b.ncols(); ++l) {
      GradedPoly s(a.ctx_);
      for (std::size_t j = 0; j < a.ncols(); ++j) {
        const GradedPoly& x = a.at(k, j);
        const GradedPoly& y = b.at(j, l);
        if (!x.is_zero() && !y.is_zero()) s += x * y;
      }
      out.entries_[k * out.ncols() + l] = std::move(s);
    }
  return out;
}

GradedMatrix operator+(const GradedMatrix& a, const GradedMatrix& b) {
  require_same_context(a.ctx_, b.ctx_, "matrix sum");
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) fail(ErrorCode::ShapeMismatch, "matrix sum needs equal shapes");
  if (b.is_zero()) return a;
  if (a.is_zero()) return b;
  if (a.degree_ != b.degree_)
    fail(ErrorCode::GradingViolation, "sum of matrices of degrees " + a.degree_.to_string() + " and " +
                                          b.degree_.to_string());
  GradedMatrix out = a;
  for (std::size_t k = 0; k < out.entries_.size(); ++k) out.entries_[k] += b.entries_[k];
  return out;
}

GradedMatrix GradedMatrix::operator-() const {
  GradedMatrix out = *this;
  for (auto& e : out.entries_) e = -e;
  return out;
}

GradedMatrix operator-(const GradedMatrix& a, const GradedMatrix& b) { return a + (-b); }

bool operator==(const GradedMatrix& a, const GradedMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  for (std::size_t k = 0; k < a.entries_.size(); ++k)
    if (a.entries_[k] != b.entries_[k]) return false;
  return true;
}

std::string GradedMatrix::to_string() const {
  std::string out = "[";
  for (std::size_t k = 0; k < nrows(); ++k) {
    out += k ? ", [" : "[";
    for (std::size_t l = 0; l < ncols(); ++l) out += (l ? ", " : "") + at(k, l).to_string();
    out += "]";
  }
  return out + "]";
}

GradedMatrix left_act(const GradedPoly& g, const GradedMatrix& f) {
  const ContextPtr& ctx = f.context();
  if (g.is_zero()) return GradedMatrix(ctx, f.rows(), f.cols(), f.degree());
  require_same_context(ctx, g.context(), "left action");
  Degree dg = g.degree();
  std::vector<GradedPoly> entries;
  for (std::size_t k = 0; k < f.nrows(); ++k) {
    CycloScalar r = ctx->rho(f.rows()[k], dg);
    for (std::size_t l = 0; l < f.ncols(); ++l) entries.push_back(r * (g * f.at(k, l)));
  }
  return GradedMatrix::make(ctx, f.rows(), f.cols(), dg + f.degree(), std::move(entries));
}

GradedMatrix right_act(const GradedMatrix& f, const GradedPoly& g) {
  const ContextPtr& ctx = f.context();
  if (g.is_zero()) return GradedMatrix(ctx, f.rows(), f.cols(), f.degree());
  require_same_context(ctx, g.context(), "right action");
  Degree dg = g.degree();
  std::vector<GradedPoly> entries;
  for (std::size_t k = 0; k < f.nrows(); ++k)
    for (std::size_t l = 0; l < f.ncols(); ++l) entries.push_back(ctx->rho(f.cols()[l], dg) * (f.at(k, l) * g));
  return GradedMatrix::make(ctx, f.rows(), f.cols(), f.degree() + dg, std::move(entries));
}

GradedMatrix transpose(const GradedMatrix& f) {
  const ContextPtr& ctx = f.context();
  std::vector<GradedPoly> entries;
  for (std::size_t l = 0; l < f.ncols(); ++l)
    for (std::size_t k = 0; k < f.nrows(); ++k) {
      const Degree& ik = f.rows()[k];
      entries.push_back(ctx->rho(ik, f.cols()[l] - ik) * f.at(k, l));
    }
  return GradedMatrix::make(ctx, f.cols().negated(), f.rows().negated(), f.degree(), std::move(entries));
}

namespace {

void require_square_degree_zero(const GradedMatrix& f, const char* what) {
  if (!f.is_square()) fail(ErrorCode::ShapeMismatch, std::string(what) + " needs a square matrix in M(I x I)");
  if (!f.degree().is_zero() && !f.is_zero())
    fail(ErrorCode::NonzeroDegree, std::string(what) + " needs a degree-0 matrix, got degree " + f.degree().to_string());
}

// Leibniz determinant; only used on I-free parts, whose entries are central.
GradedPoly classical_det(const ContextPtr& ctx, const std::vector<std::vector<GradedPoly>>& a) {
  const std::size_t n = a.size();
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  GradedPoly out(ctx);
  do {
    GradedPoly p = GradedPoly::constant(ctx, CycloScalar(1L));
    for (std::size_t k = 0; k < n && !p.is_zero(); ++k) p = p * a[k][sigma[k]];
    if (p.is_zero()) continue;
    int inversions = 0;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = k + 1; l < n; ++l)
        if (sigma[k] > sigma[l]) ++inversions;
    out += inversions % 2 ? -p : p;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return out;
}

GradedMatrix with_row(const GradedMatrix& f, std::size_t k, const std::vector<GradedPoly>& row) {
  GradedMatrix out = f;
  for (std::size_t l = 0; l < f.ncols(); ++l) out.set(k, l, row[l]);
  return out;
}

std::vector<GradedPoly> row_of(const GradedMatrix& f, std::size_t k) {
  std::vector<GradedPoly> out;
  for (std::size_t l = 0; l < f.ncols(); ++l) out.push_back(f.at(k, l));
  return out;
}

GradedMatrix widened(const GradedMatrix& f, const ContextPtr& ext) {
  std::vector<GradedPoly> entries;
  for (std::size_t k = 0; k < f.nrows(); ++k)
    for (std::size_t l = 0; l < f.ncols(); ++l) entries.push_back(f.at(k, l).widened(ext));
  return GradedMatrix::make(ext, f.rows(), f.cols(), f.degree(), std::move(entries));
}

}  // namespace

GradedPoly rho_det(const GradedMatrix& f) {
  require_square_degree_zero(f, "rho_det");
  const ContextPtr& ctx = f.context();
  const CommutationFactor& fac = ctx->factor();
  const auto kind = f.rows().classify(fac);
  if (kind == DegreeTuple::Kind::Mixed || kind == DegreeTuple::Kind::Split)
    fail(ErrorCode::MixedParity, "rho_det needs all row degrees of one parity, got " + f.rows().to_string());
  // Swapping two adjacent t's costs -rho for even I and +rho for odd I; odd
  // t's already anticommute.
  const bool flip = kind == DegreeTuple::Kind::Even;
  const std::size_t n = f.nrows();
  const auto& I = f.rows();
  const std::int64_t N = fac.conductor();
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  GradedPoly out(ctx);
  do {
    GradedPoly p = GradedPoly::constant(ctx, CycloScalar(1L));
    for (std::size_t k = 0; k < n && !p.is_zero(); ++k) p = p * f.at(k, sigma[k]);
    if (p.is_zero()) continue;
    std::int64_t e = 0;
    bool negate = false;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = k + 1; l < n; ++l) {
        // t_{sigma k} moves right past f_{l, sigma l}.
        e += fac.exponent(I[sigma[k]], I[l] - I[sigma[l]]);
        if (sigma[k] > sigma[l]) {
          e += fac.exponent(I[sigma[k]], I[sigma[l]]);
          negate ^= flip;
        }
      }
    CycloScalar c = CycloScalar::root_of_unity(static_cast<int>(N), e % N);
    if (negate) c = -c;
    out += c * p;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return out;
}

namespace {

struct FreeInverse {
  std::vector<std::vector<GradedPoly>> a;
  GradedPoly det0;
  std::optional<GradedPoly> det0_inv;
};

FreeInverse free_determinant(const GradedMatrix& f0) {
  const std::size_t n = f0.nrows();
  FreeInverse out;
  out.a.assign(n, std::vector<GradedPoly>(n));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) out.a[k][l] = f0.at(k, l);
  out.det0 = classical_det(f0.context(), out.a);
  try {
    out.det0_inv = invert(out.det0);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotInvertible) throw;
  }
  return out;
}

}  // namespace

GradedMatrix inverse(const GradedMatrix& f) {
  require_square_degree_zero(f, "inverse");
  const ContextPtr& ctx = f.context();
  const std::size_t n = f.nrows();
  GradedMatrix f0 = f.free_part();
  FreeInverse fi = free_determinant(f0);
  if (!fi.det0_inv)
    fail(ErrorCode::NotInvertible, "I-free part of the matrix has determinant " + fi.det0.to_string() + ", not a unit");
  const auto& a = fi.a;
  const GradedPoly& det0_inv = *fi.det0_inv;
  std::vector<GradedPoly> adj(n * n, GradedPoly(ctx));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) {
      std::vector<std::vector<GradedPoly>> minor;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == k) continue;
        std::vector<GradedPoly> row;
        for (std::size_t c = 0; c < n; ++c)
          if (c != l) row.push_back(a[r][c]);
        minor.push_back(std::move(row));
      }
      GradedPoly m = minor.empty() ? GradedPoly::constant(ctx, CycloScalar(1L)) : classical_det(ctx, minor);
      adj[l * n + k] = ((k + l) % 2 ? -m : m) * det0_inv;
    }
  GradedMatrix inv0 = GradedMatrix::make(ctx, f.rows(), f.rows(), ctx->zero_degree(), std::move(adj));
  // F = F0 (1 + M) with M = F0^{-1} (F - F0) in I.
  GradedMatrix m = inv0 * (f - f0);
  // Without truncation the series stops only if M is nilpotent. Modulo the
  // square-zero variables that forces M^n = 0, after which each further
  // power of M^n uses up another square-zero variable.
  std::size_t square_zero = 0;
  for (const auto& v : ctx->vars()) square_zero += v.squares_to_zero() ? 1 : 0;
  const std::size_t bound = n * (square_zero + 1) + 1;
  GradedMatrix sum = GradedMatrix::identity(ctx, f.rows());
  GradedMatrix p = sum;
  GradedMatrix neg_m = -m;
  for (std::size_t k = 1;; ++k) {
    p = p * neg_m;
    if (p.is_zero()) break;
    if (!ctx->truncation() && k > bound)
      fail(ErrorCode::TruncationRequired, "matrix inverse series does not terminate; set a truncation order");
    sum = sum + p;
  }
  return sum * inv0;
}

bool is_invertible(const GradedMatrix& f) {
  require_square_degree_zero(f, "is_invertible");
  return free_determinant(f.free_part()).det0_inv.has_value();
}

namespace {

struct Blocks {
  GradedMatrix f00, f01, f10, f11;
  std::size_t n = 0, m = 0;
};

Blocks split_blocks(const GradedMatrix& f, const char* what) {
  require_square_degree_zero(f, what);
  const auto& fac = f.context()->factor();
  if (f.rows().classify(fac) == DegreeTuple::Kind::Mixed)
    fail(ErrorCode::NotSplitTuple, std::string(what) + " needs even degrees followed by odd ones, got " +
                                       f.rows().to_string());
  Blocks b;
  b.n = f.rows().even_count(fac);
  const std::size_t t = f.nrows();
  b.m = t - b.n;
  b.f00 = f.block(0, b.n, 0, b.n);
  b.f01 = f.block(0, b.n, b.n, t);
  b.f10 = f.block(b.n, t, 0, b.n);
  b.f11 = f.block(b.n, t, b.n, t);
  return b;
}

}  // namespace

GradedPoly rho_ber(const GradedMatrix& f) {
  Blocks b = split_blocks(f, "rho_ber");
  const ContextPtr& ctx = f.context();
  if (!is_invertible(b.f00) || !is_invertible(b.f11)) return GradedPoly(ctx);
  if (b.m == 0) return rho_det(b.f00);
  GradedPoly d11_inv = invert(rho_det(b.f11));
  if (b.n == 0) return d11_inv;
  GradedMatrix schur = b.f00 - b.f01 * inverse(b.f11) * b.f10;
  return rho_det(schur) * d11_inv;
}

GradedPoly rho_ber_alternate(const GradedMatrix& f) {
  Blocks b = split_blocks(f, "rho_ber");
  const ContextPtr& ctx = f.context();
  if (!is_invertible(b.f00) || !is_invertible(b.f11)) return GradedPoly(ctx);
  if (b.m == 0) return rho_det(b.f00);
  if (b.n == 0) return invert(rho_det(b.f11));
  GradedMatrix schur = b.f11 - b.f10 * inverse(b.f00) * b.f01;
  return rho_det(b.f00) * invert(rho_det(schur));
}

GradedMatrix split_reordered(const GradedMatrix& f) {
  require_square_degree_zero(f, "split_reordered");
  const auto& fac = f.context()->factor();
  std::vector<std::size_t> perm;
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t k = 0; k < f.nrows(); ++k)
      if (fac.is_odd(f.rows()[k]) == (pass == 1)) perm.push_back(k);
  DegreeTuple tup;
  std::vector<GradedPoly> entries;
  for (std::size_t k : perm) tup.degs.push_back(f.rows()[k]);
  for (std::size_t k : perm)
    for (std::size_t l : perm) entries.push_back(f.at(k, l));
  return GradedMatrix::make(f.context(), tup, tup, f.degree(), std::move(entries));
}

GradedPoly rho_ber_reordered(const GradedMatrix& f) { return rho_ber(split_reordered(f)); }

GradedPoly rho_tr(const GradedMatrix& f) {
  if (!f.is_square()) fail(ErrorCode::ShapeMismatch, "rho_tr needs a square matrix in M(I x I)");
  const ContextPtr& ctx = f.context();
  GradedPoly out(ctx);
  for (std::size_t k = 0; k < f.nrows(); ++k) {
    const Degree& ik = f.rows()[k];
    out += ctx->rho(ik + f.degree(), ik) * f.at(k, k);
  }
  return out;
}

GradedPoly trace(const GradedMatrix& f) {
  if (!f.is_square()) fail(ErrorCode::ShapeMismatch, "trace needs a square matrix in M(I x I)");
  GradedPoly out(f.context());
  for (std::size_t k = 0; k < f.nrows(); ++k) out += f.at(k, k);
  return out;
}

std::vector<PropertyResult> rho_det_properties(const GradedMatrix& f, const GradedMatrix& g, std::size_t k0,
                                               std::size_t dup_from, std::size_t dup_to) {
  require_square_degree_zero(f, "rho_det_properties");
  require_square_degree_zero(g, "rho_det_properties");
  if (f.rows() != g.rows()) fail(ErrorCode::ShapeMismatch, "F and G must share the degree tuple");
  const std::size_t n = f.nrows();
  std::vector<PropertyResult> out;
  const GradedPoly df = rho_det(f);
  const GradedPoly dg = rho_det(g);

  PropertyResult a{"(a) invertible implies unit", true, true, ""};
  if (is_invertible(f)) {
    try {
      invert(df);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotInvertible) throw;
      a.pass = false;
      a.detail = "rho_det(F) = " + df.to_string() + " is not a unit";
    }
  } else {
    a.applicable = false;
    a.detail = "F is not invertible";
  }
  out.push_back(a);

  PropertyResult b{"(b) multiplicative", true, true, ""};
  GradedPoly dfg = rho_det(f * g);
  if (dfg != df * dg) {
    b.pass = false;
    b.detail = "rho_det(FG) = " + dfg.to_string() + ", rho_det(F) rho_det(G) = " + (df * dg).to_string();
  }
  out.push_back(b);

  PropertyResult c{"(c) row additive", n > 0, true, ""};
  PropertyResult d{"(d) row scaling", n > 0, true, ""};
  if (n > 0) {
    const std::size_t k = k0 % n;
    auto fr = row_of(f, k);
    auto gr = row_of(g, k);
    std::vector<GradedPoly> hr;
    for (std::size_t l = 0; l < n; ++l) hr.push_back(fr[l] + gr[l]);
    GradedPoly lhs = df + rho_det(with_row(f, k, gr));
    GradedPoly rhs = rho_det(with_row(f, k, hr));
    if (lhs != rhs) {
      c.pass = false;
      c.detail = lhs.to_string() + " != " + rhs.to_string();
    }
    std::vector<GradedPoly> sr;
    for (std::size_t l = 0; l < n; ++l) sr.push_back(dg * fr[l]);
    GradedPoly scaled = rho_det(with_row(f, k, sr));
    if (scaled != dg * df) {
      d.pass = false;
      d.detail = scaled.to_string() + " != " + (dg * df).to_string();
    }
  }
  out.push_back(c);
  out.push_back(d);

  PropertyResult e{"(e) repeated row", true, true, ""};
  if (dup_from >= n || dup_to >= n || dup_from == dup_to || f.rows()[dup_from] != f.rows()[dup_to]) {
    e.applicable = false;
    e.detail = "rows cannot be duplicated";
  } else {
    GradedPoly z = rho_det(with_row(f, dup_to, row_of(f, dup_from)));
    if (!z.is_zero()) {
      e.pass = false;
      e.detail = "rho_det = " + z.to_string();
    }
  }
  out.push_back(e);
  return out;
}

namespace {

struct EpsExtension {
  ContextPtr ext;
  GradedPoly eps;
  GradedMatrix eps_f;
};

EpsExtension adjoin_eps(const GradedMatrix& f) {
  const ContextPtr& ctx = f.context();
  Degree de = -f.degree();
  bool odd = ctx->is_odd(de);
  std::string name = "eps";
  while (ctx->index_of(name)) name += "_";
  EpsExtension out;
  out.ext = ctx->extended_with({{name, de, odd ? VarKind::FormalOdd : VarKind::FormalEven, false, !odd}});
  out.eps = GradedPoly::variable(out.ext, out.ext->size() - 1);
  out.eps_f = left_act(out.eps, widened(f, out.ext));
  return out;
}

}  // namespace

Linearization linearize_ber(const GradedMatrix& f) {
  if (!f.is_square()) fail(ErrorCode::ShapeMismatch, "linearize_ber needs a square matrix in M(I x I)");
  EpsExtension e = adjoin_eps(f);
  GradedMatrix one = GradedMatrix::identity(e.ext, f.rows());
  Linearization out;
  out.eps_name = e.ext->var(e.ext->size() - 1).name;
  out.lhs = rho_ber(one + e.eps_f);
  out.rhs = GradedPoly::constant(e.ext, CycloScalar(1L)) + rho_tr(e.eps_f);
  out.holds = out.lhs == out.rhs;
  return out;
}

Linearization linearize_det(const GradedMatrix& f) {
  if (!f.is_square()) fail(ErrorCode::ShapeMismatch, "linearize_det needs a square matrix in M(I x I)");
  EpsExtension e = adjoin_eps(f);
  GradedMatrix one = GradedMatrix::identity(e.ext, f.rows());
  Linearization out;
  out.eps_name = e.ext->var(e.ext->size() - 1).name;
  out.lhs = rho_det(one + e.eps_f);
  out.rhs = GradedPoly::constant(e.ext, CycloScalar(1L)) + trace(e.eps_f);
  out.holds = out.lhs == out.rhs;
  return out;
}

}  // namespace rhocalc
