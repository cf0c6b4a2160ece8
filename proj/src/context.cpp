#include "rhocalc/context.hpp"

#include <set>

#include "rhocalc/errors.hpp"

namespace rhocalc {

const char* to_string(VarKind kind) {
  switch (kind) {
    case VarKind::Base: return "base";
    case VarKind::FormalEven: return "even";
    case VarKind::FormalOdd: return "odd";
    case VarKind::Parameter: return "param";
  }
  return "?";
}

ContextPtr Context::make(CommutationFactor factor, std::vector<Variable> vars, std::optional<int> truncation) {
  if (truncation && *truncation < 0) fail(ErrorCode::ConstraintViolation, "truncation order must be nonnegative");
  std::set<std::string> seen;
  for (const auto& v : vars) {
    if (!seen.insert(v.name).second) fail(ErrorCode::ConstraintViolation, "duplicate variable '" + v.name + "'");
    if (v.degree.size() != static_cast<std::size_t>(factor.group().rank()))
      fail(ErrorCode::ConstraintViolation, "variable '" + v.name + "' has a degree outside the grading group");
    bool odd = factor.is_odd(v.degree);
    switch (v.kind) {
      case VarKind::Base:
      case VarKind::Parameter:
        if (!v.degree.is_zero())
          fail(ErrorCode::ConstraintViolation, "variable '" + v.name + "' must have degree 0");
        if (v.nilpotent) fail(ErrorCode::ConstraintViolation, "only formal variables can be nilpotent");
        break;
      case VarKind::FormalEven:
        if (odd) fail(ErrorCode::ConstraintViolation, "variable '" + v.name + "' declared even but its degree is odd");
        if (v.invertible) fail(ErrorCode::ConstraintViolation, "formal variable '" + v.name + "' cannot be invertible");
        break;
      case VarKind::FormalOdd:
        if (!odd) fail(ErrorCode::ConstraintViolation, "variable '" + v.name + "' declared odd but its degree is even");
        if (v.invertible) fail(ErrorCode::ConstraintViolation, "formal variable '" + v.name + "' cannot be invertible");
        break;
    }
  }
  auto* raw = new Context();
  ContextPtr ctx(raw);
  raw->factor_ = std::move(factor);
  raw->vars_ = std::move(vars);
  raw->truncation_ = truncation;
  raw->conductor_ = raw->factor_.conductor();
  const std::size_t n = raw->vars_.size();
  raw->phase_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      raw->phase_[i * n + j] = raw->factor_.exponent(raw->vars_[i].degree, raw->vars_[j].degree);
  for (int k = 0; k < raw->conductor_; ++k) raw->roots_.push_back(CycloScalar::root_of_unity(raw->conductor_, k));
  return ctx;
}

std::optional<std::size_t> Context::index_of(const std::string& name) const {
  for (std::size_t k = 0; k < vars_.size(); ++k)
    if (vars_[k].name == name) return k;
  return std::nullopt;
}

std::size_t Context::require(const std::string& name) const {
  auto k = index_of(name);
  if (!k) fail(ErrorCode::ResolveError, "unknown variable '" + name + "'");
  return *k;
}

const CycloScalar& Context::root(std::int64_t k) const {
  k %= conductor_;
  if (k < 0) k += conductor_;
  return roots_[static_cast<std::size_t>(k)];
}

ContextPtr Context::with_truncation(std::optional<int> t) const { return make(factor_, vars_, t); }

ContextPtr Context::extended_with(const std::vector<Variable>& extra) const {
  auto vars = vars_;
  vars.insert(vars.end(), extra.begin(), extra.end());
  return make(factor_, std::move(vars), truncation_);
}

std::vector<std::size_t> Context::coordinates() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < vars_.size(); ++k)
    if (vars_[k].is_coordinate()) out.push_back(k);
  return out;
}

std::string Context::describe() const {
  std::string out = "[";
  for (std::size_t k = 0; k < vars_.size(); ++k) {
    const auto& v = vars_[k];
    out += (k ? ", " : "") + v.name + ":" + to_string(v.kind) + v.degree.to_string();
  }
  return out + "]";
}

bool same_context(const ContextPtr& a, const ContextPtr& b) { return a == b || (a && b && *a == *b); }

void require_same_context(const ContextPtr& a, const ContextPtr& b, const char* where) {
  if (!same_context(a, b)) fail(ErrorCode::ContextMismatch, std::string(where) + ": operands live in different contexts");
}

}  // namespace rhocalc
