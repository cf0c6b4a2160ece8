#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "rhocalc/context.hpp"
#include "rhocalc/errors.hpp"

namespace rhocalc::dsl {

/// 1-based line and column of the first character, length in characters.
struct Span {
  int line = 0;
  int col = 0;
  int length = 0;
};

/// Error raised while parsing or running a session, located in the source.
class SourceError : public Error {
 public:
  SourceError(ErrorCode code, Span span, const std::string& message);
  const Span& span() const noexcept { return span_; }

 private:
  Span span_;
};

struct Name {
  std::string text;
  Span span;
};

struct Expr {
  enum class Kind { Number, Zeta, Name, Partial, Neg, Add, Sub, Mul, Div, Pow };
  Kind kind = Kind::Number;
  Rational number;
  /// Zeta order or Pow exponent.
  std::int64_t n = 0;
  /// Variable or value name (Name), coordinate name (Partial).
  std::string name;
  std::vector<Expr> args;
  Span span;
};

struct DegreeLit {
  std::vector<std::int64_t> comps;
  Span span;
};

struct SpaceRef {
  enum class Kind { Chart, DeRham, ShiftedCotangent };
  Kind kind = Kind::Chart;
  Name chart;
  std::optional<DegreeLit> shift;
  Span span;
  /// Canonical text: U, derham(U), tstar(U, (1)).
  std::string key() const;
};

struct GroupDecl {
  GroupSpec group;
};

struct FactorDecl {
  enum class Preset { Super, Trivial, Torus, Phases };
  Preset preset = Preset::Super;
  Span preset_span;
  std::vector<std::vector<Rational>> phases;
  std::optional<GroupSpec> group;
  bool prime = false;
};

struct VarDecl {
  Name name;
  VarKind kind = VarKind::Base;
  std::optional<DegreeLit> degree;
  std::optional<bool> odd;
  bool invertible = false;
  bool nilpotent = false;
};

struct ChartDecl {
  Name name;
  std::optional<Name> like;
  std::vector<VarDecl> vars;
};

struct TransitionDecl {
  Name from, to;
  std::vector<std::pair<Name, Expr>> images;
};

struct AtlasDecl {
  Name name;
  std::vector<Name> charts;
};

struct BundleDecl {
  Name name;
  bool cotangent = false;
  bool pi = false;
  std::optional<DegreeLit> shift;
  Name atlas;
};

struct ValueDecl {
  enum class Kind { Poly, Derivation };
  Kind kind = Kind::Poly;
  Name name;
  std::optional<SpaceRef> space;
  Expr value;
};

struct MatrixDecl {
  Name name;
  std::optional<SpaceRef> space;
  std::vector<std::vector<Expr>> entries;
  std::optional<DegreeLit> degree;
  std::vector<DegreeLit> rows;
  std::optional<std::vector<DegreeLit>> cols;
};

struct VolumeDecl {
  Name name;
  std::optional<SpaceRef> space;
  std::optional<Name> atlas;
  /// One unnamed density for a single chart, else chart name and density.
  std::vector<std::pair<Name, Expr>> densities;
};

/// VERB [args] [-> target] [on space] [wrt name] [key=value ...];
struct Command {
  Name verb;
  std::vector<Expr> args;
  std::optional<Name> target;
  std::optional<SpaceRef> space;
  std::optional<Name> wrt;
  std::vector<std::pair<Name, Expr>> options;
};

using Statement = std::variant<GroupDecl, FactorDecl, ChartDecl, TransitionDecl, AtlasDecl, BundleDecl, ValueDecl,
                               MatrixDecl, VolumeDecl, Command>;

struct Item {
  Statement stmt;
  Span span;
  /// Source text with whitespace collapsed and the final ';' dropped.
  std::string text;

  bool is_command() const noexcept { return std::holds_alternative<Command>(stmt); }
};

struct Session {
  std::vector<Item> items;
};

/// Throws SourceError with code SyntaxError.
Session parse_session(std::string_view text);
/// A single expression, e.g. for value round trips.
Expr parse_expr(std::string_view text);
/// A degree literal: 1, -1 or (1,0).
DegreeLit parse_degree(std::string_view text);

const std::vector<std::string>& command_verbs();

}  // namespace rhocalc::dsl
