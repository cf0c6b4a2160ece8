#include "rhocalc/dsl.hpp"

#include <algorithm>
#include <cctype>

namespace rhocalc::dsl {

SourceError::SourceError(ErrorCode code, Span span, const std::string& message)
    : Error(code, message), span_(span) {}

std::string SpaceRef::key() const {
  switch (kind) {
    case Kind::Chart:
      return chart.text;
    case Kind::DeRham:
      return "derham(" + chart.text + ")";
    case Kind::ShiftedCotangent: {
      std::string d = "(";
      for (std::size_t k = 0; k < shift->comps.size(); ++k) d += (k ? "," : "") + std::to_string(shift->comps[k]);
      return "tstar(" + chart.text + ", " + d + "))";
    }
  }
  return chart.text;
}

const std::vector<std::string>& command_verbs() {
  static const std::vector<std::string> verbs{"normalize", "commutator", "det",      "ber",        "trace",
                                              "qcheck",    "cartan",     "schouten", "jacobian",   "cocycle",
                                              "divergence", "modular",   "equivalent", "scenarios"};
  return verbs;
}

namespace {

struct Token {
  enum class Kind { Ident, Int, Partial, Punct, Arrow, End };
  Kind kind = Kind::End;
  std::string text;
  Span span;
  std::size_t offset = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.span = {line, col, 1};
    t.offset = i;
    if (c == 'd' && i + 3 < src.size() && src[i + 1] == '/' && src[i + 2] == 'd' && ident_start(src[i + 3])) {
      std::size_t j = i + 3;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = Token::Kind::Partial;
      t.text = std::string(src.substr(i + 3, j - i - 3));
    } else if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(src.substr(i, j - i));
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::Kind::Int;
      t.text = std::string(src.substr(i, j - i));
    } else if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      t.kind = Token::Kind::Arrow;
      t.text = "->";
    } else if (std::string_view(";,()[]{}+-*/^=:").find(c) != std::string_view::npos) {
      t.kind = Token::Kind::Punct;
      t.text = std::string(1, c);
    } else {
      throw SourceError(ErrorCode::SyntaxError, t.span, std::string("unexpected character '") + c + "'");
    }
    std::size_t len = t.kind == Token::Kind::Partial ? t.text.size() + 3 : t.text.size();
    t.span.length = static_cast<int>(len);
    advance(len);
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Token::Kind::End;
  end.span = {line, col, 1};
  end.offset = src.size();
  out.push_back(end);
  return out;
}

Span cover(const Span& a, const Span& b) {
  if (a.line != b.line) return a;
  return {a.line, a.col, b.col + b.length - a.col};
}

class Parser {
 public:
  Parser(std::string_view src) : src_(src), toks_(lex(src)) {}

  Session session() {
    Session s;
    while (!at_end()) s.items.push_back(item());
    return s;
  }

  Expr lone_expr() {
    Expr e = expr();
    expect_end();
    return e;
  }

  DegreeLit lone_degree() {
    DegreeLit d = degree();
    expect_end();
    return d;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool is_punct(const char* p, std::size_t k = 0) const {
    return peek(k).kind == Token::Kind::Punct && peek(k).text == p;
  }
  bool is_word(const char* w, std::size_t k = 0) const {
    return peek(k).kind == Token::Kind::Ident && peek(k).text == w;
  }
  bool accept_punct(const char* p) {
    if (!is_punct(p)) return false;
    ++pos_;
    return true;
  }
  bool accept_word(const char* w) {
    if (!is_word(w)) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void unexpected(const std::string& expected) const {
    const Token& t = peek();
    std::string got = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
    throw SourceError(ErrorCode::SyntaxError, t.span, "expected " + expected + ", got " + got);
  }

  void expect_punct(const char* p) {
    if (!accept_punct(p)) unexpected(std::string("'") + p + "'");
  }
  void expect_word(const char* w) {
    if (!accept_word(w)) unexpected(std::string("'") + w + "'");
  }
  void expect_end() {
    if (!at_end()) unexpected("end of input");
  }

  Name name(const char* what = "a name") {
    if (peek().kind != Token::Kind::Ident) unexpected(what);
    const Token& t = next();
    return {t.text, t.span};
  }

  std::int64_t integer() {
    bool neg = accept_punct("-");
    if (peek().kind != Token::Kind::Int) unexpected("an integer");
    const Token& t = next();
    std::int64_t v = 0;
    try {
      v = std::stoll(t.text);
    } catch (const std::out_of_range&) {
      throw SourceError(ErrorCode::SyntaxError, t.span, "integer out of range");
    }
    return neg ? -v : v;
  }

  Rational rational() {
    bool neg = accept_punct("-");
    if (peek().kind != Token::Kind::Int) unexpected("a rational number");
    Rational q(next().text);
    if (accept_punct("/")) {
      const Token& d = peek();
      if (d.kind != Token::Kind::Int) unexpected("a denominator");
      next();
      Rational den(d.text);
      if (den == 0) throw SourceError(ErrorCode::SyntaxError, d.span, "zero denominator");
      q /= den;
    }
    q.canonicalize();
    return neg ? -q : q;
  }

  // ---- expressions

  Expr make(Expr::Kind k, Span s, std::vector<Expr> args = {}) {
    Expr e;
    e.kind = k;
    e.span = s;
    e.args = std::move(args);
    return e;
  }

  Expr expr() {
    Expr lhs = term();
    while (is_punct("+") || is_punct("-")) {
      const Token& op = next();
      Expr::Kind k = op.text == "+" ? Expr::Kind::Add : Expr::Kind::Sub;
      Span s = op.span;
      Expr rhs = term();
      lhs = make(k, s, {lhs, rhs});
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    while (is_punct("*") || is_punct("/")) {
      const Token& op = next();
      Expr::Kind k = op.text == "*" ? Expr::Kind::Mul : Expr::Kind::Div;
      Span s = op.span;
      Expr rhs = unary();
      lhs = make(k, s, {lhs, rhs});
    }
    return lhs;
  }

  Expr unary() {
    if (is_punct("-")) {
      Span s = next().span;
      return make(Expr::Kind::Neg, s, {unary()});
    }
    if (accept_punct("+")) return unary();
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (is_punct("^")) {
      Span s = next().span;
      Expr e = make(Expr::Kind::Pow, s, {base});
      e.n = integer();
      return e;
    }
    return base;
  }

  Expr atom() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Int) {
      next();
      Expr e = make(Expr::Kind::Number, t.span);
      e.number = Rational(t.text);
      return e;
    }
    if (t.kind == Token::Kind::Partial) {
      next();
      Expr e = make(Expr::Kind::Partial, t.span);
      e.name = t.text;
      return e;
    }
    if (t.kind == Token::Kind::Ident && t.text == "zeta" && is_punct("(", 1)) {
      next();
      next();
      Expr e = make(Expr::Kind::Zeta, t.span);
      e.n = integer();
      if (e.n <= 0) throw SourceError(ErrorCode::SyntaxError, t.span, "zeta order must be positive");
      expect_punct(")");
      return e;
    }
    if (t.kind == Token::Kind::Ident) {
      next();
      Expr e = make(Expr::Kind::Name, t.span);
      e.name = t.text;
      // Bundle names such as T* end in '*'.
      const Token& star = peek();
      if (is_punct("*") && star.offset == t.offset + t.text.size() &&
          (is_punct(";", 1) || is_punct(",", 1) || is_word("on", 1) || peek(1).kind == Token::Kind::End)) {
        next();
        e.name += "*";
        e.span.length += 1;
      }
      return e;
    }
    if (accept_punct("(")) {
      Expr e = expr();
      expect_punct(")");
      return e;
    }
    unexpected("an expression");
  }

  // ---- degrees and groups

  DegreeLit degree() {
    DegreeLit d;
    d.span = peek().span;
    if (accept_punct("(")) {
      if (!is_punct(")")) {
        d.comps.push_back(integer());
        while (accept_punct(",")) d.comps.push_back(integer());
      }
      expect_punct(")");
    } else {
      d.comps.push_back(integer());
    }
    d.span = cover(d.span, toks_[pos_ - 1].span);
    return d;
  }

  // (0, 1) for rank-one groups or ((0,0), (1,0)).
  std::vector<DegreeLit> tuple() {
    std::vector<DegreeLit> out;
    expect_punct("(");
    if (accept_punct(")")) return out;
    do {
      if (is_punct("(")) {
        out.push_back(degree());
      } else {
        DegreeLit d;
        d.span = peek().span;
        d.comps.push_back(integer());
        out.push_back(d);
      }
    } while (accept_punct(","));
    expect_punct(")");
    return out;
  }

  GroupSpec group() {
    if (accept_word("trivial")) return GroupSpec(0, {});
    int free = 0;
    std::vector<int> torsion;
    do {
      Span s = peek().span;
      expect_word("Z");
      if (accept_punct("^")) {
        free += static_cast<int>(integer());
      } else if (accept_punct("/")) {
        std::int64_t n = integer();
        if (n < 2) throw SourceError(ErrorCode::SyntaxError, s, "torsion order must be at least 2");
        torsion.push_back(static_cast<int>(n));
      } else {
        ++free;
      }
    } while (accept_word("x"));
    return GroupSpec(free, torsion);
  }

  std::vector<std::vector<Rational>> phase_matrix() {
    std::vector<std::vector<Rational>> q;
    expect_punct("[");
    if (!is_punct("]")) {
      do {
        expect_punct("[");
        std::vector<Rational> row;
        if (!is_punct("]")) {
          row.push_back(rational());
          while (accept_punct(",")) row.push_back(rational());
        }
        expect_punct("]");
        q.push_back(std::move(row));
      } while (accept_punct(","));
    }
    expect_punct("]");
    return q;
  }

  SpaceRef space() {
    SpaceRef s;
    s.span = peek().span;
    if (is_word("derham") && is_punct("(", 1)) {
      next();
      next();
      s.kind = SpaceRef::Kind::DeRham;
      s.chart = name("a chart name");
      expect_punct(")");
    } else if (is_word("tstar") && is_punct("(", 1)) {
      next();
      next();
      s.kind = SpaceRef::Kind::ShiftedCotangent;
      s.chart = name("a chart name");
      expect_punct(",");
      s.shift = degree();
      expect_punct(")");
    } else {
      s.chart = name("a chart or space");
    }
    s.span = cover(s.span, toks_[pos_ - 1].span);
    return s;
  }

  std::optional<SpaceRef> opt_space() {
    if (!accept_word("on")) return std::nullopt;
    return space();
  }

  // ---- statements

  Item item() {
    const Token& first = peek();
    if (first.kind != Token::Kind::Ident) unexpected("a declaration or command");
    std::size_t start = first.offset;
    Span span = first.span;
    Statement st = statement();
    std::size_t stop = toks_[pos_ - 1].offset + toks_[pos_ - 1].text.size();
    std::string raw(src_.substr(start, stop - start));
    std::string text;
    bool space = false;
    for (char c : raw) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        space = !text.empty();
        continue;
      }
      if (space) text += ' ';
      space = false;
      text += c;
    }
    while (!text.empty() && (text.back() == ';' || text.back() == ' ')) text.pop_back();
    return Item{std::move(st), span, std::move(text)};
  }

  Statement statement() {
    const std::string& w = peek().text;
    if (w == "group") return group_decl();
    if (w == "factor") return factor_decl();
    if (w == "chart") return chart_decl();
    if (w == "transition") return transition_decl();
    if (w == "atlas") return atlas_decl();
    if (w == "bundle") return bundle_decl();
    if (w == "poly" || w == "derivation") return value_decl();
    if (w == "matrix") return matrix_decl();
    if (w == "volume") return volume_decl();
    const auto& verbs = command_verbs();
    if (std::find(verbs.begin(), verbs.end(), w) != verbs.end()) return command();
    unexpected("a declaration or command");
  }

  GroupDecl group_decl() {
    next();
    GroupDecl d{group()};
    expect_punct(";");
    return d;
  }

  FactorDecl factor_decl() {
    next();
    FactorDecl d;
    d.preset_span = peek().span;
    if (accept_word("super")) {
      d.preset = FactorDecl::Preset::Super;
    } else if (accept_word("trivial")) {
      d.preset = FactorDecl::Preset::Trivial;
    } else if (accept_word("torus")) {
      d.preset = FactorDecl::Preset::Torus;
      bool paren = accept_punct("(");
      d.phases = phase_matrix();
      if (paren) expect_punct(")");
    } else if (accept_word("phases")) {
      d.preset = FactorDecl::Preset::Phases;
      d.phases = phase_matrix();
    } else {
      unexpected("super, trivial, torus or phases");
    }
    if (accept_word("on")) d.group = group();
    if (accept_word("prime")) d.prime = true;
    expect_punct(";");
    return d;
  }

  ChartDecl chart_decl() {
    next();
    ChartDecl c;
    c.name = name("a chart name");
    if (accept_word("like")) {
      c.like = name("a chart name");
      expect_punct(";");
      return c;
    }
    expect_punct("{");
    while (!accept_punct("}")) {
      VarKind kind;
      if (accept_word("base")) {
        kind = VarKind::Base;
      } else if (accept_word("formal")) {
        kind = VarKind::FormalEven;
      } else if (accept_word("param")) {
        kind = VarKind::Parameter;
      } else {
        unexpected("base, formal or param");
      }
      std::vector<Name> names{name("a variable name")};
      while (accept_punct(",")) names.push_back(name("a variable name"));
      VarDecl proto;
      proto.kind = kind;
      accept_punct(":");
      while (!is_punct(";")) {
        if (accept_word("deg")) {
          proto.degree = degree();
        } else if (accept_word("odd")) {
          proto.odd = true;
        } else if (accept_word("even")) {
          proto.odd = false;
        } else if (accept_word("invertible")) {
          proto.invertible = true;
        } else if (accept_word("nilpotent")) {
          proto.nilpotent = true;
        } else {
          unexpected("deg, odd, even, invertible, nilpotent or ';'");
        }
      }
      expect_punct(";");
      for (auto& n : names) {
        VarDecl v = proto;
        v.name = std::move(n);
        c.vars.push_back(std::move(v));
      }
    }
    accept_punct(";");
    return c;
  }

  std::vector<std::pair<Name, Expr>> assignments(const char* sep) {
    std::vector<std::pair<Name, Expr>> out;
    expect_punct("{");
    while (!accept_punct("}")) {
      Name n = name("a variable name");
      expect_punct(sep);
      Expr e = expr();
      expect_punct(";");
      out.emplace_back(std::move(n), std::move(e));
    }
    accept_punct(";");
    return out;
  }

  TransitionDecl transition_decl() {
    next();
    TransitionDecl t;
    t.from = name("a chart name");
    if (peek().kind != Token::Kind::Arrow) unexpected("'->'");
    next();
    t.to = name("a chart name");
    t.images = assignments("=");
    return t;
  }

  AtlasDecl atlas_decl() {
    next();
    AtlasDecl a;
    a.name = name("an atlas name");
    expect_punct("=");
    a.charts.push_back(name("a chart name"));
    while (accept_punct(",")) a.charts.push_back(name("a chart name"));
    expect_punct(";");
    return a;
  }

  BundleDecl bundle_decl() {
    next();
    BundleDecl b;
    // bundle [NAME =] [pi] T[*] [shift DEG] over [atlas] A;
    if (peek().kind == Token::Kind::Ident && is_punct("=", 1)) {
      b.name = name();
      next();
    }
    if (accept_word("pi")) b.pi = true;
    Span ts = peek().span;
    expect_word("T");
    if (accept_punct("*")) {
      b.cotangent = true;
      ts.length = 2;
    }
    if (b.name.text.empty()) b.name = {std::string(b.pi ? "piT" : "T") + (b.cotangent ? "*" : ""), ts};
    if (accept_word("shift")) b.shift = degree();
    expect_word("over");
    accept_word("atlas");
    b.atlas = name("an atlas name");
    expect_punct(";");
    return b;
  }

  ValueDecl value_decl() {
    ValueDecl v;
    v.kind = next().text == "poly" ? ValueDecl::Kind::Poly : ValueDecl::Kind::Derivation;
    v.name = name();
    v.space = opt_space();
    expect_punct("=");
    v.value = expr();
    expect_punct(";");
    return v;
  }

  MatrixDecl matrix_decl() {
    next();
    MatrixDecl m;
    m.name = name("a matrix name");
    m.space = opt_space();
    expect_punct("=");
    expect_punct("[");
    do {
      expect_punct("[");
      std::vector<Expr> row;
      if (!is_punct("]")) {
        row.push_back(expr());
        while (accept_punct(",")) row.push_back(expr());
      }
      expect_punct("]");
      m.entries.push_back(std::move(row));
    } while (accept_punct(","));
    expect_punct("]");
    expect_punct(":");
    if (!accept_word("deg0")) {
      expect_word("deg");
      m.degree = degree();
    }
    expect_word("rows");
    m.rows = tuple();
    if (accept_word("cols")) m.cols = tuple();
    expect_punct(";");
    return m;
  }

  VolumeDecl volume_decl() {
    next();
    VolumeDecl v;
    v.name = name("a volume name");
    if (accept_word("over")) {
      accept_word("atlas");
      v.atlas = name("an atlas name");
      v.densities = assignments(":");
      return v;
    }
    v.space = opt_space();
    expect_punct("=");
    Span s = peek().span;
    v.densities.emplace_back(Name{"", s}, expr());
    expect_punct(";");
    return v;
  }

  Command command() {
    Command c;
    c.verb = name();
    auto stops = [&] {
      return is_punct(";") || peek().kind == Token::Kind::Arrow || is_word("on") || is_word("wrt") ||
             (peek().kind == Token::Kind::Ident && is_punct("=", 1));
    };
    if (!stops()) {
      c.args.push_back(expr());
      while (accept_punct(",")) c.args.push_back(expr());
    }
    if (peek().kind == Token::Kind::Arrow) {
      next();
      c.target = name("a chart name");
    }
    c.space = opt_space();
    if (accept_word("wrt")) c.wrt = name("a volume name");
    while (peek().kind == Token::Kind::Ident && is_punct("=", 1)) {
      Name k = name();
      next();
      c.options.emplace_back(std::move(k), expr());
    }
    expect_punct(";");
    return c;
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Session parse_session(std::string_view text) { return Parser(text).session(); }

Expr parse_expr(std::string_view text) { return Parser(text).lone_expr(); }

DegreeLit parse_degree(std::string_view text) { return Parser(text).lone_degree(); }

}  // namespace rhocalc::dsl
