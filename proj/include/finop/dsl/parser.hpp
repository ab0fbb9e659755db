#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "finop/dsl/ast.hpp"
#include "finop/error.hpp"

namespace finop::dsl {

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& msg)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

struct Token {
  enum class Kind { Integer, Real, Imag, Ident, Punct, End };
  Kind kind = Kind::End;
  std::string text;  // for Imag: the numeric part without the trailing 'i'
  int line = 1;
  int column = 1;

  bool is(char c) const { return kind == Kind::Punct && text.size() == 1 && text[0] == c; }
  bool is_ident(std::string_view s) const { return kind == Kind::Ident && text == s; }
  bool is_number() const { return kind == Kind::Integer || kind == Kind::Real || kind == Kind::Imag; }

  std::string describe() const {
    switch (kind) {
      case Kind::End: return "end of input";
      case Kind::Imag: return "'" + text + "i'";
      default: return "'" + text + "'";
    }
  }
};

inline std::vector<Token> tokenize(std::string_view src) {
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
  auto is_ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };

  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      bool real = false;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        real = true;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          real = true;
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      t.text = std::string(src.substr(i, j - i));
      t.kind = real ? Token::Kind::Real : Token::Kind::Integer;
      if (j < src.size() && src[j] == 'i' && (j + 1 >= src.size() || !is_ident_char(src[j + 1]))) {
        t.kind = Token::Kind::Imag;
        ++j;
      }
      advance(j - i);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::string_view("()[],+-*/:;={}").find(c) != std::string_view::npos) {
      t.kind = Token::Kind::Punct;
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

/// Recursive-descent parser for operator expressions and `.fop` programs.
/// Grammar (see docs/fop-format.md):
///
///   program  := { dims | coeff } 'operator' expr | expr
///   expr     := ['+'|'-'] term { ('+'|'-') term }
///   term     := factor { '*' factor }
///   factor   := 'D' '(' int ',' rational ')' | 'M' '(' ident ')' | 'I'
///             | 'adj' '(' expr ')' | number | '(' complex ')' | '(' expr ')'
class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

  Program program() {
    Program prog;
    bool has_defs = false;
    while (peek().is_ident("dims") || peek().is_ident("coeff")) {
      has_defs = true;
      if (peek().is_ident("dims"))
        dims(prog);
      else
        coeff(prog);
    }
    if (peek().is_ident("operator")) {
      next();
      if (peek().is(':')) next();
    } else if (has_defs) {
      fail(peek(), "expected 'operator' section, found " + peek().describe());
    }
    checking_names_ = true;
    env_ = &prog.env;
    prog.expr = expression();
    expect_end();
    return prog;
  }

  Expr expression_only() {
    Expr e = expression();
    expect_end();
    return e;
  }

 private:
  // A factor is either an operator expression or a bare scalar literal.
  using Factor = std::variant<Expr, Complex>;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  [[noreturn]] static void fail(const Token& t, const std::string& msg) { throw ParseError(t.line, t.column, msg); }

  void expect(char c, const char* context) {
    if (!peek().is(c)) fail(peek(), std::string("expected '") + c + "' " + context + ", found " + peek().describe());
    next();
  }
  void expect_end() {
    if (peek().kind != Token::Kind::End) fail(peek(), "unexpected " + peek().describe() + " after expression");
  }

  int integer(const char* what) {
    bool neg = false;
    if (peek().is('-')) {
      neg = true;
      next();
    }
    const Token& t = peek();
    if (t.kind != Token::Kind::Integer) fail(t, std::string("expected ") + what + ", found " + t.describe());
    next();
    int v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc()) fail(t, std::string(what) + " out of range");
    return neg ? -v : v;
  }

  Rational rational(const char* what) {
    const Token& start = peek();
    bool neg = false;
    if (peek().is('-') || peek().is('+')) {
      neg = peek().is('-');
      next();
    }
    const Token& t = peek();
    if (t.kind != Token::Kind::Integer) fail(t, std::string("expected ") + what + ", found " + t.describe());
    next();
    std::string text = t.text;
    if (peek().is('/')) {
      next();
      const Token& d = peek();
      if (d.kind != Token::Kind::Integer) fail(d, "expected denominator, found " + d.describe());
      next();
      text += "/" + d.text;
    }
    try {
      const Rational r = Rational::parse(text);
      return neg ? -r : r;
    } catch (const Error& e) {
      fail(start, e.what());
    }
  }

  static double to_double(const Token& t) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc()) fail(t, "malformed number '" + t.text + "'");
    return v;
  }

  // ['+'|'-'] (real | imag) [ ('+'|'-') imag ]   -- returns nullopt without
  // consuming input when the tokens do not form a literal.
  std::optional<Complex> try_complex(bool allow_tail) {
    const std::size_t save = pos_;
    double sign = 1.0;
    if (peek().is('-') || peek().is('+')) {
      sign = peek().is('-') ? -1.0 : 1.0;
      next();
    }
    if (!peek().is_number()) {
      pos_ = save;
      return std::nullopt;
    }
    const Token& t = next();
    Complex c = t.kind == Token::Kind::Imag ? Complex(0.0, sign * to_double(t)) : Complex(sign * to_double(t), 0.0);
    if (allow_tail && t.kind != Token::Kind::Imag && (peek().is('+') || peek().is('-')) &&
        peek(1).kind == Token::Kind::Imag) {
      const double s = peek().is('-') ? -1.0 : 1.0;
      next();
      c.imag(s * to_double(next()));
    }
    return c;
  }

  Complex complex_value(const char* context) {
    if (peek().is('(')) {
      next();
      Complex c = complex_value(context);
      expect(')', "closing complex literal");
      return c;
    }
    if (auto c = try_complex(true)) return *c;
    fail(peek(), std::string("expected complex number ") + context + ", found " + peek().describe());
  }

  Expr expression() {
    std::vector<Expr> terms;
    bool negate_first = false;
    if (peek().is('-') || peek().is('+')) {
      negate_first = peek().is('-');
      next();
    }
    terms.push_back(term());
    if (negate_first) terms.back() = Expr::scale(Complex(-1.0, 0.0), std::move(terms.back()));
    while (peek().is('+') || peek().is('-')) {
      const bool minus = peek().is('-');
      next();
      Expr t = term();
      terms.push_back(minus ? Expr::scale(Complex(-1.0, 0.0), std::move(t)) : std::move(t));
    }
    return terms.size() == 1 ? std::move(terms.front()) : Expr::sum(std::move(terms));
  }

  static Expr as_expr(Factor f) {
    if (auto* c = std::get_if<Complex>(&f)) return Expr::scale(*c, Expr::identity());
    return std::get<Expr>(std::move(f));
  }

  // Leading scalars become Scale nodes over the rest of the term; scalars in
  // later positions stand for c*I inside the product.
  static Expr build_term(std::vector<Factor>& fs, std::size_t from) {
    if (auto* c = std::get_if<Complex>(&fs[from]); c && from + 1 < fs.size())
      return Expr::scale(*c, build_term(fs, from + 1));
    if (from + 1 == fs.size()) return as_expr(std::move(fs[from]));
    std::vector<Expr> list;
    for (std::size_t i = from; i < fs.size(); ++i) list.push_back(as_expr(std::move(fs[i])));
    return Expr::product(std::move(list));
  }

  Expr term() {
    std::vector<Factor> fs;
    fs.push_back(factor());
    while (peek().is('*')) {
      next();
      fs.push_back(factor());
    }
    return build_term(fs, 0);
  }

  Factor factor() {
    const Token& t = peek();
    if (t.is_ident("D")) {
      next();
      expect('(', "after D");
      const Token& at = peek();
      const int axis = integer("axis");
      if (axis < 1) fail(at, "axis must be >= 1");
      expect(',', "between axis and step");
      const Token& st = peek();
      const Rational step = rational("rational step");
      if (step.num() == 0) fail(st, "derivative step must be nonzero");
      expect(')', "closing D(...)");
      return Expr::deriv(axis, step);
    }
    if (t.is_ident("M")) {
      next();
      expect('(', "after M");
      const Token& id = peek();
      if (id.kind != Token::Kind::Ident) fail(id, "expected coefficient name, found " + id.describe());
      next();
      if (checking_names_ && env_->find(id.text) == env_->end()) fail(id, "unknown coefficient '" + id.text + "'");
      expect(')', "closing M(...)");
      return Expr::mult(id.text);
    }
    if (t.is_ident("I")) {
      next();
      return Expr::identity();
    }
    if (t.is_ident("adj")) {
      next();
      expect('(', "after adj");
      Expr inner = expression();
      expect(')', "closing adj(...)");
      return Expr::adjoint(std::move(inner));
    }
    if (t.is_number()) {
      const Token& n = next();
      return n.kind == Token::Kind::Imag ? Complex(0.0, to_double(n)) : Complex(to_double(n), 0.0);
    }
    if (t.is('(')) {
      next();
      const std::size_t save = pos_;
      if (auto c = try_complex(true); c && peek().is(')')) {
        next();
        return *c;
      }
      pos_ = save;
      Expr inner = expression();
      expect(')', "closing parenthesis");
      return inner;
    }
    fail(t, "expected operator factor, found " + t.describe());
  }

  void dims(Program& prog) {
    next();  // dims
    bool any = false;
    while (peek().is_ident("N") || peek().is_ident("M")) {
      const bool is_n = peek().is_ident("N");
      next();
      expect('=', "in dims");
      const Token& v = peek();
      const int value = integer("dimension");
      if (value < 1) fail(v, "dimension must be positive");
      (is_n ? prog.N : prog.M) = value;
      any = true;
      if (peek().is(',') || peek().is(';')) next();
    }
    if (!any) fail(peek(), "expected N=... or M=... after dims");
  }

  Interval interval() {
    const Token& open = peek();
    expect('[', "opening interval");
    Interval iv{rational("interval start"), Rational(0)};
    expect(',', "inside interval");
    iv.hi = rational("interval end");
    expect(')', "closing half-open interval");
    if (iv.lo < Rational(0) || iv.lo > Rational(1) || iv.hi < Rational(0) || iv.hi > Rational(1))
      fail(open, "interval endpoints must lie in [0,1]");
    if (iv.lo == iv.hi) fail(open, "empty interval [" + iv.lo.str() + "," + iv.hi.str() + ")");
    return iv;
  }

  MatrixValue matrix_value(bool& scalar) {
    if (peek().is('[') && peek(1).is('[')) {
      scalar = false;
      next();
      std::vector<std::vector<Complex>> rows;
      while (true) {
        const Token& row_start = peek();
        expect('[', "opening matrix row");
        std::vector<Complex> row;
        row.push_back(complex_value("in matrix row"));
        while (peek().is(',')) {
          next();
          row.push_back(complex_value("in matrix row"));
        }
        expect(']', "closing matrix row");
        if (!rows.empty() && row.size() != rows.front().size()) fail(row_start, "ragged matrix rows");
        rows.push_back(std::move(row));
        if (!peek().is(',')) break;
        next();
      }
      expect(']', "closing matrix");
      const auto n = static_cast<Eigen::Index>(rows.size());
      if (static_cast<std::size_t>(n) != rows.front().size()) fail(peek(), "matrix value must be square");
      MatrixValue m(n, n);
      for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      return m;
    }
    scalar = true;
    MatrixValue m(1, 1);
    m(0, 0) = complex_value("as coefficient value");
    return m;
  }

  void coeff(Program& prog) {
    const Token& kw = next();  // coeff
    const Token& id = peek();
    if (id.kind != Token::Kind::Ident) fail(id, "expected coefficient name, found " + id.describe());
    next();
    CoeffDef def;
    def.name = id.text;
    def.line = kw.line;
    if (peek().is_ident("sum")) {
      def.additive = true;
      next();
    }
    if (peek().is('=')) next();
    expect('{', "opening coefficient body");
    while (!peek().is('}')) {
      Box box;
      const Token& start = peek();
      box.axes.push_back(interval());
      while (peek().is('[') || peek().is_ident("x")) {
        if (peek().is_ident("x")) next();
        box.axes.push_back(interval());
      }
      if (!box.axes.empty() && !def.boxes.empty() && box.axes.size() != def.boxes.front().axes.size())
        fail(start, "box dimension differs from earlier boxes of '" + def.name + "'");
      expect(':', "between box and value");
      box.value = matrix_value(box.scalar);
      def.boxes.push_back(std::move(box));
      if (peek().is(';') || peek().is(',')) next();
    }
    next();  // }
    if (prog.env.count(def.name)) fail(id, "coefficient '" + def.name + "' defined twice");
    prog.env.emplace(def.name, std::move(def));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool checking_names_ = false;
  const Environment* env_ = nullptr;
};

/// Parses a full `.fop` program; unknown coefficient names are errors.
inline Program parse(std::string_view source) { return Parser(source).program(); }

/// Parses a bare operator expression without resolving coefficient names.
inline Expr parse_expression(std::string_view source) { return Parser(source).expression_only(); }

}  // namespace finop::dsl
