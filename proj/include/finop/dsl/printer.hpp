#pragma once

#include <charconv>
#include <cmath>
#include <string>

#include "finop/dsl/ast.hpp"

namespace finop::dsl {

namespace detail {

// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

enum class Level { Expr, Term, Factor };

inline std::string print(const Expr& e, Level level);

inline std::string wrap(const std::string& s, bool parens) { return parens ? "(" + s + ")" : s; }

inline std::string print(const Expr& e, Level level) {
  switch (e.kind) {
    case Expr::Kind::Sum: {
      std::string out;
      for (const auto& t : e.children) {
        if (!out.empty()) out += " + ";
        out += print(t, Level::Term);
      }
      return wrap(out, level != Level::Expr);
    }
    case Expr::Kind::Product: {
      std::string out;
      for (const auto& f : e.children) {
        if (!out.empty()) out += " * ";
        out += print(f, Level::Factor);
      }
      return wrap(out, level == Level::Factor);
    }
    case Expr::Kind::Scale: {
      std::string out = "(" + format_double(e.scalar.real()) + (std::signbit(e.scalar.imag()) ? "-" : "+") +
                        format_double(std::abs(e.scalar.imag())) + "i) * " +
                        print(e.children.front(), Level::Factor);
      return wrap(out, level == Level::Factor);
    }
    case Expr::Kind::Deriv:
      return "D(" + std::to_string(e.axis) + "," + e.step.str() + ")";
    case Expr::Kind::Mult:
      return "M(" + e.name + ")";
    case Expr::Kind::Identity:
      return "I";
    case Expr::Kind::Adjoint:
      return "adj(" + print(e.children.front(), Level::Expr) + ")";
  }
  return {};
}

}  // namespace detail

/// Canonical text form; parse_expression(print(e)) == e.
inline std::string print(const Expr& e) { return detail::print(e, detail::Level::Expr); }

}  // namespace finop::dsl
