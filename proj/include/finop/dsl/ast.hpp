#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "finop/rational.hpp"
#include "finop/step_function.hpp"

namespace finop::dsl {

/// Operator expression tree. Sum and Product hold two or more children,
/// Scale and Adjoint exactly one.
struct Expr {
  enum class Kind { Sum, Product, Scale, Deriv, Mult, Identity, Adjoint };

  Kind kind = Kind::Identity;
  std::vector<Expr> children;
  Complex scalar{0.0, 0.0};  // Scale
  int axis = 0;              // Deriv
  Rational step;             // Deriv
  std::string name;          // Mult

  friend bool operator==(const Expr&, const Expr&) = default;

  static Expr sum(std::vector<Expr> terms) { return {Kind::Sum, std::move(terms)}; }
  static Expr product(std::vector<Expr> factors) { return {Kind::Product, std::move(factors)}; }
  static Expr scale(Complex c, Expr e) {
    Expr out{Kind::Scale, {std::move(e)}};
    out.scalar = c;
    return out;
  }
  static Expr deriv(int axis, Rational step) {
    Expr out{Kind::Deriv, {}};
    out.axis = axis;
    out.step = step;
    return out;
  }
  static Expr mult(std::string name) {
    Expr out{Kind::Mult, {}};
    out.name = std::move(name);
    return out;
  }
  static Expr identity() { return {Kind::Identity, {}}; }
  static Expr adjoint(Expr e) { return {Kind::Adjoint, {std::move(e)}}; }
};

/// Half-open interval [lo, hi) on the circle; lo > hi wraps through 0.
struct Interval {
  Rational lo;
  Rational hi;
};

struct Box {
  std::vector<Interval> axes;
  MatrixValue value;  // 1x1 for a scalar literal, meaning value * I_M
  bool scalar = false;
};

/// Named step-function coefficient given by boxes with rational corners.
/// Painter mode: later boxes overwrite earlier ones. Sum mode: overlapping
/// boxes add.
struct CoeffDef {
  std::string name;
  std::vector<Box> boxes;
  bool additive = false;
  int line = 0;
};

using Environment = std::map<std::string, CoeffDef>;

/// A parsed `.fop` file.
struct Program {
  std::optional<int> N;
  std::optional<int> M;
  Environment env;
  Expr expr;
};

}  // namespace finop::dsl
