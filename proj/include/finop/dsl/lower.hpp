#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "finop/dsl/ast.hpp"
#include "finop/error.hpp"
#include "finop/operator.hpp"
#include "finop/rational.hpp"

namespace finop::dsl {

namespace detail {

inline void collect_names(const Expr& e, std::set<std::string>& out) {
  if (e.kind == Expr::Kind::Mult) out.insert(e.name);
  for (const auto& c : e.children) collect_names(c, out);
}

inline void collect_step_denominators(const Expr& e, std::int64_t& p) {
  if (e.kind == Expr::Kind::Deriv) p = finop::detail::checked_lcm(p, e.step.den());
  for (const auto& c : e.children) collect_step_denominators(c, p);
}

inline const CoeffDef& lookup(const Environment& env, const std::string& name) {
  auto it = env.find(name);
  if (it == env.end()) throw Error("unknown coefficient '" + name + "'");
  return it->second;
}

// Cell [c/p, (c+1)/p) lies inside the half-open (possibly wrapping) interval.
inline bool cell_inside(const Interval& iv, std::int64_t c, std::int64_t p) {
  const Rational lo(c, p), hi(c + 1, p);
  if (iv.lo < iv.hi) return iv.lo <= lo && hi <= iv.hi;
  return lo >= iv.lo || hi <= iv.hi;
}

}  // namespace detail

/// Minimal grid: lcm of every derivative step denominator and every box
/// endpoint denominator of the coefficients the expression references.
inline int grid_for(const Expr& e, const Environment& env) {
  std::int64_t p = 1;
  detail::collect_step_denominators(e, p);
  std::set<std::string> names;
  detail::collect_names(e, names);
  for (const auto& name : names) {
    for (const auto& box : detail::lookup(env, name).boxes)
      for (const auto& iv : box.axes) {
        p = finop::detail::checked_lcm(p, iv.lo.den());
        p = finop::detail::checked_lcm(p, iv.hi.den());
      }
  }
  if (p > (1 << 20)) throw Error("grid p=" + std::to_string(p) + " is too fine");
  return static_cast<int>(p);
}

/// Rasterizes a coefficient definition on a grid whose cells are aligned
/// with every box corner. Cells outside all boxes are zero.
inline StepFunction rasterize(const CoeffDef& def, const GridSpec& grid) {
  std::vector<MatrixValue> values(grid.cell_count(), MatrixValue::Zero(grid.M, grid.M));
  for (const auto& box : def.boxes) {
    if (static_cast<int>(box.axes.size()) != grid.N)
      throw Error("coefficient '" + def.name + "' has " + std::to_string(box.axes.size()) +
                  "-dimensional boxes but N=" + std::to_string(grid.N));
    MatrixValue v;
    if (box.scalar) {
      v = box.value(0, 0) * MatrixValue::Identity(grid.M, grid.M);
    } else {
      if (box.value.rows() != grid.M)
        throw Error("coefficient '" + def.name + "' has " + std::to_string(box.value.rows()) + "x" +
                    std::to_string(box.value.cols()) + " values but M=" + std::to_string(grid.M));
      v = box.value;
    }
    for (const auto& iv : box.axes)
      for (const Rational& r : {iv.lo, iv.hi})
        if (!(r * Rational(grid.p)).is_integer())
          throw RefinementRequired("coefficient '" + def.name + "' corner " + r.str() +
                                       " is not aligned with p=" + std::to_string(grid.p),
                                   finop::detail::checked_lcm(grid.p, r.den()));
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      const CellIndex cell = unflatten(c, grid.N, grid.p);
      bool inside = true;
      for (int a = 0; a < grid.N && inside; ++a)
        inside = detail::cell_inside(box.axes[static_cast<std::size_t>(a)], cell[static_cast<std::size_t>(a)], grid.p);
      if (!inside) continue;
      if (def.additive)
        values[c] += v;
      else
        values[c] = v;
    }
  }
  return StepFunction(grid, std::move(values));
}

/// Evaluates the expression on an explicit grid. Every step and box corner
/// must be representable there.
inline FiniteOperator lower_on(const Expr& e, const Environment& env, const GridSpec& grid) {
  switch (e.kind) {
    case Expr::Kind::Sum: {
      FiniteOperator acc = lower_on(e.children.front(), env, grid);
      for (std::size_t i = 1; i < e.children.size(); ++i) acc = op_add(acc, lower_on(e.children[i], env, grid));
      return acc;
    }
    case Expr::Kind::Product: {
      FiniteOperator acc = lower_on(e.children.front(), env, grid);
      for (std::size_t i = 1; i < e.children.size(); ++i)
        acc = op_compose(acc, lower_on(e.children[i], env, grid));
      return acc;
    }
    case Expr::Kind::Scale:
      return op_scale(e.scalar, lower_on(e.children.front(), env, grid));
    case Expr::Kind::Deriv:
      return derivative(grid, e.axis, e.step);
    case Expr::Kind::Mult:
      return multiplication(rasterize(detail::lookup(env, e.name), grid));
    case Expr::Kind::Identity:
      return FiniteOperator::identity(grid);
    case Expr::Kind::Adjoint:
      return op_adjoint(lower_on(e.children.front(), env, grid));
  }
  throw Error("corrupt expression node");
}

/// Lowers onto the minimal common grid (see grid_for).
inline FiniteOperator lower(const Expr& e, const Environment& env, int N, int M) {
  return lower_on(e, env, GridSpec(N, M, grid_for(e, env)));
}

inline FiniteOperator lower(const Program& prog, std::optional<int> N = std::nullopt,
                            std::optional<int> M = std::nullopt) {
  return lower(prog.expr, prog.env, N.value_or(prog.N.value_or(1)), M.value_or(prog.M.value_or(1)));
}

}  // namespace finop::dsl
