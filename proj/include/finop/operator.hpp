#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "finop/error.hpp"
#include "finop/grid.hpp"
#include "finop/rational.hpp"
#include "finop/step_function.hpp"

namespace finop {

/// Discretized function on the grid: M components per cell, in the basis of
/// L2-normalized cell indicators. Index of (cell c, component m) is c*M + m.
struct GridVector {
  GridSpec grid;
  Eigen::VectorXcd values;

  GridVector() = default;
  GridVector(GridSpec g, Eigen::VectorXcd v) : grid(g), values(std::move(v)) {
    if (static_cast<std::size_t>(values.size()) != grid.dimension())
      throw Error("grid vector length " + std::to_string(values.size()) + " does not match K=" +
                  std::to_string(grid.dimension()));
  }

  static GridVector zero(const GridSpec& g) {
    return GridVector(g, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(g.dimension())));
  }
};

/// Element of the finite algebra in canonical shift-coefficient form:
///
///   (A u)(x) = sum_j A_j(x) u(x + h j),   j in Z_p^N, h = 1/p.
///
/// Shifts are stored by flat index; coefficients are functions of the
/// unshifted argument x. Exactly-zero coefficients are never stored.
class FiniteOperator {
 public:
  using TermMap = std::map<std::size_t, StepFunction>;

  FiniteOperator() = default;
  explicit FiniteOperator(const GridSpec& grid) : grid_(grid) {}
  FiniteOperator(const GridSpec& grid, TermMap terms) : grid_(grid), terms_(std::move(terms)) {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (it->first >= grid_.cell_count()) throw Error("shift index out of range");
      require_same_grid(grid_, it->second.grid(), "FiniteOperator term");
      it = it->second.is_exact_zero() ? terms_.erase(it) : std::next(it);
    }
  }

  static FiniteOperator zero(const GridSpec& grid) { return FiniteOperator(grid); }
  static FiniteOperator identity(const GridSpec& grid) {
    return FiniteOperator(grid, {{0, StepFunction::identity(grid)}});
  }

  const GridSpec& grid() const noexcept { return grid_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// Coefficient at a shift; zero function when absent.
  StepFunction coefficient(std::size_t shift) const {
    auto it = terms_.find(shift);
    return it == terms_.end() ? StepFunction::zero(grid_) : it->second;
  }
  StepFunction coefficient(const CellIndex& shift) const { return coefficient(flatten(shift, grid_.p)); }

  friend bool operator==(const FiniteOperator& a, const FiniteOperator& b) {
    if (!(a.grid_ == b.grid_) || a.terms_.size() != b.terms_.size()) return false;
    for (auto ia = a.terms_.begin(), ib = b.terms_.begin(); ia != a.terms_.end(); ++ia, ++ib)
      if (ia->first != ib->first || !(ia->second == ib->second)) return false;
    return true;
  }

 private:
  GridSpec grid_;
  TermMap terms_;
};

/// Finite derivative D_{i,h} u(x) = (u(x + h e_i) - u(x)) / h on a grid that
/// can represent the step h (h*p integer). Axis is 1-based.
inline FiniteOperator derivative(const GridSpec& grid, int axis, const Rational& h) {
  if (axis < 1 || axis > grid.N)
    throw Error("derivative axis " + std::to_string(axis) + " outside 1.." + std::to_string(grid.N));
  if (h.num() == 0) throw Error("derivative step must be nonzero");
  const Rational c = h * Rational(grid.p);
  if (!c.is_integer())
    throw RefinementRequired("derivative step " + h.str() + " is not representable on p=" +
                                 std::to_string(grid.p),
                             detail::checked_lcm(grid.p, h.den()));
  CellIndex shift(static_cast<std::size_t>(grid.N), 0);
  shift[static_cast<std::size_t>(axis - 1)] = static_cast<int>(((c.num() % grid.p) + grid.p) % grid.p);

  const Complex inv_h(static_cast<double>(h.den()) / static_cast<double>(h.num()), 0.0);
  const MatrixValue id = MatrixValue::Identity(grid.M, grid.M);
  StepFunction plus = StepFunction::constant(grid, inv_h * id);
  StepFunction minus = StepFunction::constant(grid, -inv_h * id);

  const std::size_t j = flatten(shift, grid.p);
  FiniteOperator::TermMap terms;
  if (j == 0) {
    terms.emplace(0, step_add(plus, minus));  // integer step: shift is trivial on the torus
  } else {
    terms.emplace(j, std::move(plus));
    terms.emplace(0, std::move(minus));
  }
  return FiniteOperator(grid, std::move(terms));
}

/// Multiplication by a step function: a single coefficient at shift 0.
inline FiniteOperator multiplication(const StepFunction& s) {
  return FiniteOperator(s.grid(), {{0, s}});
}

inline FiniteOperator op_add(const FiniteOperator& a, const FiniteOperator& b) {
  require_same_grid(a.grid(), b.grid(), "op_add");
  FiniteOperator::TermMap terms = a.terms();
  for (const auto& [j, coeff] : b.terms()) {
    auto it = terms.find(j);
    if (it == terms.end())
      terms.emplace(j, coeff);
    else
      it->second = step_add(it->second, coeff);
  }
  return FiniteOperator(a.grid(), std::move(terms));
}

inline FiniteOperator op_scale(Complex alpha, const FiniteOperator& a) {
  FiniteOperator::TermMap terms;
  for (const auto& [j, coeff] : a.terms()) terms.emplace(j, step_scale(alpha, coeff));
  return FiniteOperator(a.grid(), std::move(terms));
}

inline FiniteOperator op_sub(const FiniteOperator& a, const FiniteOperator& b) {
  return op_add(a, op_scale(Complex(-1.0, 0.0), b));
}

/// (A B)_k(x) = sum_j A_j(x) B_{k-j}(x + h j).
inline FiniteOperator op_compose(const FiniteOperator& a, const FiniteOperator& b) {
  require_same_grid(a.grid(), b.grid(), "op_compose");
  const GridSpec& g = a.grid();
  std::map<std::size_t, std::vector<MatrixValue>> acc;
  for (const auto& [j, aj] : a.terms()) {
    for (const auto& [l, bl] : b.terms()) {
      const std::size_t k = add_mod(j, l, g.N, g.p);
      auto [it, fresh] = acc.try_emplace(k);
      if (fresh) it->second.assign(g.cell_count(), MatrixValue::Zero(g.M, g.M));
      for (std::size_t c = 0; c < g.cell_count(); ++c)
        it->second[c] += aj.at(c) * bl.at(add_mod(c, j, g.N, g.p));
    }
  }
  FiniteOperator::TermMap terms;
  for (auto& [k, values] : acc) terms.emplace(k, StepFunction(g, std::move(values)));
  return FiniteOperator(g, std::move(terms));
}

/// (A*)_j(x) = A_{-j}(x + h j)^*.
inline FiniteOperator op_adjoint(const FiniteOperator& a) {
  const GridSpec& g = a.grid();
  FiniteOperator::TermMap terms;
  for (const auto& [l, al] : a.terms()) {
    const std::size_t j = neg_mod(l, g.N, g.p);
    terms.emplace(j, step_adjoint(step_translate(al, j)));
  }
  return FiniteOperator(g, std::move(terms));
}

/// out(r) = sum_j A_j(cell r) u(r + j).
inline GridVector op_apply(const FiniteOperator& a, const GridVector& u) {
  require_same_grid(a.grid(), u.grid, "op_apply");
  const GridSpec& g = a.grid();
  const Eigen::Index M = g.M;
  GridVector out = GridVector::zero(g);
  for (const auto& [j, aj] : a.terms()) {
    for (std::size_t r = 0; r < g.cell_count(); ++r) {
      const auto src = static_cast<Eigen::Index>(add_mod(r, j, g.N, g.p));
      out.values.segment(static_cast<Eigen::Index>(r) * M, M) += aj.at(r) * u.values.segment(src * M, M);
    }
  }
  return out;
}

inline FiniteOperator operator+(const FiniteOperator& a, const FiniteOperator& b) { return op_add(a, b); }
inline FiniteOperator operator-(const FiniteOperator& a, const FiniteOperator& b) { return op_sub(a, b); }
inline FiniteOperator operator*(const FiniteOperator& a, const FiniteOperator& b) { return op_compose(a, b); }
inline FiniteOperator operator*(Complex alpha, const FiniteOperator& a) { return op_scale(alpha, a); }

}  // namespace finop
