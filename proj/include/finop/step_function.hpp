#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "finop/error.hpp"
#include "finop/grid.hpp"

namespace finop {

using Complex = std::complex<double>;
using MatrixValue = Eigen::MatrixXcd;

/// A matrix-valued function on T^N that is constant on every cell of the
/// uniform 1/p grid. Values are stored densely, one M x M matrix per cell in
/// flat (lexicographic) order.
class StepFunction {
 public:
  StepFunction() = default;

  StepFunction(GridSpec grid, std::vector<MatrixValue> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.cell_count())
      throw Error("step function needs " + std::to_string(grid_.cell_count()) + " cell values, got " +
                  std::to_string(values_.size()));
    for (const auto& v : values_) {
      if (v.rows() != grid_.M || v.cols() != grid_.M)
        throw Error("step function cell value is not " + std::to_string(grid_.M) + "x" +
                    std::to_string(grid_.M));
    }
  }

  static StepFunction constant(const GridSpec& grid, const MatrixValue& value) {
    return StepFunction(grid, std::vector<MatrixValue>(grid.cell_count(), value));
  }
  static StepFunction zero(const GridSpec& grid) {
    return constant(grid, MatrixValue::Zero(grid.M, grid.M));
  }
  static StepFunction identity(const GridSpec& grid) {
    return constant(grid, MatrixValue::Identity(grid.M, grid.M));
  }

  const GridSpec& grid() const noexcept { return grid_; }
  const std::vector<MatrixValue>& values() const noexcept { return values_; }
  const MatrixValue& at(std::size_t flat_cell) const { return values_.at(flat_cell); }
  const MatrixValue& at(const CellIndex& cell) const { return values_.at(flatten(cell, grid_.p)); }

  /// True when every entry of every cell is exactly zero.
  bool is_exact_zero() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](const MatrixValue& v) { return (v.array() == Complex(0.0)).all(); });
  }

  friend bool operator==(const StepFunction& a, const StepFunction& b) {
    if (!(a.grid_ == b.grid_)) return false;
    for (std::size_t c = 0; c < a.values_.size(); ++c)
      if (a.values_[c] != b.values_[c]) return false;
    return true;
  }

 private:
  GridSpec grid_;
  std::vector<MatrixValue> values_;
};

inline StepFunction step_add(const StepFunction& f, const StepFunction& g) {
  require_same_grid(f.grid(), g.grid(), "step_add");
  std::vector<MatrixValue> out(f.values().size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = f.at(c) + g.at(c);
  return StepFunction(f.grid(), std::move(out));
}

inline StepFunction step_scale(Complex alpha, const StepFunction& f) {
  std::vector<MatrixValue> out(f.values().size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = alpha * f.at(c);
  return StepFunction(f.grid(), std::move(out));
}

inline StepFunction step_mul(const StepFunction& f, const StepFunction& g) {
  require_same_grid(f.grid(), g.grid(), "step_mul");
  std::vector<MatrixValue> out(f.values().size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = f.at(c) * g.at(c);
  return StepFunction(f.grid(), std::move(out));
}

inline StepFunction step_adjoint(const StepFunction& f) {
  std::vector<MatrixValue> out(f.values().size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = f.at(c).adjoint();
  return StepFunction(f.grid(), std::move(out));
}

/// x -> f(x + h*shift), i.e. cell c takes the value of cell c + shift (mod p).
inline StepFunction step_translate(const StepFunction& f, std::size_t shift) {
  const GridSpec& g = f.grid();
  std::vector<MatrixValue> out(f.values().size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = f.at(add_mod(c, shift, g.N, g.p));
  return StepFunction(g, std::move(out));
}

/// Re-express f on the finer q-grid. Each coarse cell's value is copied to its
/// (q/p)^N children.
inline StepFunction step_refine(const StepFunction& f, int q) {
  const GridSpec& g = f.grid();
  if (q < 1 || q % g.p != 0)
    throw Error("step_refine: p=" + std::to_string(g.p) + " does not divide q=" + std::to_string(q));
  const GridSpec fine = g.with_p(q);
  const int ratio = q / g.p;
  std::vector<MatrixValue> out(fine.cell_count());
  for (std::size_t c = 0; c < out.size(); ++c) {
    CellIndex cell = unflatten(c, g.N, q);
    for (int& v : cell) v /= ratio;
    out[c] = f.at(flatten(cell, g.p));
  }
  return StepFunction(fine, std::move(out));
}

/// Largest singular value over all cells.
inline double step_supnorm(const StepFunction& f) {
  double best = 0.0;
  for (const auto& v : f.values()) {
    const double s = v.size() == 1 ? std::abs(v(0, 0))
                                   : Eigen::JacobiSVD<MatrixValue>(v).singularValues()(0);
    best = std::max(best, s);
  }
  return best;
}

inline StepFunction operator+(const StepFunction& f, const StepFunction& g) { return step_add(f, g); }
inline StepFunction operator*(const StepFunction& f, const StepFunction& g) { return step_mul(f, g); }

}  // namespace finop
