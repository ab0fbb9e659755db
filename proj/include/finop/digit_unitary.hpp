#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "finop/error.hpp"
#include "finop/grid.hpp"
#include "finop/operator.hpp"
#include "finop/rational.hpp"

namespace finop {

namespace detail {

inline std::int64_t factorial(int n) {
  std::int64_t f = 1;
  for (int i = 2; i <= n; ++i) f = checked_mul(f, i);
  return f;
}

inline std::int64_t checked_pow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

}  // namespace detail

/// Mixed-radix expansion
///
///   x = x_1/M + x_2/(M (2!)^N) + x_3/(M (3!)^N) + ...
///
/// with x_1 in {0..M-1} and x_i in {0..i^N-1}, truncated at `depth`.
struct DigitExpansion {
  std::int64_t x1 = 0;
  std::vector<std::int64_t> digits;  // x_2, x_3, ..., x_depth
  int depth = 1;
  Rational partial;   // value of the truncated sum
  Rational residual;  // x - partial, in [0, 1/(M (depth!)^N))

  std::int64_t digit(int i) const {
    if (i == 1) return x1;
    return digits.at(static_cast<std::size_t>(i - 2));
  }
};

inline DigitExpansion digits(const Rational& x, int N, int M, int depth) {
  if (x < Rational(0) || x >= Rational(1))
    throw Error("digits: x=" + x.str() + " outside [0,1)");
  if (N < 1 || M < 1 || depth < 1) throw Error("digits: N, M and depth must be positive");
  DigitExpansion e;
  e.depth = depth;
  e.x1 = (x * Rational(M)).floor();
  e.partial = Rational(e.x1, M);
  for (int i = 2; i <= depth; ++i) {
    const std::int64_t scale = detail::checked_mul(M, detail::checked_pow(detail::factorial(i), N));
    const std::int64_t d = ((x - e.partial) * Rational(scale)).floor();
    e.digits.push_back(d);
    e.partial += Rational(d, scale);
  }
  e.residual = x - e.partial;
  return e;
}

/// A bijection {0..i^N-1} <-> {0..i-1}^N used at each digit position.
struct CellMap {
  std::function<CellIndex(int i, std::int64_t d, int N)> unrank;
  std::function<std::int64_t(int i, const CellIndex& cell)> rank;
};

inline void check_cell_digit(int i, std::int64_t d, int N) {
  if (i < 2) throw Error("cell_map: digit position must be >= 2");
  if (d < 0 || d >= detail::checked_pow(i, N))
    throw Error("cell_map: digit " + std::to_string(d) + " outside 0.." + std::to_string(detail::checked_pow(i, N) - 1));
}

/// Lexicographic unranking: d written base i with N digits, axis 1 first.
inline CellIndex cell_map(int i, std::int64_t d, int N) {
  check_cell_digit(i, d, N);
  CellIndex c(static_cast<std::size_t>(N));
  for (int a = N - 1; a >= 0; --a) {
    c[static_cast<std::size_t>(a)] = static_cast<int>(d % i);
    d /= i;
  }
  return c;
}

inline std::int64_t cell_unmap(int i, const CellIndex& cell) {
  std::int64_t d = 0;
  for (int v : cell) {
    if (v < 0 || v >= i) throw Error("cell_unmap: coordinate out of range");
    d = d * i + v;
  }
  return d;
}

/// Boustrophedon order: like lexicographic, but each axis after the first
/// runs backwards whenever the preceding prefix is odd. Adjacent digits map
/// to adjacent cells.
inline CellIndex serpentine_cell_map(int i, std::int64_t d, int N) {
  CellIndex c = cell_map(i, d, N);
  std::int64_t prefix = 0;
  for (std::size_t a = 0; a < c.size(); ++a) {
    if (prefix % 2 == 1) c[a] = i - 1 - c[a];
    prefix = prefix * i + c[a];
  }
  return c;
}

inline std::int64_t serpentine_cell_unmap(int i, const CellIndex& cell) {
  CellIndex lex(cell.size());
  std::int64_t prefix = 0;
  for (std::size_t a = 0; a < cell.size(); ++a) {
    lex[a] = prefix % 2 == 1 ? i - 1 - cell[a] : cell[a];
    prefix = prefix * i + cell[a];
  }
  return cell_unmap(i, lex);
}

inline CellMap lexicographic_order() { return {cell_map, cell_unmap}; }
inline CellMap serpentine_order() { return {serpentine_cell_map, serpentine_cell_unmap}; }

/// Truncated sum phi_2(x_2)/2! + ... + phi_n(x_n)/n! for x in [0, 1/M).
inline std::vector<Rational> bphi(const Rational& x, int N, int M, int depth,
                                  const CellMap& order = lexicographic_order()) {
  if (x < Rational(0) || x * Rational(M) >= Rational(1))
    throw Error("bphi: x=" + x.str() + " outside [0, 1/M)");
  const DigitExpansion e = digits(x, N, M, depth);
  std::vector<Rational> point(static_cast<std::size_t>(N), Rational(0));
  for (int i = 2; i <= depth; ++i) {
    const CellIndex c = order.unrank(i, e.digit(i), N);
    const Rational w(1, detail::factorial(i));
    for (std::size_t a = 0; a < point.size(); ++a) point[a] += Rational(c[a]) * w;
  }
  return point;
}

/// Level-n realization of the digit unitary: interval k of the (1D, scalar)
/// grid with M (n!)^N cells goes to (component, cube cell) on the
/// (N, M, n!) grid. Targets are stored as basis indices cell*M + component.
class CellPermutation {
 public:
  CellPermutation() = default;
  CellPermutation(int N, int M, int level, std::vector<std::size_t> forward)
      : N_(N), M_(M), level_(level), p_(static_cast<int>(detail::factorial(level))),
        forward_(std::move(forward)), inverse_(forward_.size(), forward_.size()) {
    for (std::size_t k = 0; k < forward_.size(); ++k) {
      const std::size_t t = forward_[k];
      if (t >= forward_.size() || inverse_[t] != forward_.size())
        throw Error("cell permutation is not a bijection");
      inverse_[t] = k;
    }
  }

  int N() const noexcept { return N_; }
  int M() const noexcept { return M_; }
  int level() const noexcept { return level_; }
  std::size_t size() const noexcept { return forward_.size(); }

  GridSpec ode_grid() const { return GridSpec(1, 1, static_cast<int>(forward_.size())); }
  GridSpec pde_grid() const { return GridSpec(N_, M_, p_); }

  const std::vector<std::size_t>& forward() const noexcept { return forward_; }
  const std::vector<std::size_t>& inverse() const noexcept { return inverse_; }

  int component(std::size_t k) const { return static_cast<int>(forward_.at(k) % static_cast<std::size_t>(M_)); }
  CellIndex cell(std::size_t k) const { return unflatten(forward_.at(k) / static_cast<std::size_t>(M_), N_, p_); }

  /// Dense P with P(forward[k], k) = 1, so that v = P u.
  Eigen::MatrixXcd matrix() const {
    const auto K = static_cast<Eigen::Index>(size());
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(K, K);
    for (std::size_t k = 0; k < size(); ++k)
      P(static_cast<Eigen::Index>(forward_[k]), static_cast<Eigen::Index>(k)) = 1.0;
    return P;
  }

 private:
  int N_ = 1;
  int M_ = 1;
  int level_ = 1;
  int p_ = 1;
  std::vector<std::size_t> forward_;
  std::vector<std::size_t> inverse_;
};

/// Builds the level-n permutation from the digits of each interval's left
/// endpoint k / (M (n!)^N), computed in integer mixed radix.
inline CellPermutation build_permutation(int N, int M, int level,
                                         const CellMap& order = lexicographic_order()) {
  if (N < 1 || M < 1 || level < 1) throw Error("build_permutation: N, M and level must be positive");
  const std::int64_t p = detail::factorial(level);
  const std::int64_t cube = detail::checked_pow(p, N);
  const std::int64_t K = detail::checked_mul(M, cube);
  if (static_cast<std::size_t>(K) > max_k()) throw SizeLimitExceeded(static_cast<std::size_t>(K), max_k());

  // tail[i] = prod_{l > i} l^N: weight of digit x_i inside the cube index
  std::vector<std::int64_t> tail(static_cast<std::size_t>(level + 1), 1);
  for (int i = level - 1; i >= 1; --i)
    tail[static_cast<std::size_t>(i)] =
        tail[static_cast<std::size_t>(i + 1)] * detail::checked_pow(i + 1, N);

  std::vector<std::size_t> forward(static_cast<std::size_t>(K));
  for (std::int64_t k = 0; k < K; ++k) {
    const std::int64_t m = k / cube;
    const std::int64_t rem = k % cube;
    CellIndex coord(static_cast<std::size_t>(N), 0);
    for (int i = 2; i <= level; ++i) {
      const std::int64_t xi = (rem / tail[static_cast<std::size_t>(i)]) % detail::checked_pow(i, N);
      const CellIndex c = order.unrank(i, xi, N);
      const std::int64_t weight = p / detail::factorial(i);
      for (std::size_t a = 0; a < coord.size(); ++a) coord[a] += static_cast<int>(c[a] * weight);
    }
    forward[static_cast<std::size_t>(k)] = flatten(coord, static_cast<int>(p)) * static_cast<std::size_t>(M) +
                                           static_cast<std::size_t>(m);
  }
  return CellPermutation(N, M, level, std::move(forward));
}

/// U: L2(T) -> L2(T^N, C^M) at level n, as a coordinate permutation of
/// normalized-indicator coefficients.
inline GridVector apply_unitary(const CellPermutation& P, const GridVector& u) {
  require_same_grid(u.grid, P.ode_grid(), "apply_unitary");
  GridVector v = GridVector::zero(P.pde_grid());
  for (std::size_t k = 0; k < P.size(); ++k)
    v.values(static_cast<Eigen::Index>(P.forward()[k])) = u.values(static_cast<Eigen::Index>(k));
  return v;
}

inline GridVector apply_unitary_inverse(const CellPermutation& P, const GridVector& v) {
  require_same_grid(v.grid, P.pde_grid(), "apply_unitary_inverse");
  GridVector u = GridVector::zero(P.ode_grid());
  for (std::size_t k = 0; k < P.size(); ++k)
    u.values(static_cast<Eigen::Index>(k)) = v.values(static_cast<Eigen::Index>(P.forward()[k]));
  return u;
}

}  // namespace finop
