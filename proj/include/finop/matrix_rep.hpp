#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "finop/error.hpp"
#include "finop/grid.hpp"
#include "finop/operator.hpp"

namespace finop {

/// The K x K block matrix B_A (K = M p^N) of a finite operator. Rows and
/// columns are indexed by (cell, component) with index cell*M + component;
/// block (r, j) holds A_{j-r} evaluated on cell r.
struct RepMatrix {
  GridSpec grid;
  Eigen::MatrixXcd entries;

  RepMatrix() = default;
  RepMatrix(GridSpec g, Eigen::MatrixXcd m) : grid(g), entries(std::move(m)) {
    const auto K = static_cast<Eigen::Index>(grid.dimension());
    if (entries.rows() != K || entries.cols() != K)
      throw Error("matrix is " + std::to_string(entries.rows()) + "x" + std::to_string(entries.cols()) +
                  " but grid " + grid.str() + " needs K=" + std::to_string(K));
  }

  Eigen::Index size() const noexcept { return entries.rows(); }
};

inline void check_dimension(std::size_t K) {
  if (K > max_k()) throw SizeLimitExceeded(K, max_k());
}

inline RepMatrix to_matrix(const FiniteOperator& a) {
  const GridSpec& g = a.grid();
  check_dimension(g.dimension());
  const auto K = static_cast<Eigen::Index>(g.dimension());
  const Eigen::Index M = g.M;
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(K, K);
  for (const auto& [shift, coeff] : a.terms()) {
    for (std::size_t r = 0; r < g.cell_count(); ++r) {
      const std::size_t j = add_mod(r, shift, g.N, g.p);
      B.block(static_cast<Eigen::Index>(r) * M, static_cast<Eigen::Index>(j) * M, M, M) = coeff.at(r);
    }
  }
  return RepMatrix(g, std::move(B));
}

/// Inverse of to_matrix: A_j(cell r) is block (r, r + j).
inline FiniteOperator from_matrix(const RepMatrix& b) {
  const GridSpec& g = b.grid;
  const Eigen::Index M = g.M;
  const std::size_t cells = g.cell_count();
  FiniteOperator::TermMap terms;
  for (std::size_t shift = 0; shift < cells; ++shift) {
    std::vector<MatrixValue> values(cells);
    bool any = false;
    for (std::size_t r = 0; r < cells; ++r) {
      const std::size_t j = add_mod(r, shift, g.N, g.p);
      values[r] = b.entries.block(static_cast<Eigen::Index>(r) * M, static_cast<Eigen::Index>(j) * M, M, M);
      any = any || !(values[r].array() == Complex(0.0)).all();
    }
    if (any) terms.emplace(shift, StepFunction(g, std::move(values)));
  }
  return FiniteOperator(g, std::move(terms));
}

/// Eigenvalue multiset sorted by (real, imag).
struct Spectrum {
  std::vector<Complex> eigenvalues;

  std::size_t size() const noexcept { return eigenvalues.size(); }
};

inline void sort_spectrum(std::vector<Complex>& ev) {
  std::sort(ev.begin(), ev.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
}

inline Spectrum spectrum(const Eigen::MatrixXcd& m) {
  Spectrum s;
  if (m.rows() == 0) return s;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalFailure("eigensolver did not converge");
  const auto& ev = solver.eigenvalues();
  s.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  for (const auto& z : s.eigenvalues)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw NumericalFailure("eigensolver produced non-finite eigenvalue");
  sort_spectrum(s.eigenvalues);
  return s;
}

inline Spectrum spectrum(const RepMatrix& b) { return spectrum(b.entries); }

/// Each eigenvalue repeated `times` times.
inline Spectrum repeat_spectrum(const Spectrum& s, std::size_t times) {
  Spectrum out;
  out.eigenvalues.reserve(s.size() * times);
  for (const auto& z : s.eigenvalues)
    for (std::size_t i = 0; i < times; ++i) out.eigenvalues.push_back(z);
  sort_spectrum(out.eigenvalues);
  return out;
}

/// Largest pairwise distance between two eigenvalue multisets. Both lists
/// are walked in (re, im) order and each eigenvalue is paired with its
/// nearest unpaired partner, so clusters whose real parts differ only by
/// round-off still pair up correctly. Infinite when sizes differ.
inline double spectral_deviation(const Spectrum& a, const Spectrum& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const auto& z : a.eigenvalues) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (used[i]) continue;
      const double d = std::abs(z - b.eigenvalues[i]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

inline double operator_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
}

inline double smallest_singular_value(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  const auto sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues();
  return sv(sv.size() - 1);
}

/// Invertibility verdict: smallest singular value above rel_tol * norm.
inline bool is_invertible(const Eigen::MatrixXcd& m, double rel_tol = 1e-10) {
  if (m.size() == 0) return true;
  const auto sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues();
  return sv(0) > 0.0 && sv(sv.size() - 1) > rel_tol * sv(0);
}

/// exp(t B) by scaling-and-squaring with a Pade approximant.
inline Eigen::MatrixXcd matrix_exp(const Eigen::MatrixXcd& b, double t) {
  const Eigen::MatrixXcd scaled = t * b;
  Eigen::MatrixXcd out = scaled.exp();
  if (!out.allFinite()) throw NumericalFailure("matrix exponential overflowed");
  return out;
}

inline RepMatrix matrix_exp(const RepMatrix& b, double t) { return RepMatrix(b.grid, matrix_exp(b.entries, t)); }

}  // namespace finop
