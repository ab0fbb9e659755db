#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "finop/digit_unitary.hpp"
#include "finop/error.hpp"
#include "finop/matrix_rep.hpp"
#include "finop/operator.hpp"
#include "finop/refinement.hpp"

namespace finop {

inline constexpr double kSpectralTolerance = 1e-8;

struct SpectralReport {
  Spectrum pde;
  Spectrum ode;
  double max_deviation = 0.0;
  double tolerance = 0.0;  // absolute, kSpectralTolerance * max(1, ||B||)
  bool pass = false;
};

struct ConjugationResult {
  FiniteOperator ode;  // grid (1, 1, M (n!)^N)
  int level = 1;
  CellPermutation permutation;
  SpectralReport spectral_report;
};

/// Smallest level n with p | n!.
inline int minimal_level(int p) {
  int n = 1;
  std::int64_t f = 1;
  while (f % p != 0) f = detail::checked_mul(f, ++n);
  return n;
}

namespace detail {

inline FiniteOperator embed_at_level(const FiniteOperator& a, int level) {
  const std::int64_t target = factorial(level);
  if (target % a.grid().p != 0) {
    const int need = minimal_level(a.grid().p);
    throw RefinementRequired("operator grid p=" + std::to_string(a.grid().p) + " does not divide " +
                                 std::to_string(level) + "!; use level >= " + std::to_string(need),
                             factorial(need));
  }
  return embed(a, static_cast<int>(target));
}

// out(k, l) = in(fwd[k], fwd[l]), i.e. P^{-1} in P.
inline Eigen::MatrixXcd pull_back(const Eigen::MatrixXcd& in, const std::vector<std::size_t>& fwd) {
  const auto K = static_cast<Eigen::Index>(fwd.size());
  Eigen::MatrixXcd out(K, K);
  for (Eigen::Index l = 0; l < K; ++l)
    for (Eigen::Index k = 0; k < K; ++k)
      out(k, l) = in(static_cast<Eigen::Index>(fwd[static_cast<std::size_t>(k)]),
                     static_cast<Eigen::Index>(fwd[static_cast<std::size_t>(l)]));
  return out;
}

// out(fwd[k], fwd[l]) = in(k, l), i.e. P in P^{-1}.
inline Eigen::MatrixXcd push_forward(const Eigen::MatrixXcd& in, const std::vector<std::size_t>& fwd) {
  const auto K = static_cast<Eigen::Index>(fwd.size());
  Eigen::MatrixXcd out(K, K);
  for (Eigen::Index l = 0; l < K; ++l)
    for (Eigen::Index k = 0; k < K; ++k)
      out(static_cast<Eigen::Index>(fwd[static_cast<std::size_t>(k)]),
          static_cast<Eigen::Index>(fwd[static_cast<std::size_t>(l)])) = in(k, l);
  return out;
}

}  // namespace detail

inline SpectralReport compare_spectra(const Eigen::MatrixXcd& pde, const Eigen::MatrixXcd& ode) {
  SpectralReport r;
  r.pde = spectrum(pde);
  r.ode = spectrum(ode);
  r.max_deviation = spectral_deviation(r.pde, r.ode);
  r.tolerance = kSpectralTolerance * std::max(1.0, operator_norm(pde));
  r.pass = r.max_deviation <= r.tolerance;
  return r;
}

/// Sorted-spectrum comparison of embed(A, n!) against the conjugated 1D
/// operator.
inline SpectralReport verify_spectrum(const FiniteOperator& a, const ConjugationResult& result) {
  const FiniteOperator embedded = detail::embed_at_level(a, result.level);
  return compare_spectra(to_matrix(embedded).entries, to_matrix(result.ode).entries);
}

/// Conjugates an N-dimensional M x M operator into a scalar operator on the
/// circle: ode = from_matrix(P^{-1} B_{embed(A, n!)} P).
inline ConjugationResult pde_to_ode(const FiniteOperator& a, int level,
                                    const CellMap& order = lexicographic_order()) {
  const FiniteOperator embedded = detail::embed_at_level(a, level);
  ConjugationResult result;
  result.level = level;
  result.permutation = build_permutation(a.grid().N, a.grid().M, level, order);
  const RepMatrix B = to_matrix(embedded);
  const Eigen::MatrixXcd C = detail::pull_back(B.entries, result.permutation.forward());
  result.ode = from_matrix(RepMatrix(result.permutation.ode_grid(), C));
  result.spectral_report = compare_spectra(B.entries, C);
  return result;
}

/// Inverse direction: a scalar operator on the (1, 1, M (n!)^N) grid becomes
/// an operator over (N, M, n!).
inline FiniteOperator ode_to_pde(const FiniteOperator& b, int N, int M, int level,
                                 const CellMap& order = lexicographic_order()) {
  const CellPermutation P = build_permutation(N, M, level, order);
  if (!(b.grid() == P.ode_grid()))
    throw GridMismatch("ode_to_pde: expected scalar grid " + P.ode_grid().str() + ", got " + b.grid().str());
  const Eigen::MatrixXcd C = detail::push_forward(to_matrix(b).entries, P.forward());
  return from_matrix(RepMatrix(P.pde_grid(), C));
}

struct EvolutionPoint {
  double t = 0.0;
  double discrepancy = 0.0;  // || P^{-1} e^{tB_A} u0 - e^{tB_ode} P^{-1} u0 ||
  double bound = 0.0;        // kSpectralTolerance * ||u0||
  bool pass = false;
};

/// Solves u' = A u on the PDE side and the conjugated ODE side with exact
/// matrix exponentials and reports the trajectory mismatch at each time.
inline std::vector<EvolutionPoint> evolve_compare(const FiniteOperator& a, const GridVector& u0,
                                                  const std::vector<double>& times, int level,
                                                  const CellMap& order = lexicographic_order()) {
  const ConjugationResult conj = pde_to_ode(a, level, order);
  require_same_grid(u0.grid, conj.permutation.pde_grid(), "evolve_compare initial state");
  const Eigen::MatrixXcd BA = to_matrix(detail::embed_at_level(a, level)).entries;
  const Eigen::MatrixXcd Bode = to_matrix(conj.ode).entries;
  const GridVector w0 = apply_unitary_inverse(conj.permutation, u0);
  const double norm0 = u0.values.norm();

  std::vector<EvolutionPoint> out;
  out.reserve(times.size());
  for (double t : times) {
    const GridVector pde_t(u0.grid, matrix_exp(BA, t) * u0.values);
    const GridVector lhs = apply_unitary_inverse(conj.permutation, pde_t);
    const Eigen::VectorXcd rhs = matrix_exp(Bode, t) * w0.values;
    EvolutionPoint pt;
    pt.t = t;
    pt.discrepancy = (lhs.values - rhs).norm();
    pt.bound = kSpectralTolerance * norm0;
    pt.pass = pt.discrepancy <= pt.bound;
    out.push_back(pt);
  }
  return out;
}

}  // namespace finop
