#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "finop/operator.hpp"
#include "finop/step_function.hpp"

namespace finop {

/// Random instances for property checks. All draws come from the caller's
/// engine so results are reproducible from a seed.
class RandomInstances {
 public:
  explicit RandomInstances(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& engine() noexcept { return rng_; }

  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double uniform_real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin(double p_true = 0.5) { return std::bernoulli_distribution(p_true)(rng_); }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(uniform_int(0, static_cast<int>(items.size()) - 1))];
  }

  Complex complex() { return {normal_(rng_), normal_(rng_)}; }

  MatrixValue matrix(int M) {
    MatrixValue m(M, M);
    for (Eigen::Index r = 0; r < M; ++r)
      for (Eigen::Index c = 0; c < M; ++c) m(r, c) = complex();
    return m;
  }

  StepFunction step_function(const GridSpec& g) {
    std::vector<MatrixValue> values(g.cell_count());
    for (auto& v : values) v = matrix(g.M);
    return StepFunction(g, std::move(values));
  }

  /// Operator with each shift present with probability `density` (at least
  /// one term), coefficients with standard complex normal entries.
  FiniteOperator op(const GridSpec& g, double density = 0.5) {
    FiniteOperator::TermMap terms;
    const std::size_t cells = g.cell_count();
    for (std::size_t j = 0; j < cells; ++j)
      if (coin(density)) terms.emplace(j, step_function(g));
    if (terms.empty())
      terms.emplace(static_cast<std::size_t>(uniform_int(0, static_cast<int>(cells) - 1)), step_function(g));
    return FiniteOperator(g, std::move(terms));
  }

  GridVector vector(const GridSpec& g) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(g.dimension()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = complex();
    return GridVector(g, std::move(v));
  }

  Eigen::MatrixXcd dense(Eigen::Index K) {
    Eigen::MatrixXcd m(K, K);
    for (Eigen::Index r = 0; r < K; ++r)
      for (Eigen::Index c = 0; c < K; ++c) m(r, c) = complex();
    return m;
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace finop
