#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "finop/error.hpp"
#include "finop/grid.hpp"
#include "finop/operator.hpp"
#include "finop/step_function.hpp"

namespace finop {

/// Natural embedding of a level-p operator into level q (p | q): the same
/// operator on L2 written on the finer grid. Coefficients are refined and a
/// shift j becomes (q/p) j.
inline FiniteOperator embed(const FiniteOperator& a, int q) {
  const GridSpec& g = a.grid();
  if (q < 1 || q % g.p != 0)
    throw Error("embed: p=" + std::to_string(g.p) + " does not divide q=" + std::to_string(q));
  if (q == g.p) return a;
  const int ratio = q / g.p;
  FiniteOperator::TermMap terms;
  for (const auto& [j, coeff] : a.terms()) {
    CellIndex shift = unflatten(j, g.N, g.p);
    for (int& v : shift) v *= ratio;
    terms.emplace(flatten(shift, q), step_refine(coeff, q));
  }
  return FiniteOperator(g.with_p(q), std::move(terms));
}

/// Same L2 function on the finer grid. In the normalized-indicator basis each
/// child coefficient is the parent's times (p/q)^{N/2}.
inline GridVector refine(const GridVector& u, int q) {
  const GridSpec& g = u.grid;
  if (q < 1 || q % g.p != 0)
    throw Error("refine: p=" + std::to_string(g.p) + " does not divide q=" + std::to_string(q));
  const GridSpec fine = g.with_p(q);
  const int ratio = q / g.p;
  const double factor = std::pow(static_cast<double>(ratio), -0.5 * g.N);
  GridVector out = GridVector::zero(fine);
  for (std::size_t c = 0; c < fine.cell_count(); ++c) {
    CellIndex cell = unflatten(c, g.N, q);
    for (int& v : cell) v /= ratio;
    const auto parent = static_cast<Eigen::Index>(flatten(cell, g.p));
    for (int m = 0; m < g.M; ++m)
      out.values(static_cast<Eigen::Index>(c) * g.M + m) = factor * u.values(parent * g.M + m);
  }
  return out;
}

/// Embeds both operators on the grid lcm(p_A, p_B).
inline std::pair<FiniteOperator, FiniteOperator> common_refine(const FiniteOperator& a,
                                                               const FiniteOperator& b) {
  if (a.grid().N != b.grid().N || a.grid().M != b.grid().M)
    throw GridMismatch("common_refine: grids " + a.grid().str() + " and " + b.grid().str() +
                       " differ in N or M");
  const int q = std::lcm(a.grid().p, b.grid().p);
  return {embed(a, q), embed(b, q)};
}

/// A divisibility chain p_1 | p_2 | ... of grid sizes: the factorial ladder
/// p_n = n!, a prime-power ladder p_n = q^n, or an explicit custom chain.
class Ladder {
 public:
  enum class Kind { Factorial, PrimePower, Custom };

  static Ladder factorial() { return Ladder(Kind::Factorial, 0, {}); }
  static Ladder prime_power(int base) {
    if (base < 2) throw Error("ladder base must be at least 2");
    for (int d = 2; d * d <= base; ++d)
      if (base % d == 0) throw Error("ladder base " + std::to_string(base) + " is not prime");
    return Ladder(Kind::PrimePower, base, {});
  }
  static Ladder custom(std::vector<std::int64_t> levels) {
    if (levels.empty()) throw Error("custom ladder needs at least one level");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (levels[i] < 1) throw Error("custom ladder levels must be positive");
      if (i > 0 && (levels[i] <= levels[i - 1] || levels[i] % levels[i - 1] != 0))
        throw Error("custom ladder breaks divisibility at level " + std::to_string(i + 1) + ": " +
                    std::to_string(levels[i - 1]) + " does not properly divide " +
                    std::to_string(levels[i]));
    }
    return Ladder(Kind::Custom, 0, std::move(levels));
  }

  /// "factorial", "2^n", "q^n" or "custom:2,6,12".
  static Ladder parse(std::string_view text) {
    if (text == "factorial") return factorial();
    if (text.size() > 2 && text.substr(text.size() - 2) == "^n")
      return prime_power(std::stoi(std::string(text.substr(0, text.size() - 2))));
    if (text.rfind("custom:", 0) == 0) {
      std::vector<std::int64_t> levels;
      std::string rest(text.substr(7));
      std::size_t pos = 0;
      while (pos <= rest.size()) {
        const std::size_t comma = rest.find(',', pos);
        const std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (item.empty()) throw Error("empty level in ladder '" + std::string(text) + "'");
        levels.push_back(std::stoll(item));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      return custom(std::move(levels));
    }
    throw Error("unknown ladder '" + std::string(text) + "' (expected factorial, q^n or custom:a,b,...)");
  }

  Kind kind() const noexcept { return kind_; }
  int base() const noexcept { return base_; }

  /// Grid size at level n >= 1.
  std::int64_t level(int n) const {
    if (n < 1) throw Error("ladder level must be >= 1");
    switch (kind_) {
      case Kind::Factorial: {
        std::int64_t f = 1;
        for (int i = 2; i <= n; ++i) f = detail::checked_mul(f, i);
        return f;
      }
      case Kind::PrimePower: {
        std::int64_t v = 1;
        for (int i = 0; i < n; ++i) v = detail::checked_mul(v, base_);
        return v;
      }
      case Kind::Custom:
        if (static_cast<std::size_t>(n) > levels_.size())
          throw Error("custom ladder has only " + std::to_string(levels_.size()) + " levels");
        return levels_[static_cast<std::size_t>(n - 1)];
    }
    return 0;
  }

 private:
  Ladder(Kind k, int base, std::vector<std::int64_t> levels)
      : kind_(k), base_(base), levels_(std::move(levels)) {}

  Kind kind_;
  int base_;
  std::vector<std::int64_t> levels_;
};

inline std::int64_t ladder_level(const Ladder& ladder, int n) { return ladder.level(n); }

}  // namespace finop
