#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "finop/error.hpp"
#include "finop/operator.hpp"
#include "finop/refinement.hpp"

namespace finop {

/// One product M_1 D_1 M_2 D_2 ... of generators, applied right to left as
/// ordinary operator composition. Factors may live on different grids.
using PdeProduct = std::vector<FiniteOperator>;

/// D_{i,h} on the coarsest grid that represents it (p = denominator of h).
inline FiniteOperator derivative_minimal(int N, int M, int axis, const Rational& h) {
  return derivative(GridSpec(N, M, static_cast<int>(h.den())), axis, h);
}

/// sum_n (prod_j factors) + M_00, evaluated on the lcm of every grid involved.
inline FiniteOperator build_pde(const std::vector<PdeProduct>& products,
                                const std::optional<StepFunction>& m00 = std::nullopt) {
  std::optional<GridSpec> frame;
  int p = 1;
  auto visit = [&](const GridSpec& g) {
    if (frame && (frame->N != g.N || frame->M != g.M))
      throw GridMismatch("build_pde: factor grid " + g.str() + " incompatible with " + frame->str());
    if (!frame) frame = g;
    p = static_cast<int>(detail::checked_lcm(p, g.p));
  };
  for (const auto& prod : products)
    for (const auto& f : prod) visit(f.grid());
  if (m00) visit(m00->grid());
  if (!frame) throw Error("build_pde: empty expression");

  const GridSpec grid = frame->with_p(p);
  FiniteOperator total = m00 ? embed(multiplication(*m00), p) : FiniteOperator::zero(grid);
  for (const auto& prod : products) {
    if (prod.empty()) continue;
    FiniteOperator term = embed(prod.front(), p);
    for (std::size_t i = 1; i < prod.size(); ++i) term = op_compose(term, embed(prod[i], p));
    total = op_add(total, term);
  }
  return total;
}

}  // namespace finop
