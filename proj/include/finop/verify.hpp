#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "finop/digit_unitary.hpp"
#include "finop/dsl/parser.hpp"
#include "finop/dsl/printer.hpp"
#include "finop/dsl/random_expr.hpp"
#include "finop/isomorphism.hpp"
#include "finop/matrix_rep.hpp"
#include "finop/random.hpp"
#include "finop/refinement.hpp"

namespace finop {

struct CheckResult {
  std::string name;
  std::size_t instances = 0;
  double worst = 0.0;      // largest observed error (0 for exact checks)
  double tolerance = 0.0;  // 0 means bit-exact
  bool pass = true;
};

namespace detail {

inline void record(CheckResult& r, double err) {
  r.worst = std::max(r.worst, err);
  if (!(err <= r.tolerance)) r.pass = false;
  ++r.instances;
}

inline double rel_error(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double scale) {
  return (a - b).norm() / std::max(1.0, scale);
}

}  // namespace detail

/// Randomized invariant suite. All instances derive from `seed`.
inline std::vector<CheckResult> run_verify(std::uint64_t seed, int rounds = 20) {
  RandomInstances rnd(seed);
  std::vector<CheckResult> out;
  const std::vector<int> ps{2, 3, 4, 6};

  CheckResult lin{"rep linearity (exact)"}, adj{"rep adjoint (exact)"}, mul{"rep multiplicativity", 0, 0.0, 1e-12};
  CheckResult bij{"from_matrix/to_matrix bijection (exact)"};
  for (int i = 0; i < rounds; ++i) {
    const GridSpec g(rnd.uniform_int(1, 2), rnd.uniform_int(1, 2), rnd.pick(ps));
    const FiniteOperator a = rnd.op(g), b = rnd.op(g);
    const Complex alpha = rnd.complex();
    const Eigen::MatrixXcd Ba = to_matrix(a).entries, Bb = to_matrix(b).entries;
    detail::record(lin, (to_matrix(op_add(op_scale(alpha, a), b)).entries - (alpha * Ba + Bb)).norm());
    detail::record(adj, (to_matrix(op_adjoint(a)).entries - Ba.adjoint()).norm());
    detail::record(mul, (to_matrix(op_compose(a, b)).entries - Ba * Bb).norm() / std::max(1.0, Ba.norm() * Bb.norm()));
    const Eigen::MatrixXcd dense = rnd.dense(static_cast<Eigen::Index>(g.dimension()));
    const bool ok = from_matrix(to_matrix(a)) == a && to_matrix(from_matrix(RepMatrix(g, dense))).entries == dense;
    detail::record(bij, ok ? 0.0 : 1.0);
  }
  out.insert(out.end(), {lin, adj, mul, bij});

  CheckResult hom{"embed *-homomorphism", 0, 0.0, 1e-12}, fun{"embed functoriality (exact)"};
  for (int i = 0; i < rounds; ++i) {
    const auto [p, q] = rnd.pick(std::vector<std::pair<int, int>>{{2, 4}, {2, 6}, {3, 6}});
    const GridSpec g(rnd.uniform_int(1, 2), 1, p);
    const FiniteOperator a = rnd.op(g), b = rnd.op(g);
    const Eigen::MatrixXcd lhs = to_matrix(embed(op_compose(a, b), q)).entries;
    const Eigen::MatrixXcd rhs = to_matrix(op_compose(embed(a, q), embed(b, q))).entries;
    detail::record(hom, std::max(detail::rel_error(lhs, rhs, lhs.norm()),
                                 embed(op_adjoint(a), q) == op_adjoint(embed(a, q)) ? 0.0 : 1.0));
    detail::record(fun, embed(embed(a, q), 2 * q) == embed(a, 2 * q) ? 0.0 : 1.0);
  }
  out.insert(out.end(), {hom, fun});

  CheckResult res{"digit residual bound (exact)"}, perm{"permutation bijection + level consistency (exact)"};
  for (int i = 0; i < rounds; ++i) {
    const int N = rnd.uniform_int(1, 2), M = rnd.uniform_int(1, 2), depth = rnd.uniform_int(1, 4);
    const std::int64_t den = rnd.uniform_int(1, 10000);
    const Rational x(rnd.uniform_int(0, static_cast<int>(den) - 1), den);
    const DigitExpansion e = digits(x, N, M, depth);
    const Rational bound(1, detail::checked_mul(M, detail::checked_pow(detail::factorial(depth), N)));
    detail::record(res, (e.residual >= Rational(0) && e.residual < bound) ? 0.0 : 1.0);
  }
  for (int N = 1; N <= 2; ++N)
    for (int M = 1; M <= 2; ++M)
      for (int n = 1; n <= 2; ++n) {
        const CellPermutation coarse = build_permutation(N, M, n), fine = build_permutation(N, M, n + 1);
        bool ok = true;
        const std::size_t per = ipow(static_cast<std::size_t>(n + 1), N);
        for (std::size_t k = 0; k < fine.size(); ++k) {
          ok = ok && fine.inverse()[fine.forward()[k]] == k && fine.component(k) == coarse.component(k / per);
          CellIndex c = fine.cell(k);
          for (int& v : c) v /= (n + 1);
          ok = ok && c == coarse.cell(k / per);
        }
        detail::record(perm, ok ? 0.0 : 1.0);
      }
  out.insert(out.end(), {res, perm});

  CheckResult spec{"conjugation spectrum", 0, 0.0, kSpectralTolerance}, trip{"ode_to_pde round trip", 0, 0.0, 1e-13};
  CheckResult inv{"invertibility transport (exact)"};
  for (int i = 0; i < rounds; ++i) {
    const GridSpec g(2, rnd.uniform_int(1, 2), 2);
    const FiniteOperator a = rnd.op(g);
    const int n = rnd.coin(0.8) ? 2 : 3;
    const ConjugationResult r = pde_to_ode(a, n);
    const double scale = std::max(1.0, operator_norm(to_matrix(embed(a, static_cast<int>(detail::factorial(n)))).entries));
    detail::record(spec, r.spectral_report.max_deviation / scale);
    const Eigen::MatrixXcd back = to_matrix(ode_to_pde(r.ode, g.N, g.M, n)).entries;
    const Eigen::MatrixXcd emb = to_matrix(embed(a, static_cast<int>(detail::factorial(n)))).entries;
    detail::record(trip, detail::rel_error(back, emb, emb.norm()));
    detail::record(inv, is_invertible(to_matrix(a).entries) == is_invertible(to_matrix(r.ode).entries) ? 0.0 : 1.0);
  }
  out.insert(out.end(), {spec, trip, inv});

  CheckResult evo{"evolution correspondence", 0, 0.0, kSpectralTolerance};
  for (int i = 0; i < std::max(1, rounds / 4); ++i) {
    const GridSpec g(2, 1, 2);
    const FiniteOperator a = rnd.op(g);
    const GridVector u0 = rnd.vector(g);
    for (const auto& pt : evolve_compare(a, u0, {0.1, 1.0}, 2)) detail::record(evo, pt.discrepancy / u0.values.norm());
  }
  out.push_back(evo);

  CheckResult dslc{"dsl parse/print round trip (exact)"};
  dsl::RandomExprOptions opt;
  opt.names = {"S", "T"};
  for (int i = 0; i < rounds * 5; ++i) {
    const dsl::Expr e = dsl::random_expr(rnd, opt);
    detail::record(dslc, dsl::parse_expression(dsl::print(e)) == e ? 0.0 : 1.0);
  }
  out.push_back(dslc);

  return out;
}

}  // namespace finop
