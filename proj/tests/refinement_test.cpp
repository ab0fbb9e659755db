#include <gtest/gtest.h>

#include "finop/matrix_rep.hpp"
#include "finop/random.hpp"
#include "finop/refinement.hpp"
#include "oracles.hpp"

namespace finop {
namespace {

TEST(Embed, IdentityLevelIsNoOp) {
  RandomInstances rnd(31);
  const FiniteOperator a = rnd.op(GridSpec(2, 2, 3));
  EXPECT_EQ(embed(a, 3), a);
  EXPECT_THROW(embed(a, 4), Error);
}

TEST(Embed, DerivativeShiftScales) {
  const FiniteOperator d = derivative(GridSpec(1, 1, 2), 1, Rational(1, 2));
  const FiniteOperator e = embed(d, 4);
  EXPECT_EQ(e.grid(), GridSpec(1, 1, 4));
  ASSERT_EQ(e.terms().size(), 2u);
  EXPECT_EQ(e.coefficient(CellIndex{2}), StepFunction::constant(e.grid(), MatrixValue::Constant(1, 1, 2.0)));
  EXPECT_EQ(e.coefficient(CellIndex{0}), StepFunction::constant(e.grid(), MatrixValue::Constant(1, 1, -2.0)));
  // also the same operator as D_{1,1/2} built directly on p=4
  EXPECT_EQ(e, derivative(GridSpec(1, 1, 4), 1, Rational(1, 2)));

  const Spectrum s = spectrum(to_matrix(e));
  Spectrum expect{{Complex(-4.0), Complex(-4.0), Complex(0.0), Complex(0.0)}};
  EXPECT_LT(spectral_deviation(s, expect), 1e-12);
}

TEST(Embed, ActionCommutesWithRefinement) {
  RandomInstances rnd(32);
  for (int trial = 0; trial < 20; ++trial) {
    const int p = rnd.pick(std::vector<int>{1, 2, 3});
    const int q = p * rnd.pick(std::vector<int>{1, 2, 3});
    const GridSpec g(rnd.uniform_int(1, 2), rnd.uniform_int(1, 2), p);
    const FiniteOperator a = rnd.op(g);
    const GridVector u = rnd.vector(g);
    const Eigen::VectorXcd lhs = op_apply(embed(a, q), refine(u, q)).values;
    const Eigen::VectorXcd rhs = refine(op_apply(a, u), q).values;
    EXPECT_LT((lhs - rhs).norm(), 1e-13 * std::max(1.0, rhs.norm()));
  }
}

TEST(Embed, RefineVectorIsIsometric) {
  RandomInstances rnd(33);
  const GridVector u = rnd.vector(GridSpec(2, 2, 2));
  EXPECT_NEAR(refine(u, 6).values.norm(), u.values.norm(), 1e-13);
}

TEST(Embed, UnitalStarHomomorphism) {
  RandomInstances rnd(34);
  for (const auto& [p, q] : std::vector<std::pair<int, int>>{{2, 4}, {2, 6}, {3, 6}, {1, 5}}) {
    const GridSpec g(2, 2, p);
    const FiniteOperator a = rnd.op(g), b = rnd.op(g);
    const Eigen::MatrixXcd lhs = to_matrix(embed(op_compose(a, b), q)).entries;
    const Eigen::MatrixXcd rhs = to_matrix(op_compose(embed(a, q), embed(b, q))).entries;
    EXPECT_LE((lhs - rhs).norm(), 1e-12 * std::max(1.0, lhs.norm()));
    EXPECT_EQ(embed(op_adjoint(a), q), op_adjoint(embed(a, q)));
    EXPECT_EQ(embed(FiniteOperator::identity(g), q), FiniteOperator::identity(g.with_p(q)));
  }
}

TEST(Embed, Functorial) {
  RandomInstances rnd(35);
  const FiniteOperator a = rnd.op(GridSpec(2, 1, 2));
  EXPECT_EQ(embed(embed(a, 4), 8), embed(a, 8));
  EXPECT_EQ(embed(embed(a, 6), 12), embed(a, 12));
}

TEST(Embed, SpectrumMultiplicitiesScale) {
  RandomInstances rnd(36);
  for (const auto& [p, q] : std::vector<std::pair<int, int>>{{2, 4}, {2, 6}, {3, 6}}) {
    for (int N = 1; N <= 2; ++N) {
      const GridSpec g(N, 1, p);
      if (g.with_p(q).dimension() > 96) continue;
      const FiniteOperator a = rnd.op(g);
      const Spectrum coarse = spectrum(to_matrix(a));
      const Spectrum fine = spectrum(to_matrix(embed(a, q)));
      const std::size_t mult = ipow(static_cast<std::size_t>(q / p), N);
      EXPECT_LT(spectral_deviation(fine, repeat_spectrum(coarse, mult)), 1e-8 * std::max(1.0, operator_norm(to_matrix(a).entries)));
    }
  }
}

TEST(Embed, InvertibilityPreserved) {
  RandomInstances rnd(37);
  const GridSpec g(2, 1, 2);
  const FiniteOperator a = rnd.op(g);
  EXPECT_EQ(is_invertible(to_matrix(a).entries), is_invertible(to_matrix(embed(a, 4)).entries));
  const FiniteOperator d = derivative(g, 1, Rational(1, 2));
  EXPECT_FALSE(is_invertible(to_matrix(d).entries));
  EXPECT_FALSE(is_invertible(to_matrix(embed(d, 6)).entries));
}

TEST(CommonRefine, Examples) {
  RandomInstances rnd(38);
  const FiniteOperator a = rnd.op(GridSpec(1, 2, 2)), b = rnd.op(GridSpec(1, 2, 2));
  const auto [a1, b1] = common_refine(a, b);
  EXPECT_EQ(a1, a);
  EXPECT_EQ(b1, b);

  const FiniteOperator c = rnd.op(GridSpec(1, 2, 3));
  const auto [a2, c2] = common_refine(a, c);
  EXPECT_EQ(a2.grid().p, 6);
  EXPECT_EQ(c2.grid().p, 6);

  const Eigen::MatrixXcd sum = to_matrix(op_add(a2, c2)).entries;
  const Eigen::MatrixXcd oracle_sum = oracle::operator_matrix(embed(a, 6)) + oracle::operator_matrix(embed(c, 6));
  EXPECT_LT((sum - oracle_sum).norm(), 1e-13);

  EXPECT_THROW(common_refine(a, rnd.op(GridSpec(2, 2, 2))), GridMismatch);
}

TEST(Ladder, Levels) {
  EXPECT_EQ(ladder_level(Ladder::factorial(), 3), 6);
  EXPECT_EQ(ladder_level(Ladder::factorial(), 1), 1);
  EXPECT_EQ(ladder_level(Ladder::prime_power(2), 4), 16);
  EXPECT_EQ(ladder_level(Ladder::custom({2, 6, 12}), 2), 6);
  EXPECT_THROW(ladder_level(Ladder::custom({2, 6, 12}), 4), Error);
  EXPECT_THROW(Ladder::custom({2, 5}), Error);
  EXPECT_THROW(Ladder::custom({4, 4}), Error);
  EXPECT_THROW(Ladder::prime_power(4), Error);
  EXPECT_THROW(ladder_level(Ladder::factorial(), 0), Error);
}

TEST(Ladder, Parse) {
  EXPECT_EQ(Ladder::parse("factorial").level(5), 120);
  EXPECT_EQ(Ladder::parse("2^n").level(3), 8);
  EXPECT_EQ(Ladder::parse("3^n").level(2), 9);
  EXPECT_EQ(Ladder::parse("custom:2,6,12").level(3), 12);
  EXPECT_THROW(Ladder::parse("custom:2,,6"), Error);
  EXPECT_THROW(Ladder::parse("fibonacci"), Error);
}

TEST(Ladder, ConsecutiveLevelsNest) {
  for (const Ladder& l : {Ladder::factorial(), Ladder::prime_power(2), Ladder::prime_power(5)})
    for (int n = 1; n < 6; ++n) EXPECT_EQ(l.level(n + 1) % l.level(n), 0);
}

}  // namespace
}  // namespace finop
