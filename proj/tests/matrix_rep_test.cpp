#include <gtest/gtest.h>

#include <cmath>

#include "finop/matrix_rep.hpp"
#include "finop/random.hpp"
#include "oracles.hpp"

namespace finop {
namespace {

Eigen::MatrixXcd mat2(Complex a, Complex b, Complex c, Complex d) {
  Eigen::MatrixXcd m(2, 2);
  m << a, b, c, d;
  return m;
}

TEST(ToMatrix, Examples) {
  const GridSpec g(1, 1, 2);
  EXPECT_EQ(to_matrix(derivative(g, 1, Rational(1, 2))).entries, mat2(-2.0, 2.0, 2.0, -2.0));
  const StepFunction chi(g, {MatrixValue::Constant(1, 1, 1.0), MatrixValue::Zero(1, 1)});
  EXPECT_EQ(to_matrix(multiplication(chi)).entries, mat2(1.0, 0.0, 0.0, 0.0));
  for (const GridSpec& gs : {GridSpec(1, 1, 1), GridSpec(2, 3, 2), GridSpec(3, 1, 2)})
    EXPECT_EQ(to_matrix(FiniteOperator::identity(gs)).entries,
              Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(gs.dimension()), static_cast<Eigen::Index>(gs.dimension())));
}

TEST(ToMatrix, AgreesWithMidpointEvaluationOracle) {
  RandomInstances rnd(21);
  for (int trial = 0; trial < 20; ++trial) {
    const GridSpec g(rnd.uniform_int(1, 3), rnd.uniform_int(1, 2), rnd.uniform_int(1, 3));
    const FiniteOperator a = rnd.op(g);
    EXPECT_EQ(to_matrix(a).entries, oracle::operator_matrix(a));
  }
}

TEST(FromMatrix, Examples) {
  const GridSpec g(1, 1, 2);
  EXPECT_EQ(from_matrix(RepMatrix(g, Eigen::MatrixXcd::Identity(2, 2))), FiniteOperator::identity(g));
  EXPECT_EQ(from_matrix(RepMatrix(g, mat2(-2.0, 2.0, 2.0, -2.0))), derivative(g, 1, Rational(1, 2)));

  RandomInstances rnd(22);
  const GridSpec g3(1, 3, 4);
  const Eigen::MatrixXcd B = rnd.dense(12);
  const FiniteOperator a = from_matrix(RepMatrix(g3, B));
  EXPECT_EQ(to_matrix(a).entries, B);
  EXPECT_EQ(from_matrix(to_matrix(a)), a);
  EXPECT_THROW(RepMatrix(g3, rnd.dense(10)), Error);
}

TEST(FromMatrix, BijectionForAllSmallGrids) {
  RandomInstances rnd(23);
  for (int N = 1; N <= 3; ++N)
    for (int M = 1; M <= 3; ++M)
      for (int p = 1; p <= 6; ++p) {
        const GridSpec g(N, M, p);
        if (g.dimension() > 96) continue;
        const FiniteOperator a = rnd.op(g, 0.4);
        ASSERT_EQ(from_matrix(to_matrix(a)), a) << g;
        const Eigen::MatrixXcd B = rnd.dense(static_cast<Eigen::Index>(g.dimension()));
        ASSERT_EQ(to_matrix(from_matrix(RepMatrix(g, B))).entries, B) << g;
      }
}

TEST(ToMatrix, HomomorphismLaws) {
  RandomInstances rnd(24);
  for (int trial = 0; trial < 30; ++trial) {
    const GridSpec g(rnd.uniform_int(1, 2), rnd.uniform_int(1, 2), rnd.pick(std::vector<int>{2, 3, 4}));
    const FiniteOperator a = rnd.op(g), b = rnd.op(g);
    const Complex alpha = rnd.complex(), beta = rnd.complex();
    const Eigen::MatrixXcd Ba = to_matrix(a).entries, Bb = to_matrix(b).entries;
    EXPECT_EQ(to_matrix(op_add(op_scale(alpha, a), op_scale(beta, b))).entries, (alpha * Ba + beta * Bb).eval());
    EXPECT_EQ(to_matrix(op_adjoint(a)).entries, Ba.adjoint().eval());
    const double err = (to_matrix(op_compose(a, b)).entries - Ba * Bb).norm();
    EXPECT_LE(err, 1e-12 * Ba.norm() * Bb.norm());
  }
}

TEST(Spectrum, Examples) {
  const GridSpec g(1, 1, 2);
  const Spectrum s = spectrum(to_matrix(derivative(g, 1, Rational(1, 2))));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(std::abs(s.eigenvalues[0] - Complex(-4.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(s.eigenvalues[1]), 0.0, 1e-12);

  const GridSpec g3(2, 2, 2);
  const Spectrum id = spectrum(to_matrix(FiniteOperator::identity(g3)));
  ASSERT_EQ(id.size(), 8u);
  for (const auto& z : id.eigenvalues) EXPECT_NEAR(std::abs(z - Complex(1.0)), 0.0, 1e-14);
}

TEST(Spectrum, CirculantDerivativeMatchesDft) {
  for (int p = 2; p <= 12; ++p) {
    const GridSpec g(1, 1, p);
    const FiniteOperator d = derivative(g, 1, Rational(1, p));
    const Eigen::MatrixXcd B = to_matrix(d).entries;
    std::vector<Complex> row(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) row[static_cast<std::size_t>(j)] = B(0, j);
    Spectrum expect{oracle::circulant_eigenvalues(row)};
    sort_spectrum(expect.eigenvalues);
    EXPECT_LT(spectral_deviation(spectrum(B), expect), 1e-10) << "p=" << p;
  }
}

TEST(Spectrum, PositivityOfAStarA) {
  RandomInstances rnd(25);
  for (int trial = 0; trial < 10; ++trial) {
    const GridSpec g(rnd.uniform_int(1, 2), rnd.uniform_int(1, 2), rnd.uniform_int(2, 4));
    const FiniteOperator a = rnd.op(g);
    const Eigen::MatrixXcd B = to_matrix(op_compose(op_adjoint(a), a)).entries;
    const double scale = operator_norm(B);
    for (const auto& z : spectrum(B).eigenvalues) {
      EXPECT_LE(std::abs(z.imag()), 1e-10 * std::max(1.0, scale));
      EXPECT_GE(z.real(), -1e-10 * std::max(1.0, scale));
    }
  }
}

TEST(Spectrum, DeviationPairsClustersRegardlessOfOrder) {
  Spectrum a{{Complex(1.0, -2.0), Complex(1.0 + 1e-15, 2.0)}};
  Spectrum b{{Complex(1.0 - 1e-15, 2.0), Complex(1.0, -2.0)}};
  sort_spectrum(a.eigenvalues);
  sort_spectrum(b.eigenvalues);
  EXPECT_LT(spectral_deviation(a, b), 1e-14);
  EXPECT_TRUE(std::isinf(spectral_deviation(a, Spectrum{{Complex(0.0)}})));
}

TEST(MatrixExp, Examples) {
  const Eigen::MatrixXcd B = mat2(-2.0, 2.0, 2.0, -2.0);
  EXPECT_EQ(matrix_exp(B, 0.0), Eigen::MatrixXcd::Identity(2, 2));
  const Eigen::MatrixXcd e = matrix_exp(mat2(1.0, 0.0, 0.0, 0.0), 1.0);
  EXPECT_NEAR(std::abs(e(0, 0) - std::exp(1.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(e(1, 1) - 1.0), 0.0, 1e-15);

  for (double t : {0.1, 0.5, 1.0, 3.0, 12.5}) {
    const double q = std::exp(-4.0 * t);
    const Eigen::MatrixXcd expect = 0.5 * mat2(1 + q, 1 - q, 1 - q, 1 + q);
    EXPECT_LT((matrix_exp(B, t) - expect).norm() / expect.norm(), 1e-10) << "t=" << t;
  }
}

TEST(MatrixExp, LargeNormHermitianAgainstEigendecomposition) {
  RandomInstances rnd(26);
  Eigen::MatrixXcd H = rnd.dense(6);
  H = (H + H.adjoint()).eval();
  H *= 50.0 / operator_norm(H);  // ||tB|| = 50
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  const Eigen::MatrixXcd expect =
      es.eigenvectors() * es.eigenvalues().array().exp().matrix().cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  EXPECT_LT((matrix_exp(H, 1.0) - expect).norm() / expect.norm(), 1e-10);
}

TEST(MatrixExp, OverflowIsReported) {
  EXPECT_THROW(matrix_exp(mat2(1.0, 0.0, 0.0, 0.0), 1e6), NumericalFailure);
}

TEST(Invertibility, SingularValueVerdict) {
  const GridSpec g(1, 1, 4);
  EXPECT_FALSE(is_invertible(to_matrix(derivative(g, 1, Rational(1, 4))).entries));
  EXPECT_TRUE(is_invertible(to_matrix(FiniteOperator::identity(g)).entries));
}

}  // namespace
}  // namespace finop
