#include <gtest/gtest.h>

#include "splr/objective.hpp"
#include "splr/oracle.hpp"
#include "test_support.hpp"

using namespace splr;
namespace fx = splr::fixtures;

TEST(ReconstructionObjective, ExactReconstructionIsZero) {
  std::mt19937_64 rng(1);
  const MatrixXd w = fx::gaussian(4, 3, rng);
  const MatrixXd h = fx::random_pd(4, rng);
  EXPECT_EQ(reconstruction_objective(h, w, w, LowRankFactors::zeros(4, 3, 2)), 0.0);
}

TEST(ReconstructionObjective, IdentityHessianIsFrobenius) {
  const MatrixXd i2 = MatrixXd::Identity(2, 2);
  EXPECT_DOUBLE_EQ(reconstruction_objective(i2, i2, MatrixXd::Zero(2, 2), LowRankFactors::zeros(2, 2, 0)), 2.0);
}

TEST(ReconstructionObjective, DiagonalHessianAllOnesResidual) {
  MatrixXd h = MatrixXd::Zero(2, 2);
  h(0, 0) = 2.0;
  h(1, 1) = 1.0;
  const MatrixXd delta = MatrixXd::Ones(2, 2);
  const double expected = oracle::trace_objective_naive(h, delta);
  ASSERT_DOUBLE_EQ(expected, 6.0);
  EXPECT_DOUBLE_EQ(reconstruction_objective(h, delta, MatrixXd::Zero(2, 2), LowRankFactors::zeros(2, 2, 1)), expected);
}

TEST(ReconstructionObjective, TraceFormMatchesActivationResidual) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n_in = 2 + trial % 7;
    const Index n_out = 1 + trial % 5;
    const MatrixXd x = fx::gaussian(3 * n_in, n_in, rng);
    const MatrixXd delta = fx::gaussian(n_in, n_out, rng);
    const MatrixXd h = x.transpose() * x;
    const double direct = (x * delta).squaredNorm();
    const double trace = quadratic_trace(h, delta);
    EXPECT_LE(std::abs(trace - direct), 1e-8 * (1.0 + direct));
  }
}

TEST(ReconstructionObjective, InvariantUnderFactorGauge) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd w = fx::gaussian(6, 5, rng);
    const MatrixXd s = fx::gaussian(6, 5, rng);
    const MatrixXd h = fx::random_pd(6, rng);
    LowRankFactors m{fx::gaussian(6, 3, rng), fx::gaussian(5, 3, rng)};
    MatrixXd g = fx::gaussian(3, 3, rng);
    g.diagonal().array() += 3.0;
    const LowRankFactors gauged{m.u * g, m.v * g.inverse().transpose()};
    const double a = reconstruction_objective(h, w, s, m);
    const double b = reconstruction_objective(h, w, s, gauged);
    EXPECT_LE(fx::rel_diff(a, b), 1e-10);
  }
}

TEST(ReconstructionObjective, NonNegativeForPsdHessian) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    // rank-deficient PSD
    const MatrixXd x = fx::gaussian(2, 6, rng);
    const MatrixXd h = x.transpose() * x;
    const MatrixXd w = fx::gaussian(6, 4, rng);
    EXPECT_GE(reconstruction_objective(h, w, MatrixXd::Zero(6, 4), LowRankFactors::zeros(6, 4, 0)), 0.0);
  }
}

TEST(ReconstructionObjective, DimensionMismatchIsContractViolation) {
  const MatrixXd h = MatrixXd::Identity(3, 3);
  const MatrixXd w = MatrixXd::Ones(3, 2);
  EXPECT_THROW(reconstruction_objective(h, w, MatrixXd::Zero(2, 2), LowRankFactors::zeros(3, 2, 1)), ContractError);
  EXPECT_THROW(reconstruction_objective(h, w, MatrixXd::Zero(3, 2), LowRankFactors::zeros(3, 3, 1)), ContractError);
  EXPECT_THROW(reconstruction_objective(MatrixXd::Identity(2, 2), w, MatrixXd::Zero(3, 2), LowRankFactors::zeros(3, 2, 1)),
               ContractError);
}

TEST(ReconstructionObjective, NonFiniteHessianIsNumericError) {
  MatrixXd h = MatrixXd::Identity(2, 2);
  h(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(reconstruction_objective(h, MatrixXd::Ones(2, 2), MatrixXd::Zero(2, 2), LowRankFactors::zeros(2, 2, 0)),
               NumericError);
}

TEST(DenseWeights, RejectsNonFiniteAndEmpty) {
  MatrixXd bad = MatrixXd::Ones(2, 2);
  bad(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(DenseWeights{bad}, NumericError);
  EXPECT_THROW(DenseWeights{MatrixXd(0, 3)}, ContractError);
  EXPECT_THROW(CalibrationActivations{MatrixXd(0, 3)}, ContractError);
}
