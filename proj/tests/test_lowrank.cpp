#include <gtest/gtest.h>

#include "splr/gram.hpp"
#include "splr/lowrank.hpp"
#include "splr/objective.hpp"
#include "splr/oracle.hpp"
#include "test_support.hpp"

using namespace splr;
namespace fx = splr::fixtures;

namespace {

MatrixXd low_rank_matrix(Index rows, Index cols, Index r, std::mt19937_64& rng) {
  return fx::gaussian(rows, r, rng) * fx::gaussian(r, cols, rng);
}

MatrixXd random_rank_r(Index rows, Index cols, Index r, std::mt19937_64& rng) {
  return low_rank_matrix(rows, cols, r, rng) * fx::uniform(rng, 0.1, 3.0);
}

}  // namespace

TEST(TruncatedSvd, FullRankBudgetReconstructs) {
  std::mt19937_64 rng(41);
  const MatrixXd w = fx::gaussian(7, 5, rng);
  EXPECT_LE(fx::rel_frobenius(truncated_svd(w, 5).product(), w), 1e-9);
  const MatrixXd lr = low_rank_matrix(7, 5, 2, rng);
  EXPECT_LE(fx::rel_frobenius(truncated_svd(lr, 3).product(), lr), 1e-9);
}

TEST(TruncatedSvd, ZeroRank) {
  const LowRankFactors f = truncated_svd(MatrixXd::Ones(3, 4), 0);
  EXPECT_EQ(f.rank(), 0);
  EXPECT_EQ(f.product(), MatrixXd::Zero(3, 4));
}

TEST(TruncatedSvd, DiagonalExample) {
  MatrixXd w = MatrixXd::Zero(2, 2);
  w(0, 0) = 3;
  w(1, 1) = 1;
  MatrixXd expected = MatrixXd::Zero(2, 2);
  expected(0, 0) = 3;
  EXPECT_LE((truncated_svd(w, 1).product() - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(TruncatedSvd, SignConventionAndOrthonormalV) {
  std::mt19937_64 rng(42);
  const MatrixXd w = fx::gaussian(6, 5, rng);
  const LowRankFactors f = truncated_svd(w, 3);
  EXPECT_LE((f.v.transpose() * f.v - MatrixXd::Identity(3, 3)).norm(), 1e-12);
  for (Index k = 0; k < 3; ++k) {
    Index first = 0;
    while (f.v(first, k) == 0.0) ++first;
    EXPECT_GT(f.v(first, k), 0.0);
  }
  EXPECT_EQ(truncated_svd(-w, 3).v, f.v);
}

TEST(TruncatedSvd, RankOutOfRange) {
  EXPECT_THROW(truncated_svd(MatrixXd::Ones(3, 2), 3), ContractError);
  EXPECT_THROW(truncated_svd(MatrixXd::Ones(3, 2), -1), ContractError);
}

TEST(TruncatedSvd, BeatsRandomRankR) {
  std::mt19937_64 rng(43);
  const MatrixXd id = MatrixXd::Identity(6, 6);
  const MatrixXd w = fx::gaussian(6, 5, rng);
  const double best = quadratic_trace(id, w - truncated_svd(w, 2).product());
  for (int trial = 0; trial < 1000; ++trial) {
    const MatrixXd m = random_rank_r(6, 5, 2, rng);
    EXPECT_LE(best, quadratic_trace(id, w - m));
  }
}

TEST(DiagWeighted, IdentityMatchesSvd) {
  std::mt19937_64 rng(44);
  const MatrixXd w = fx::gaussian(6, 5, rng);
  const LowRankFactors a = diag_weighted_lowrank(w, VectorXd::Ones(6), 2);
  const LowRankFactors b = truncated_svd(w, 2);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.v, b.v);
}

TEST(DiagWeighted, SmallExample) {
  VectorXd d(2);
  d << 2, 1;
  MatrixXd expected = MatrixXd::Zero(2, 2);
  expected(0, 0) = 1;
  EXPECT_LE((diag_weighted_lowrank(MatrixXd::Identity(2, 2), d, 1).product() - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(DiagWeighted, BeatsRandomCandidatesAndSearch) {
  std::mt19937_64 rng(45);
  for (int instance = 0; instance < 5; ++instance) {
    const MatrixXd w = fx::gaussian(6, 5, rng);
    const VectorXd d = fx::random_positive(6, rng);
    const MatrixXd h = d.array().square().matrix().asDiagonal();
    const LowRankFactors m = diag_weighted_lowrank(w, d, 2);
    const double best = quadratic_trace(h, w - m.product());
    for (int trial = 0; trial < 1000; ++trial) EXPECT_LE(best, quadratic_trace(h, w - random_rank_r(6, 5, 2, rng)));
    EXPECT_LE(best, oracle::random_search_lowrank(w, h, 2, 200, 100 + instance) * (1.0 + 1e-10));
  }
}

TEST(DiagWeighted, ScaledSvdIdentity) {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd w = fx::gaussian(9, 7, rng);
    const VectorXd d = fx::random_positive(9, rng);
    const MatrixXd lhs = d.asDiagonal() * diag_weighted_lowrank(w, d, 3).product();
    const MatrixXd rhs = truncated_svd(d.asDiagonal() * w, 3).product();
    EXPECT_LE(fx::rel_frobenius(lhs, rhs), 1e-8);
  }
}

TEST(DiagWeighted, NonPositiveScalerRejected) {
  VectorXd d(2);
  d << 1, -1;
  EXPECT_THROW(diag_weighted_lowrank(MatrixXd::Ones(2, 2), d, 1), ContractError);
}

TEST(Adam, ZeroGradientLeavesParameter) {
  MatrixXd x = MatrixXd::Constant(2, 3, 0.7);
  AdamState s = AdamState::zeros(2, 3);
  for (int i = 0; i < 5; ++i) adam_step(x, s, MatrixXd::Zero(2, 3), 0.1);
  EXPECT_EQ(x, MatrixXd::Constant(2, 3, 0.7));
}

TEST(Adam, FirstStepMovesByEta) {
  MatrixXd x = MatrixXd::Zero(1, 1);
  AdamState s = AdamState::zeros(1, 1);
  adam_step(x, s, MatrixXd::Constant(1, 1, 3.7), 0.05);
  EXPECT_NEAR(x(0, 0), -0.05, 1e-9);
}

TEST(Adam, QuadraticMatchesScalarSimulation) {
  // Independent scalar recurrence.
  double xs = 1.0, m = 0.0, v = 0.0;
  std::vector<double> expected;
  for (int t = 1; t <= 10; ++t) {
    const double g = 2.0 * xs;
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mh = m / (1.0 - std::pow(0.9, t));
    const double vh = v / (1.0 - std::pow(0.999, t));
    xs -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
    expected.push_back(xs);
  }
  MatrixXd x = MatrixXd::Ones(1, 1);
  AdamState s = AdamState::zeros(1, 1);
  double prev = 1.0;
  for (int t = 0; t < 10; ++t) {
    adam_step(x, s, 2.0 * x, 0.1);
    EXPECT_NEAR(x(0, 0), expected[t], 1e-14);
    EXPECT_LT(std::abs(x(0, 0)), prev);
    prev = std::abs(x(0, 0));
  }
}

TEST(FactoredGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd h = fx::random_pd(5, rng);
    const MatrixXd w = fx::gaussian(5, 4, rng);
    const MatrixXd u = fx::gaussian(5, 2, rng);
    const MatrixXd v = fx::gaussian(4, 2, rng);
    const FactorGradient g = factored_gradient(h, w, u, v);
    const MatrixXd fd_u = oracle::finite_difference_gradient(
        [&](const MatrixXd& p) { return oracle::trace_objective_naive(h, w - p * v.transpose()); }, u);
    const MatrixXd fd_v = oracle::finite_difference_gradient(
        [&](const MatrixXd& p) { return oracle::trace_objective_naive(h, w - u * p.transpose()); }, v);
    EXPECT_LE(fx::rel_frobenius(g.du, fd_u), 1e-5);
    EXPECT_LE(fx::rel_frobenius(g.dv, fd_v), 1e-5);
    EXPECT_LE(fx::rel_diff(g.objective, factored_objective(h, w, u, v)), 1e-12);
  }
}

TEST(LowRankGd, ZeroTargetIsFixedPoint) {
  std::mt19937_64 rng(48);
  const MatrixXd h = fx::random_pd(4, rng);
  const LowRankFactors f =
      lowrank_gd(h, MatrixXd::Zero(4, 3), MatrixXd::Zero(4, 2), fx::gaussian(3, 2, rng), 20, 0.01);
  EXPECT_EQ(f.product(), MatrixXd::Zero(4, 3));
}

TEST(LowRankGd, RecoversExactLowRankTarget) {
  std::mt19937_64 rng(49);
  const MatrixXd id = MatrixXd::Identity(8, 8);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd w = low_rank_matrix(8, 6, 2, rng);
    const MatrixXd v0 = fx::gaussian(6, 2, rng, 1.0 / std::sqrt(2.0));
    const LowRankFactors f = lowrank_gd(id, w, MatrixXd::Zero(8, 2), v0, 500, 0.05);
    EXPECT_LE(quadratic_trace(id, w - f.product()), 1e-3 * w.squaredNorm());
  }
}

TEST(LowRankGd, NeverWorseThanInitialPoint) {
  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd h = fx::random_pd(6, rng);
    const MatrixXd w = fx::gaussian(6, 5, rng);
    const MatrixXd u0 = fx::gaussian(6, 2, rng);
    const MatrixXd v0 = fx::gaussian(5, 2, rng);
    // Large steps overshoot; tiny ones barely move.
    const bool adam = trial % 4 < 2;
    const double eta = trial % 2 == 0 ? (adam ? 1.0 : 2e-3) : 1e-4;
    const LowRankFactors f =
        lowrank_gd(h, w, u0, v0, 30, eta, adam ? OptimizerKind::Adam : OptimizerKind::GradientDescent);
    EXPECT_LE(factored_objective(h, w, f.u, f.v), factored_objective(h, w, u0, v0));
  }
}

TEST(LowRankGd, NonFiniteGradientIsNumericError) {
  MatrixXd h = MatrixXd::Identity(2, 2);
  const MatrixXd w = MatrixXd::Constant(2, 2, 1e300);
  EXPECT_THROW(lowrank_gd(h, w, MatrixXd::Zero(2, 1), MatrixXd::Constant(2, 1, 1e10), 3, 0.1), NumericError);
}

TEST(LowRankGdScaled, IdentityScalerIsBitwiseUnscaled) {
  std::mt19937_64 rng(51);
  const GramHessian h(MatrixXd::Identity(6, 6), 0.01);
  const MatrixXd w = fx::gaussian(6, 4, rng);
  const LowRankFactors prev{fx::gaussian(6, 2, rng), fx::gaussian(4, 2, rng)};
  const LowRankFactors a = lowrank_gd_scaled(h, w, prev, 25, 0.01);
  const LowRankFactors b = lowrank_gd(h.h(), w, prev.u, prev.v, 25, 0.01);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.v, b.v);
}

TEST(LowRankGdScaled, ScaledAndOriginalObjectivesAgreeAtEveryIterate) {
  std::mt19937_64 rng(52);
  const GramHessian h = dampen(build_gram(fx::correlated_activations(64, 10, rng)), 0.01);
  const MatrixXd w = fx::gaussian(10, 7, rng);
  const VectorXd& d = h.scaler();
  const MatrixXd dw = d.asDiagonal() * w;
  const LowRankFactors prev{MatrixXd::Zero(10, 3), fx::gaussian(7, 3, rng)};
  int visited = 0;
  lowrank_gd_scaled(h, w, prev, 30, 0.01, OptimizerKind::Adam, [&](int, const MatrixXd& us, const MatrixXd& v) {
    const double scaled = quadratic_trace(h.scaled(), dw - us * v.transpose());
    const MatrixXd u = d.cwiseInverse().asDiagonal() * us;
    const double original = quadratic_trace(h.h(), w - u * v.transpose());
    EXPECT_LE(fx::rel_diff(scaled, original), 1e-8);
    ++visited;
  });
  EXPECT_EQ(visited, 31);
}

// Rotated spectrum spanning 1e6 with per-feature scales, normalised to unit
// mean diagonal. Adam is not invariant to the parameter rescaling, and the
// scaled run wins 29/50 here; kept disabled as a record of the expectation.
TEST(LowRankGdScaled, DISABLED_BeatsUnscaledOnIllConditionedHessian) {
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    std::mt19937_64 rng(seed);
    MatrixXd h = fx::conditioned_pd(16, 1e6, 1.0, rng);
    VectorXd sc(16);
    for (Index k = 0; k < 16; ++k) sc(k) = std::exp(fx::uniform(rng, -1.0, 1.0));
    h = sc.asDiagonal() * h * sc.asDiagonal();
    h = 0.5 * (h + h.transpose()) / h.diagonal().mean();
    ASSERT_GE(fx::condition_number(h), 1e6 * 0.5);
    const GramHessian gh(h, 0.0);
    const MatrixXd w = fx::gaussian(16, 12, rng, fx::kLayerWeightStd);
    const LowRankFactors init{MatrixXd::Zero(16, 4), fx::gaussian(12, 4, rng, 0.5)};
    const LowRankFactors a = lowrank_gd_scaled(gh, w, init, 50, 1e-2);
    const LowRankFactors b = lowrank_gd(h, w, init.u, init.v, 50, 1e-2);
    if (factored_objective(h, w, a.u, a.v) < factored_objective(h, w, b.u, b.v)) ++wins;
  }
  EXPECT_GE(wins, 45);
}
