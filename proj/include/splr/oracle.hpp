#ifndef SPLR_ORACLE_HPP
#define SPLR_ORACLE_HPP

#include <cstdint>
#include <functional>

#include "splr/types.hpp"

// Brute-force references for tests. Everything here is written with plain
// loops and its own elimination routine; nothing calls into the production
// pruners or low-rank solvers.
namespace splr::oracle {

inline constexpr Index kMaxExhaustiveRows = 8;

struct SparseOptimum {
  double objective = 0.0;
  SparseComponent component;
};

/// Minimizes Tr((W~ - W_S)^T H (W~ - W_S)) over W_S feasible for the
/// pattern by enumerating every support of every column and solving
/// H_SS w_S = H_{S,:} w~ on it. Needs N_in <= 8 and a pattern that
/// separates over columns (N:M, per-column unstructured, dense).
SparseOptimum exhaustive_sparse(const MatrixXd& w_tilde, const MatrixXd& h, const SparsityPattern& pattern);

// Optimal weights on a fixed support for one column.
VectorXd restricted_weights(const MatrixXd& h, const VectorXd& w_tilde, const std::vector<Index>& support);

/// Random search over rank-r factorizations for min Tr((W - UV^T)^T H (W - UV^T)).
/// Each trial draws a Gaussian U, then alternates the exact V and U
/// least-squares refits a few times. When `anchor` is non-empty, half of the
/// trials start from a random rotation of it plus a small perturbation.
/// trials = 0 returns +infinity.
double random_search_lowrank(const MatrixXd& w_bar, const MatrixXd& h, Index r, int trials, std::uint64_t seed,
                             const MatrixXd& anchor_u = MatrixXd());

// Central differences, elementwise.
MatrixXd finite_difference_gradient(const std::function<double(const MatrixXd&)>& f, const MatrixXd& point,
                                    double epsilon = 1e-6);

// Gaussian elimination with partial pivoting on a copy of a.
MatrixXd solve_naive(MatrixXd a, MatrixXd b);

// Straight triple loop for Tr(D^T H D).
double trace_objective_naive(const MatrixXd& h, const MatrixXd& delta);

}  // namespace splr::oracle

#endif  // SPLR_ORACLE_HPP
