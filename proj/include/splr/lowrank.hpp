#ifndef SPLR_LOWRANK_HPP
#define SPLR_LOWRANK_HPP

#include <functional>
#include <utility>

#include "splr/gram.hpp"
#include "splr/types.hpp"

namespace splr {

/// Best rank-r approximation C_r(W) with the singular values folded into U
/// (V has orthonormal columns). Each right singular vector is signed so its
/// first nonzero entry is positive.
LowRankFactors truncated_svd(const MatrixXd& w_bar, Index r);

/// Exact minimizer of Tr((W - M)^T D^2 (W - M)) over rank-<=r M:
/// M* = D^{-1} C_r(D W). Returned as factors with U = D^{-1} U_svd.
LowRankFactors diag_weighted_lowrank(const MatrixXd& w_bar, const VectorXd& d, Index r);

// Adam with bias correction, beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
struct AdamState {
  MatrixXd m;
  MatrixXd v;
  long step = 0;

  static AdamState zeros(Index rows, Index cols) { return {MatrixXd::Zero(rows, cols), MatrixXd::Zero(rows, cols), 0}; }
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

void adam_step(MatrixXd& param, AdamState& state, const MatrixXd& grad, double eta);

enum class OptimizerKind { Adam, GradientDescent };

// Obj(U, V) = Tr((W - U V^T)^T H (W - U V^T)).
double factored_objective(const MatrixXd& h, const MatrixXd& w, const MatrixXd& u, const MatrixXd& v);

struct FactorGradient {
  MatrixXd du;
  MatrixXd dv;
  double objective = 0.0;
};

// grad_U = -2 H R V, grad_V = -2 R^T H U with R = W - U V^T.
FactorGradient factored_gradient(const MatrixXd& h, const MatrixXd& w, const MatrixXd& u, const MatrixXd& v);

// Called with every iterate the optimizer visits (including the initial
// point), in the solver's own coordinates.
using IterateObserver = std::function<void(int step, const MatrixXd& u, const MatrixXd& v)>;

/// Runs `iterations` optimizer steps on (U, V) jointly and returns the
/// lowest-objective iterate seen, so the result never scores worse than the
/// initial point. Optimizer moments start from zero on every call.
LowRankFactors lowrank_gd(const MatrixXd& h_eff, const MatrixXd& w_target, const MatrixXd& u_init,
                          const MatrixXd& v_init, int iterations, double eta,
                          OptimizerKind optimizer = OptimizerKind::Adam, const IterateObserver& observer = {});

/// Same problem solved in diagonally rescaled coordinates: Hessian
/// D^{-1} H D^{-1} (unit diagonal), target D W, warm start (D U, V). The
/// result is mapped back with U = D^{-1} U_scaled, which leaves
/// Tr((W - U V^T)^T H (W - U V^T)) equal to the scaled objective.
LowRankFactors lowrank_gd_scaled(const GramHessian& h, const MatrixXd& w_target, const LowRankFactors& previous,
                                 int iterations, double eta, OptimizerKind optimizer = OptimizerKind::Adam,
                                 const IterateObserver& observer = {});

// Numeric rank: singular values above rel_tol * sigma_max.
Index numeric_rank(const MatrixXd& m, double rel_tol = 1e-10);

}  // namespace splr

#endif  // SPLR_LOWRANK_HPP
