#include "splr/lowrank.hpp"

#include <cmath>
#include <limits>

namespace splr {

namespace {

void check_rank(Index r, Index rows, Index cols, const char* who) {
  if (r < 0 || r > std::min(rows, cols))
    throw ContractError(std::string(who) + ": rank " + std::to_string(r) + " outside [0, " +
                        std::to_string(std::min(rows, cols)) + "]");
}

}  // namespace

LowRankFactors truncated_svd(const MatrixXd& w_bar, Index r) {
  check_rank(r, w_bar.rows(), w_bar.cols(), "truncated_svd");
  if (!w_bar.allFinite()) throw NumericError("truncated_svd: non-finite input");
  if (r == 0) return LowRankFactors::zeros(w_bar.rows(), w_bar.cols(), 0);

  Eigen::BDCSVD<MatrixXd> svd(w_bar, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericError("truncated_svd: SVD did not converge");

  MatrixXd u = svd.matrixU().leftCols(r);
  MatrixXd v = svd.matrixV().leftCols(r);
  for (Index c = 0; c < r; ++c) {
    Index first = 0;
    while (first < v.rows() && v(first, c) == 0.0) ++first;
    if (first < v.rows() && v(first, c) < 0.0) {
      v.col(c) = -v.col(c);
      u.col(c) = -u.col(c);
    }
  }
  u = u * svd.singularValues().head(r).asDiagonal();
  return {std::move(u), std::move(v)};
}

LowRankFactors diag_weighted_lowrank(const MatrixXd& w_bar, const VectorXd& d, Index r) {
  if (d.size() != w_bar.rows())
    throw ContractError("diag_weighted_lowrank: scaler has length " + std::to_string(d.size()) + ", expected " +
                        std::to_string(w_bar.rows()));
  if (!((d.array() > 0.0).all())) throw ContractError("diag_weighted_lowrank: scaler must be strictly positive");
  LowRankFactors f = truncated_svd(d.asDiagonal() * w_bar, r);
  f.u = d.cwiseInverse().asDiagonal() * f.u;
  return f;
}

void adam_step(MatrixXd& param, AdamState& state, const MatrixXd& grad, double eta) {
  if (!grad.allFinite()) throw NumericError("adam_step: non-finite gradient");
  if (state.m.rows() != param.rows() || state.m.cols() != param.cols()) state = AdamState::zeros(param.rows(), param.cols());
  ++state.step;
  state.m = kAdamBeta1 * state.m + (1.0 - kAdamBeta1) * grad;
  state.v = kAdamBeta2 * state.v + (1.0 - kAdamBeta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.step));
  param.array() -= eta * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + kAdamEps);
}

double factored_objective(const MatrixXd& h, const MatrixXd& w, const MatrixXd& u, const MatrixXd& v) {
  const MatrixXd r = w - u * v.transpose();
  return r.cwiseProduct(h * r).sum();
}

FactorGradient factored_gradient(const MatrixXd& h, const MatrixXd& w, const MatrixXd& u, const MatrixXd& v) {
  const MatrixXd r = w - u * v.transpose();
  const MatrixXd hr = h * r;
  FactorGradient g;
  g.objective = r.cwiseProduct(hr).sum();
  g.du = -2.0 * hr * v;
  g.dv = -2.0 * hr.transpose() * u;
  return g;
}

LowRankFactors lowrank_gd(const MatrixXd& h_eff, const MatrixXd& w_target, const MatrixXd& u_init,
                          const MatrixXd& v_init, int iterations, double eta, OptimizerKind optimizer,
                          const IterateObserver& observer) {
  const Index n_in = w_target.rows();
  const Index n_out = w_target.cols();
  if (h_eff.rows() != n_in || h_eff.cols() != n_in)
    throw ContractError("lowrank_gd: Hessian " + shape_string(h_eff.rows(), h_eff.cols()) + " does not match target " +
                        shape_string(n_in, n_out));
  if (u_init.rows() != n_in || v_init.rows() != n_out || u_init.cols() != v_init.cols())
    throw ContractError("lowrank_gd: factor shapes U " + shape_string(u_init.rows(), u_init.cols()) + ", V " +
                        shape_string(v_init.rows(), v_init.cols()) + " do not match target " + shape_string(n_in, n_out));
  if (iterations < 1) throw ContractError("lowrank_gd: T_LR must be >= 1");
  if (!(eta > 0.0)) throw ContractError("lowrank_gd: learning rate must be > 0");

  MatrixXd u = u_init;
  MatrixXd v = v_init;
  if (u.cols() == 0) {
    if (observer) observer(0, u, v);
    return {u, v};
  }

  AdamState su = AdamState::zeros(u.rows(), u.cols());
  AdamState sv = AdamState::zeros(v.rows(), v.cols());
  LowRankFactors best{u, v};
  double best_obj = std::numeric_limits<double>::infinity();

  for (int step = 0; step <= iterations; ++step) {
    if (observer) observer(step, u, v);
    const FactorGradient g = factored_gradient(h_eff, w_target, u, v);
    if (!std::isfinite(g.objective) || !g.du.allFinite() || !g.dv.allFinite())
      throw NumericError("lowrank_gd: non-finite gradient at iteration " + std::to_string(step));
    if (g.objective < best_obj) {
      best_obj = g.objective;
      best.u = u;
      best.v = v;
    }
    if (step == iterations) break;
    if (optimizer == OptimizerKind::Adam) {
      adam_step(u, su, g.du, eta);
      adam_step(v, sv, g.dv, eta);
    } else {
      u -= eta * g.du;
      v -= eta * g.dv;
    }
  }
  return best;
}

LowRankFactors lowrank_gd_scaled(const GramHessian& h, const MatrixXd& w_target, const LowRankFactors& previous,
                                 int iterations, double eta, OptimizerKind optimizer, const IterateObserver& observer) {
  const VectorXd& d = h.scaler();
  if (d.size() != w_target.rows())
    throw ContractError("lowrank_gd_scaled: Hessian size " + std::to_string(d.size()) + " does not match target rows " +
                        std::to_string(w_target.rows()));
  const MatrixXd target = d.asDiagonal() * w_target;
  const MatrixXd u0 = d.asDiagonal() * previous.u;
  LowRankFactors f = lowrank_gd(h.scaled(), target, u0, previous.v, iterations, eta, optimizer, observer);
  f.u = d.cwiseInverse().asDiagonal() * f.u;
  return f;
}

Index numeric_rank(const MatrixXd& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<MatrixXd> svd(m);
  const VectorXd s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  return (s.array() > rel_tol * s(0)).count();
}

}  // namespace splr
