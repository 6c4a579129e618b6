#ifndef SPLR_OBJECTIVE_HPP
#define SPLR_OBJECTIVE_HPP

#include <cmath>

#include "splr/types.hpp"

namespace splr {

// Tr(delta^T H delta). Clamped at zero: for PSD H any negative value is
// rounding noise.
template <typename DerivedH, typename DerivedD>
double quadratic_trace(const Eigen::MatrixBase<DerivedH>& h, const Eigen::MatrixBase<DerivedD>& delta) {
  if (h.rows() != h.cols() || h.cols() != delta.rows())
    throw ContractError("quadratic_trace: H is " + shape_string(h.rows(), h.cols()) + " but delta is " +
                        shape_string(delta.rows(), delta.cols()));
  const MatrixXd hd = h * delta;
  const double value = delta.cwiseProduct(hd).sum();
  if (!std::isfinite(value)) throw NumericError("quadratic_trace: non-finite objective");
  return value < 0.0 ? 0.0 : value;
}

// Layer-wise reconstruction error Tr(D^T H D) with D = W_hat - (W_S + U V^T).
// Equals ||X D||_F^2 when H = X^T X.
template <typename DerivedH>
double reconstruction_objective(const Eigen::MatrixBase<DerivedH>& h, const MatrixXd& w_hat, const MatrixXd& w_s,
                                const LowRankFactors& m) {
  if (w_s.rows() != w_hat.rows() || w_s.cols() != w_hat.cols())
    throw ContractError("reconstruction_objective: sparse component " + shape_string(w_s.rows(), w_s.cols()) +
                        " does not match weights " + shape_string(w_hat.rows(), w_hat.cols()));
  if (m.u.rows() != w_hat.rows() || m.v.rows() != w_hat.cols() || m.u.cols() != m.v.cols())
    throw ContractError("reconstruction_objective: low-rank factors U " + shape_string(m.u.rows(), m.u.cols()) +
                        ", V " + shape_string(m.v.rows(), m.v.cols()) + " do not match weights " +
                        shape_string(w_hat.rows(), w_hat.cols()));
  if (!h.allFinite()) throw NumericError("reconstruction_objective: non-finite Hessian");
  return quadratic_trace(h, w_hat - w_s - m.product());
}

template <typename DerivedH>
double reconstruction_objective(const Eigen::MatrixBase<DerivedH>& h, const DenseWeights& w_hat,
                                const SparseComponent& w_s, const LowRankFactors& m) {
  return reconstruction_objective(h, w_hat.data, w_s.values, m);
}

}  // namespace splr

#endif  // SPLR_OBJECTIVE_HPP
