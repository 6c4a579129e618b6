#include "splr/gram.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

namespace splr {

namespace {
std::atomic<std::size_t> g_factorizations{0};
}

GramAccumulator::GramAccumulator(Index n_in) : gram_(MatrixXd::Zero(n_in, n_in)) {
  if (n_in < 1) throw ContractError("GramAccumulator: N_in must be >= 1");
}

MatrixXd GramAccumulator::finish() const { return 0.5 * (gram_ + gram_.transpose()); }

MatrixXd build_gram(const MatrixXd& x) {
  GramAccumulator acc(x.cols());
  for (Index r0 = 0; r0 < x.rows(); r0 += kGramBlockRows) {
    const Index rows = std::min(kGramBlockRows, x.rows() - r0);
    acc.add_rows(x.middleRows(r0, rows));
  }
  return acc.finish();
}

MatrixXd build_gram(const CalibrationActivations& x) { return build_gram(x.data); }

GramHessian::GramHessian(MatrixXd h, double lambda) : h_(std::move(h)), lambda_(lambda) {
  if (h_.rows() != h_.cols() || h_.rows() < 1)
    throw ContractError("GramHessian: expected a non-empty square matrix, got " + shape_string(h_.rows(), h_.cols()));
  if (!(lambda_ >= 0.0)) throw ContractError("GramHessian: lambda must be >= 0");
  if (!h_.allFinite()) throw NumericError("GramHessian: non-finite entries");

  const Index n = h_.rows();
  Eigen::LLT<MatrixXd> llt(h_);
  if (llt.info() != Eigen::Success) {
    const VectorXd diag = h_.diagonal();
    std::ostringstream msg;
    msg << "GramHessian: Cholesky factorization failed (lambda=" << lambda_ << ", diag min=" << diag.minCoeff()
        << ", diag max=" << diag.maxCoeff() << ")";
    throw NumericError(msg.str());
  }
  h_inv_ = llt.solve(MatrixXd::Identity(n, n));
  h_inv_ = 0.5 * (h_inv_ + h_inv_.transpose());

  Eigen::LLT<MatrixXd> inv_llt(h_inv_);
  if (inv_llt.info() != Eigen::Success || !h_inv_.allFinite())
    throw NumericError("GramHessian: inverse is not numerically positive definite");
  h_inv_chol_ = inv_llt.matrixU();

  d_ = h_.diagonal().cwiseSqrt();
  if ((d_.array() <= 0.0).any()) throw NumericError("GramHessian: non-positive diagonal after factorization");
  const VectorXd d_inv = d_.cwiseInverse();
  h_scaled_ = d_inv.asDiagonal() * h_ * d_inv.asDiagonal();

  ++g_factorizations;
}

MatrixXd GramHessian::raw() const {
  MatrixXd r = h_;
  r.diagonal().array() -= lambda_;
  return r;
}

double damping_lambda(const MatrixXd& h, double percdamp, DampConvention convention) {
  if (!(percdamp > 0.0)) throw ContractError("dampen: percdamp must be > 0");
  if (h.rows() != h.cols() || h.rows() < 1) throw ContractError("dampen: H must be square and non-empty");
  const double trace = h.trace();
  return convention == DampConvention::Trace ? percdamp * trace : percdamp * trace / static_cast<double>(h.rows());
}

GramHessian dampen(const MatrixXd& h, double percdamp, DampConvention convention) {
  const double lambda = damping_lambda(h, percdamp, convention);
  if (!(lambda > 0.0))
    throw NumericError("dampen: damping term is " + std::to_string(lambda) + "; the Gram matrix is singular");
  MatrixXd damped = h;
  damped.diagonal().array() += lambda;
  return GramHessian(std::move(damped), lambda);
}

VectorXd diag_scaler(const MatrixXd& h) {
  if (h.rows() != h.cols()) throw ContractError("diag_scaler: H must be square");
  const VectorXd diag = h.diagonal();
  if ((diag.array() <= 0.0).any()) throw ContractError("diag_scaler: H has a non-positive diagonal entry");
  return diag.cwiseSqrt();
}

VectorXd diag_scaler(const GramHessian& h) { return h.scaler(); }

std::size_t hessian_factorization_count() { return g_factorizations.load(); }
void reset_hessian_factorization_count() { g_factorizations = 0; }

}  // namespace splr
