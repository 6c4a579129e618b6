#ifndef SPLR_GRAM_HPP
#define SPLR_GRAM_HPP

#include <cstddef>

#include "splr/types.hpp"

namespace splr {

enum class DampConvention { MeanDiagonal, Trace };

// Streams row blocks of X and accumulates X^T X in a fixed order, so the
// result does not depend on how the caller chunks its reads as long as the
// block size is fixed.
class GramAccumulator {
 public:
  explicit GramAccumulator(Index n_in);

  template <typename Derived>
  void add_rows(const Eigen::MatrixBase<Derived>& block) {
    if (block.cols() != gram_.cols())
      throw ContractError("GramAccumulator: block has " + std::to_string(block.cols()) + " columns, expected " +
                          std::to_string(gram_.cols()));
    if (!block.allFinite()) throw NumericError("GramAccumulator: non-finite activation values");
    gram_.noalias() += block.transpose() * block;
    samples_ += block.rows();
  }

  Index samples() const { return samples_; }
  // Symmetrized as (A + A^T) / 2.
  MatrixXd finish() const;

 private:
  MatrixXd gram_;
  Index samples_ = 0;
};

inline constexpr Index kGramBlockRows = 1024;

MatrixXd build_gram(const CalibrationActivations& x);
MatrixXd build_gram(const MatrixXd& x);

// Damped layer Hessian H = X^T X + lambda I with everything the solvers
// reuse across alternating-minimization iterations: the Cholesky factor,
// H^{-1}, the upper Cholesky factor of H^{-1} for the OBS sweep, the
// diagonal scaler D = sqrt(diag(H)) and the rescaled D^{-1} H D^{-1}.
class GramHessian {
 public:
  // h must already include the damping term lambda.
  GramHessian(MatrixXd h, double lambda);

  const MatrixXd& h() const { return h_; }
  double lambda() const { return lambda_; }
  MatrixXd raw() const;
  const MatrixXd& inverse() const { return h_inv_; }
  // Upper triangular R with H^{-1} = R^T R.
  const MatrixXd& inverse_cholesky_upper() const { return h_inv_chol_; }
  const VectorXd& scaler() const { return d_; }
  const MatrixXd& scaled() const { return h_scaled_; }
  Index size() const { return h_.rows(); }

 private:
  MatrixXd h_;
  double lambda_ = 0.0;
  MatrixXd h_inv_;
  MatrixXd h_inv_chol_;
  VectorXd d_;
  MatrixXd h_scaled_;
};

double damping_lambda(const MatrixXd& h, double percdamp, DampConvention convention = DampConvention::MeanDiagonal);

GramHessian dampen(const MatrixXd& h, double percdamp, DampConvention convention = DampConvention::MeanDiagonal);

VectorXd diag_scaler(const GramHessian& h);
VectorXd diag_scaler(const MatrixXd& h);

// Number of Hessian factorizations (Cholesky + inverse) performed by this
// process. Used to check that one run factors each layer Hessian once.
std::size_t hessian_factorization_count();
void reset_hessian_factorization_count();

}  // namespace splr

#endif  // SPLR_GRAM_HPP
