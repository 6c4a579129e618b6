#include "splr/types.hpp"

namespace splr {

DenseWeights::DenseWeights(MatrixXd w) : data(std::move(w)) {
  if (data.rows() < 1 || data.cols() < 1)
    throw ContractError("weights must be at least 1x1, got " + shape_string(data.rows(), data.cols()));
  if (!data.allFinite()) throw NumericError("weights contain non-finite entries");
}

CalibrationActivations::CalibrationActivations(MatrixXd x) : data(std::move(x)) {
  if (data.rows() < 1 || data.cols() < 1)
    throw ContractError("activations must be at least 1x1, got " + shape_string(data.rows(), data.cols()));
  if (!data.allFinite()) throw NumericError("activations contain non-finite entries");
}

MatrixXd LowRankFactors::product() const {
  if (u.cols() == 0) return MatrixXd::Zero(u.rows(), v.rows());
  return u * v.transpose();
}

LowRankFactors LowRankFactors::zeros(Index n_in, Index n_out, Index r) {
  return {MatrixXd::Zero(n_in, r), MatrixXd::Zero(n_out, r)};
}

const char* to_string(HalfStep step) { return step == HalfStep::Sparse ? "P1" : "P2"; }

std::string shape_string(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace splr
