#ifndef SPLR_TYPES_HPP
#define SPLR_TYPES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace splr {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Violated preconditions: bad shapes, infeasible patterns, out-of-range options.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite values, failed factorizations, non-converged decompositions.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Layer weights W (N_in x N_out): rows index the input features.
struct DenseWeights {
  MatrixXd data;

  DenseWeights() = default;
  explicit DenseWeights(MatrixXd w);

  Index n_in() const { return data.rows(); }
  Index n_out() const { return data.cols(); }
};

// Calibration inputs X (samples x N_in).
struct CalibrationActivations {
  MatrixXd data;

  CalibrationActivations() = default;
  explicit CalibrationActivations(MatrixXd x);

  Index samples() const { return data.rows(); }
  Index n_in() const { return data.cols(); }
};

enum class Granularity { PerMatrix, PerColumn };

struct Unstructured {
  Index k = 0;
  Granularity granularity = Granularity::PerMatrix;
};

// At most n nonzeros in every run of m consecutive entries along the input
// dimension (i.e. within one column of W).
struct SemiStructured {
  int n = 2;
  int m = 4;
};

struct Dense {};

using SparsityPattern = std::variant<Unstructured, SemiStructured, Dense>;

struct SparseComponent {
  MatrixXd values;
  Mask mask;

  Index nonzeros() const { return mask.count(); }
};

// M = U V^T with U (N_in x r), V (N_out x r).
struct LowRankFactors {
  MatrixXd u;
  MatrixXd v;

  Index rank() const { return u.cols(); }
  MatrixXd product() const;

  static LowRankFactors zeros(Index n_in, Index n_out, Index r);
};

enum class HalfStep { Sparse, LowRank };

struct TraceEntry {
  int iteration = 0;
  HalfStep half_step = HalfStep::Sparse;
  double objective_damped = 0.0;
  double objective_raw = 0.0;
};

const char* to_string(HalfStep step);

struct DecompositionResult {
  SparseComponent sparse;
  LowRankFactors lowrank;
  std::vector<TraceEntry> trace;
  std::string config_echo;

  MatrixXd reconstruction() const { return sparse.values + lowrank.product(); }
};

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

std::string shape_string(Index rows, Index cols);

}  // namespace splr

#endif  // SPLR_TYPES_HPP
