#ifndef SPLR_PATTERN_HPP
#define SPLR_PATTERN_HPP

#include <string>
#include <string_view>

#include "splr/types.hpp"

namespace splr {

// Throws ContractError unless the pattern can be applied to a rows x cols
// matrix (N:M needs rows divisible by M, budgets must fit).
void validate_pattern(const SparsityPattern& pattern, Index rows, Index cols);

// Pure feasibility predicate. Never throws; a shape the pattern cannot
// apply to is infeasible.
bool is_feasible(const Mask& mask, const SparsityPattern& pattern);

// Keeps the highest-scoring entries allowed by the pattern. Ties go to the
// lowest flat (column-major) index. Scores must be finite.
Mask select_support(const MatrixXd& scores, const SparsityPattern& pattern);

// Upper bound on nonzeros the pattern admits in a rows x cols matrix.
Index max_nonzeros(const SparsityPattern& pattern, Index rows, Index cols);

std::string to_string(const SparsityPattern& pattern);

// "dense", "k:<int>" (per-matrix), "kcol:<int>" (per-column), "<N>:<M>".
SparsityPattern parse_pattern(std::string_view text);

template <typename Derived>
SparseComponent apply_mask(const Eigen::MatrixBase<Derived>& values, Mask mask) {
  SparseComponent out;
  out.values = mask.select(values, MatrixXd::Zero(values.rows(), values.cols()));
  out.mask = std::move(mask);
  return out;
}

}  // namespace splr

#endif  // SPLR_PATTERN_HPP
