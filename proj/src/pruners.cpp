#include "splr/pruners.hpp"

#include <algorithm>
#include <vector>

namespace splr {

namespace {

struct Candidate {
  double saliency;
  Index flat;
};

bool ranks_before(const Candidate& a, const Candidate& b) {
  if (a.saliency != b.saliency) return a.saliency > b.saliency;
  return a.flat < b.flat;
}

void require_finite(const MatrixXd& w, const char* who) {
  if (!w.allFinite()) throw NumericError(std::string(who) + ": non-finite weights");
}

// Picks the top `budget` entries among rows [from, rows) of the columns in
// [col_begin, col_end), fixes the ones that fall in [from, until) as kept and
// returns how many were fixed.
Index select_unstructured_block(const MatrixXd& w, const VectorXd& r_diag_sq, Index from, Index until,
                                Index col_begin, Index col_end, Index budget, Mask& keep) {
  const Index rows = w.rows();
  std::vector<Candidate> candidates;
  candidates.reserve(static_cast<std::size_t>((rows - from) * (col_end - col_begin)));
  for (Index j = col_begin; j < col_end; ++j)
    for (Index i = from; i < rows; ++i) candidates.push_back({w(i, j) * w(i, j) / r_diag_sq(i), j * rows + i});

  const Index n = static_cast<Index>(candidates.size());
  budget = std::min(budget, n);
  if (budget <= 0) return 0;
  if (budget < n)
    std::nth_element(candidates.begin(), candidates.begin() + (budget - 1), candidates.end(), ranks_before);
  Index fixed = 0;
  for (Index c = 0; c < budget; ++c) {
    const Index flat = candidates[static_cast<std::size_t>(c)].flat;
    const Index i = flat % rows;
    if (i < until) {
      keep(i, flat / rows) = true;
      ++fixed;
    }
  }
  return fixed;
}

}  // namespace

SparseComponent prune_magnitude(const MatrixXd& w_tilde, const SparsityPattern& pattern) {
  require_finite(w_tilde, "prune_magnitude");
  return apply_mask(w_tilde, select_support(w_tilde.cwiseAbs(), pattern));
}

SparseComponent prune_wanda(const MatrixXd& w_tilde, const VectorXd& d, const SparsityPattern& pattern) {
  require_finite(w_tilde, "prune_wanda");
  if (d.size() != w_tilde.rows())
    throw ContractError("prune_wanda: scaler has length " + std::to_string(d.size()) + ", expected " +
                        std::to_string(w_tilde.rows()));
  if (!((d.array() > 0.0).all())) throw ContractError("prune_wanda: scaler entries must be strictly positive");
  const MatrixXd scores = (d.asDiagonal() * w_tilde).cwiseAbs();
  return apply_mask(w_tilde, select_support(scores, pattern));
}

SparseComponent prune_obs(const MatrixXd& w_tilde, const GramHessian& h, const SparsityPattern& pattern,
                          Index blocksize) {
  require_finite(w_tilde, "prune_obs");
  const Index rows = w_tilde.rows();
  const Index cols = w_tilde.cols();
  if (h.size() != rows)
    throw ContractError("prune_obs: Hessian is " + shape_string(h.size(), h.size()) + " but weights have " +
                        std::to_string(rows) + " input rows");
  if (blocksize < 1) throw ContractError("prune_obs: blocksize must be >= 1");
  validate_pattern(pattern, rows, cols);

  if (std::holds_alternative<Dense>(pattern)) return apply_mask(w_tilde, Mask::Constant(rows, cols, true));

  const auto* nm = std::get_if<SemiStructured>(&pattern);
  const auto* unstructured = std::get_if<Unstructured>(&pattern);
  if (nm != nullptr && blocksize % nm->m != 0) blocksize = (blocksize / nm->m + 1) * nm->m;

  const MatrixXd& r = h.inverse_cholesky_upper();
  const VectorXd r_diag_sq = r.diagonal().cwiseAbs2();

  MatrixXd w = w_tilde;
  Mask keep = Mask::Constant(rows, cols, false);
  Index matrix_budget = unstructured != nullptr ? unstructured->k : 0;
  std::vector<Index> column_budget(static_cast<std::size_t>(cols), unstructured != nullptr ? unstructured->k : 0);

  std::vector<Candidate> group;
  for (Index b0 = 0; b0 < rows; b0 += blocksize) {
    const Index b1 = std::min(b0 + blocksize, rows);
    const Index count = b1 - b0;

    if (unstructured != nullptr) {
      if (unstructured->granularity == Granularity::PerMatrix) {
        matrix_budget -= select_unstructured_block(w, r_diag_sq, b0, b1, 0, cols, matrix_budget, keep);
      } else {
        for (Index j = 0; j < cols; ++j)
          column_budget[static_cast<std::size_t>(j)] -= select_unstructured_block(
              w, r_diag_sq, b0, b1, j, j + 1, column_budget[static_cast<std::size_t>(j)], keep);
      }
    }

    MatrixXd err(count, cols);
    for (Index i = b0; i < b1; ++i) {
      if (nm != nullptr && i % nm->m == 0) {
        for (Index j = 0; j < cols; ++j) {
          group.clear();
          for (Index g = i; g < i + nm->m; ++g) group.push_back({w(g, j) * w(g, j) / r_diag_sq(g), j * rows + g});
          std::nth_element(group.begin(), group.begin() + (nm->n - 1), group.end(), ranks_before);
          for (Index c = 0; c < nm->n; ++c) keep(group[static_cast<std::size_t>(c)].flat % rows, j) = true;
        }
      }

      const Eigen::RowVectorXd row = w.row(i);
      const Eigen::RowVectorXd q = keep.row(i).select(row, Eigen::RowVectorXd::Zero(cols));
      const Eigen::RowVectorXd e = (row - q) / r(i, i);
      if (b1 > i + 1) w.middleRows(i + 1, b1 - i - 1).noalias() -= r.row(i).segment(i + 1, b1 - i - 1).transpose() * e;
      w.row(i) = q;
      err.row(i - b0) = e;
    }
    if (b1 < rows) w.bottomRows(rows - b1).noalias() -= r.block(b0, b1, count, rows - b1).transpose() * err;
    if (!w.allFinite()) throw NumericError("prune_obs: non-finite weights after block starting at row " + std::to_string(b0));
  }
  return apply_mask(w, std::move(keep));
}

SparseComponent prune(const PrunerKind& kind, const MatrixXd& w_tilde, const GramHessian& h,
                      const SparsityPattern& pattern) {
  if (std::holds_alternative<MagnitudePruner>(kind)) return prune_magnitude(w_tilde, pattern);
  if (std::holds_alternative<WandaPruner>(kind)) return prune_wanda(w_tilde, h.scaler(), pattern);
  return prune_obs(w_tilde, h, pattern, std::get<ObsPruner>(kind).blocksize);
}

const char* to_string(const PrunerKind& kind) {
  if (std::holds_alternative<MagnitudePruner>(kind)) return "magnitude";
  if (std::holds_alternative<WandaPruner>(kind)) return "wanda";
  return "obs";
}

}  // namespace splr
