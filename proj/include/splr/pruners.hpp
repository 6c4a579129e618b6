#ifndef SPLR_PRUNERS_HPP
#define SPLR_PRUNERS_HPP

#include <variant>

#include "splr/gram.hpp"
#include "splr/pattern.hpp"
#include "splr/types.hpp"

namespace splr {

struct MagnitudePruner {};
struct WandaPruner {};
struct ObsPruner {
  Index blocksize = 128;
};

using PrunerKind = std::variant<MagnitudePruner, WandaPruner, ObsPruner>;

/// Hard-thresholds |W~| under the pattern. Exact minimizer of the sparse
/// subproblem when H = I. Kept entries keep their values.
SparseComponent prune_magnitude(const MatrixXd& w_tilde, const SparsityPattern& pattern);

/// Support chosen by the Wanda score |D_ii W~_ij|, values unchanged. Exact
/// minimizer when H is diagonal with H = D^2.
SparseComponent prune_wanda(const MatrixXd& w_tilde, const VectorXd& d, const SparsityPattern& pattern);

/// SparseGPT-style OBS sweep along the input dimension using the full
/// Hessian. Rows are visited in blocks; each pruned entry's error is pushed
/// onto the not-yet-visited rows through the upper Cholesky factor of H^{-1}.
///
/// Mask selection:
///  - N:M: chosen per group as the sweep reaches it, by w^2 / R_ii^2.
///  - unstructured: at the start of every block the remaining budget is
///    ranked over all unvisited entries; the block's share of the winners
///    is fixed. The result is feasible for the declared budget.
/// A blocksize that is not a multiple of M is rounded up to one.
SparseComponent prune_obs(const MatrixXd& w_tilde, const GramHessian& h, const SparsityPattern& pattern,
                          Index blocksize = 128);

SparseComponent prune(const PrunerKind& kind, const MatrixXd& w_tilde, const GramHessian& h,
                      const SparsityPattern& pattern);

const char* to_string(const PrunerKind& kind);

}  // namespace splr

#endif  // SPLR_PRUNERS_HPP
