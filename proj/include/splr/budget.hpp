#ifndef SPLR_BUDGET_HPP
#define SPLR_BUDGET_HPP

#include <cstdint>

#include "splr/types.hpp"

namespace splr {

// r = floor((1 - rho - N/M) * N_out * N_in / (N_out + N_in)). Throws
// ContractError when the N:M part alone already exceeds the budget.
Index rank_for_fixed_compression(double rho, int n, int m, Index n_in, Index n_out);

struct RankRatioBudget {
  Index rank = 0;
  Index nonzeros = 0;
};

// r = floor(kappa (1 - rho) N_out N_in / (N_out + N_in)),
// k = floor((1 - kappa)(1 - rho) N_out N_in).
RankRatioBudget budget_for_rank_ratio(double kappa, double rho, Index n_in, Index n_out);

// Stored parameters: nonzeros allowed by the pattern plus r (N_in + N_out).
std::uint64_t effective_params(const SparsityPattern& pattern, Index r, Index n_in, Index n_out);

// effective <= (1 - rho) N_in N_out
bool within_compression(std::uint64_t effective, double rho, Index n_in, Index n_out);

}  // namespace splr

#endif  // SPLR_BUDGET_HPP
