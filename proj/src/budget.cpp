#include "splr/budget.hpp"

#include <cmath>

#include "splr/pattern.hpp"

namespace splr {

namespace {

// Coefficients within this distance of zero are treated as the exact
// boundary; 1 - rho - N/M evaluated in floating point is not exact.
constexpr double kBoundarySlack = 1e-12;

void check_dims(Index n_in, Index n_out) {
  if (n_in < 1 || n_out < 1) throw ContractError("layer dimensions must be >= 1");
}

void check_rho(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw ContractError("compression ratio rho must lie in [0, 1)");
}

}  // namespace

Index rank_for_fixed_compression(double rho, int n, int m, Index n_in, Index n_out) {
  check_rho(rho);
  check_dims(n_in, n_out);
  if (n < 1 || n > m) throw ContractError("N:M budget requires 1 <= N <= M");
  double coeff = 1.0 - rho - static_cast<double>(n) / static_cast<double>(m);
  if (std::abs(coeff) < kBoundarySlack) coeff = 0.0;
  if (coeff < 0.0)
    throw ContractError("budget infeasible: rho=" + std::to_string(rho) + " exceeds 1 - N/M for " + std::to_string(n) +
                        ":" + std::to_string(m));
  const double nn = static_cast<double>(n_in);
  const double no = static_cast<double>(n_out);
  return static_cast<Index>(std::floor(coeff * (no * nn) / (no + nn)));
}

RankRatioBudget budget_for_rank_ratio(double kappa, double rho, Index n_in, Index n_out) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw ContractError("rank ratio kappa must lie in [0, 1]");
  check_rho(rho);
  check_dims(n_in, n_out);
  const double nn = static_cast<double>(n_in);
  const double no = static_cast<double>(n_out);
  RankRatioBudget b;
  b.rank = static_cast<Index>(std::floor(kappa * (1.0 - rho) * no * nn / (no + nn)));
  b.nonzeros = static_cast<Index>(std::floor((1.0 - kappa) * (1.0 - rho) * no * nn));
  return b;
}

std::uint64_t effective_params(const SparsityPattern& pattern, Index r, Index n_in, Index n_out) {
  check_dims(n_in, n_out);
  if (r < 0) throw ContractError("rank must be >= 0");
  const auto cells = static_cast<std::uint64_t>(n_in) * static_cast<std::uint64_t>(n_out);
  std::uint64_t sparse = 0;
  if (std::holds_alternative<Dense>(pattern)) {
    sparse = cells;
  } else if (const auto* nm = std::get_if<SemiStructured>(&pattern)) {
    if (nm->n < 1 || nm->n > nm->m) throw ContractError("N:M pattern requires 1 <= N <= M");
    sparse = cells * static_cast<std::uint64_t>(nm->n) / static_cast<std::uint64_t>(nm->m);
  } else {
    sparse = static_cast<std::uint64_t>(max_nonzeros(pattern, n_in, n_out));
  }
  return sparse + static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(n_in + n_out);
}

bool within_compression(std::uint64_t effective, double rho, Index n_in, Index n_out) {
  return static_cast<double>(effective) <= (1.0 - rho) * static_cast<double>(n_in) * static_cast<double>(n_out);
}

}  // namespace splr
