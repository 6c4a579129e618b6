#ifndef SPLR_CONFIG_HPP
#define SPLR_CONFIG_HPP

#include <istream>
#include <string>
#include <string_view>
#include <variant>

#include "splr/altmin.hpp"
#include "splr/types.hpp"

namespace splr {

struct FixedRank {
  Index r = 64;
};
// rank_for_fixed_compression with the configured N:M pattern
struct AutoRank {
  double rho = 0.5;
};
// budget_for_rank_ratio; the nonzero budget becomes a per-matrix pattern
struct RatioRank {
  double kappa = 0.3;
  double rho = 0.5;
};
using RankSpec = std::variant<FixedRank, AutoRank, RatioRank>;

// Line-based `key = value` run configuration. '#' starts a comment.
// Unknown and repeated keys are rejected.
struct RunConfig {
  AltMinConfig altmin;
  SparsityPattern pattern = SemiStructured{2, 4};
  RankSpec rank = FixedRank{};

  struct Resolved {
    SparsityPattern pattern;
    Index rank = 0;
  };
  // Pattern and rank for an N_in x N_out layer.
  Resolved resolve(Index n_in, Index n_out) const;
};

RunConfig parse_run_config(std::istream& in);
RunConfig parse_run_config_text(std::string_view text);
RunConfig load_run_config(const std::string& path);

RankSpec parse_rank(std::string_view text);
std::string to_string(const RankSpec& rank);

}  // namespace splr

#endif  // SPLR_CONFIG_HPP
