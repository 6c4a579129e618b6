#ifndef SPLR_COMMANDS_HPP
#define SPLR_COMMANDS_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "splr/types.hpp"

// File-level drivers behind the `splr` subcommands.
namespace splr::commands {

struct DecomposeArgs {
  std::string weights;
  std::string activations;
  std::string config;
  std::string out_prefix;
};

struct DecomposeSummary {
  Index n_in = 0;
  Index n_out = 0;
  std::string pattern;
  Index rank = 0;
  double objective_damped = 0.0;
  double objective_raw = 0.0;
  bool mask_feasible = false;
  bool rank_feasible = false;
  Index nonzeros = 0;
  std::uint64_t effective_params = 0;
  std::size_t hessian_factorizations = 0;
};

// Writes <prefix>.sparse.hslf, .u.hslf, .v.hslf, .trace.csv, .summary.csv.
DecomposeSummary decompose(const DecomposeArgs& args);

struct BudgetArgs {
  std::string pattern;
  std::optional<double> rho;
  std::optional<double> kappa;
  Index n_in = 0;
  Index n_out = 0;
};

void budget(const BudgetArgs& args, std::ostream& out);

struct EvalArgs {
  std::string weights;
  std::string activations;
  std::string sparse;
  std::string u;
  std::string v;
  std::string config;   // optional: damping and pattern to check against
  std::string pattern;  // optional override
};

struct EvalReport {
  double objective_raw = 0.0;
  double objective_damped = 0.0;
  std::string pattern;
  bool mask_feasible = false;
  Index nonzeros = 0;
  Index numeric_rank = 0;
};

EvalReport eval(const EvalArgs& args, std::ostream& out);

struct PipelineArgs {
  std::vector<std::string> layers;
  std::string activations;
  std::string config;
  std::string out_dir;
};

void pipeline(const PipelineArgs& args, std::ostream& log);

// Exhaustive optimum of the sparse subproblem for a tiny layer.
void oracle_sparse(const std::string& weights, const std::string& activations, const std::string& pattern,
                   double percdamp, std::ostream& out);

}  // namespace splr::commands

#endif  // SPLR_COMMANDS_HPP
