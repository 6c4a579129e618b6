#include "splr/commands.hpp"

#include <filesystem>
#include <fstream>

#include "splr/altmin.hpp"
#include "splr/budget.hpp"
#include "splr/config.hpp"
#include "splr/gram.hpp"
#include "splr/io.hpp"
#include "splr/lowrank.hpp"
#include "splr/objective.hpp"
#include "splr/oracle.hpp"
#include "splr/pattern.hpp"

namespace splr::commands {

namespace {

const char* yes_no(bool b) { return b ? "true" : "false"; }

std::ofstream open_text(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ContractError("cannot open '" + path + "' for writing");
  return out;
}

void write_trace(const std::string& path, const DecompositionResult& result) {
  auto out = open_text(path);
  io::CsvWriter csv(out);
  csv.row({"iter", "half_step", "objective_damped", "objective_raw"});
  for (const TraceEntry& e : result.trace)
    csv.row({std::to_string(e.iteration), to_string(e.half_step), io::format_double(e.objective_damped),
             io::format_double(e.objective_raw)});
}

void write_factors(const std::string& prefix, const DecompositionResult& result) {
  io::save_matrix(prefix + ".sparse.hslf", result.sparse.values);
  io::save_matrix(prefix + ".u.hslf", result.lowrank.u);
  io::save_matrix(prefix + ".v.hslf", result.lowrank.v);
  write_trace(prefix + ".trace.csv", result);
}

DenseWeights load_weights(const std::string& path) { return DenseWeights(io::load_matrix(path)); }

void check_gram(const MatrixXd& gram, const DenseWeights& w, const std::string& activations) {
  if (gram.rows() != w.n_in())
    throw ContractError("activations '" + activations + "' have " + std::to_string(gram.rows()) +
                        " features but the weights expect N_in=" + std::to_string(w.n_in()));
}

}  // namespace

DecomposeSummary decompose(const DecomposeArgs& args) {
  const RunConfig cfg = load_run_config(args.config);
  const DenseWeights w = load_weights(args.weights);
  const MatrixXd gram = io::stream_gram(args.activations);
  check_gram(gram, w, args.activations);
  const RunConfig::Resolved run = cfg.resolve(w.n_in(), w.n_out());

  const std::size_t factorizations_before = hessian_factorization_count();
  const GramHessian h = dampen(gram, cfg.altmin.percdamp, cfg.altmin.damp_convention);
  const DecompositionResult result = hassle_free(h, w, run.pattern, run.rank, cfg.altmin);

  DecomposeSummary s;
  s.n_in = w.n_in();
  s.n_out = w.n_out();
  s.pattern = to_string(run.pattern);
  s.rank = run.rank;
  s.objective_damped = result.trace.back().objective_damped;
  s.objective_raw = result.trace.back().objective_raw;
  s.mask_feasible = is_feasible(result.sparse.mask, run.pattern);
  s.rank_feasible = numeric_rank(result.lowrank.product()) <= run.rank;
  s.nonzeros = result.sparse.nonzeros();
  s.effective_params = effective_params(run.pattern, run.rank, s.n_in, s.n_out);
  s.hessian_factorizations = hessian_factorization_count() - factorizations_before;

  write_factors(args.out_prefix, result);
  auto out = open_text(args.out_prefix + ".summary.csv");
  io::CsvWriter csv(out);
  csv.row({"n_in", "n_out", "pattern", "rank", "objective_damped", "objective_raw", "mask_feasible", "rank_feasible",
           "nonzeros", "effective_params", "hessian_factorizations", "config"});
  csv.row({std::to_string(s.n_in), std::to_string(s.n_out), s.pattern, std::to_string(s.rank),
           io::format_double(s.objective_damped), io::format_double(s.objective_raw), yes_no(s.mask_feasible),
           yes_no(s.rank_feasible), std::to_string(s.nonzeros), std::to_string(s.effective_params),
           std::to_string(s.hessian_factorizations), result.config_echo});
  return s;
}

void budget(const BudgetArgs& args, std::ostream& out) {
  const SparsityPattern pattern = args.pattern == "k" ? SparsityPattern{Unstructured{}} : parse_pattern(args.pattern);
  io::CsvWriter csv(out);
  if (args.kappa) {
    if (!args.rho) throw ContractError("--kappa needs --rho");
    if (std::holds_alternative<SemiStructured>(pattern))
      throw ContractError("--kappa budgets are unstructured; use --pattern k or k:<int>");
    const RankRatioBudget b = budget_for_rank_ratio(*args.kappa, *args.rho, args.n_in, args.n_out);
    const std::uint64_t eff = effective_params(Unstructured{b.nonzeros, Granularity::PerMatrix}, b.rank, args.n_in,
                                               args.n_out);
    csv.row({"rank", "nonzeros", "effective_params", "within_budget"});
    csv.row({std::to_string(b.rank), std::to_string(b.nonzeros), std::to_string(eff),
             yes_no(within_compression(eff, *args.rho, args.n_in, args.n_out))});
    return;
  }
  if (args.rho) {
    const auto* nm = std::get_if<SemiStructured>(&pattern);
    if (nm == nullptr) throw ContractError("--rho without --kappa needs an N:M pattern");
    const Index r = rank_for_fixed_compression(*args.rho, nm->n, nm->m, args.n_in, args.n_out);
    const std::uint64_t eff = effective_params(pattern, r, args.n_in, args.n_out);
    csv.row({"rank", "effective_params", "within_budget"});
    csv.row({std::to_string(r), std::to_string(eff), yes_no(within_compression(eff, *args.rho, args.n_in, args.n_out))});
    return;
  }
  throw ContractError("budget needs --rho, or --kappa with --rho");
}

EvalReport eval(const EvalArgs& args, std::ostream& out) {
  RunConfig cfg;
  if (!args.config.empty()) cfg = load_run_config(args.config);
  const DenseWeights w = load_weights(args.weights);
  const MatrixXd gram = io::stream_gram(args.activations);
  check_gram(gram, w, args.activations);

  SparseComponent sparse;
  sparse.values = io::load_matrix(args.sparse);
  sparse.mask = sparse.values.array() != 0.0;
  LowRankFactors m{io::load_matrix(args.u), io::load_matrix(args.v)};
  const GramHessian h = dampen(gram, cfg.altmin.percdamp, cfg.altmin.damp_convention);

  EvalReport report;
  report.objective_raw = reconstruction_objective(gram, w, sparse, m);
  report.objective_damped = reconstruction_objective(h.h(), w, sparse, m);
  SparsityPattern pattern = cfg.pattern;
  if (!args.pattern.empty()) pattern = parse_pattern(args.pattern);
  else if (std::holds_alternative<RatioRank>(cfg.rank)) pattern = cfg.resolve(w.n_in(), w.n_out()).pattern;
  report.pattern = to_string(pattern);
  report.mask_feasible = is_feasible(sparse.mask, pattern);
  report.nonzeros = sparse.nonzeros();
  report.numeric_rank = numeric_rank(m.product());

  io::CsvWriter csv(out);
  csv.row({"metric", "value"});
  csv.row({"objective_raw", io::format_double(report.objective_raw)});
  csv.row({"objective_damped", io::format_double(report.objective_damped)});
  csv.row({"pattern", report.pattern});
  csv.row({"mask_feasible", yes_no(report.mask_feasible)});
  csv.row({"nonzeros", std::to_string(report.nonzeros)});
  csv.row({"numeric_rank", std::to_string(report.numeric_rank)});
  return report;
}

void pipeline(const PipelineArgs& args, std::ostream& log) {
  if (args.layers.empty()) throw ContractError("pipeline needs at least one layer");
  const RunConfig cfg = load_run_config(args.config);
  std::vector<DenseWeights> layers;
  std::vector<LayerSpec> specs;
  for (const std::string& path : args.layers) {
    layers.push_back(load_weights(path));
    const auto resolved = cfg.resolve(layers.back().n_in(), layers.back().n_out());
    specs.push_back({resolved.pattern, resolved.rank});
  }
  const CalibrationActivations x0(io::load_matrix(args.activations));
  const auto outcomes = sequential_decompose(layers, x0, specs, cfg.altmin);

  std::filesystem::create_directories(args.out_dir);
  auto out = open_text((std::filesystem::path(args.out_dir) / "pipeline.csv").string());
  io::CsvWriter csv(out);
  csv.row({"layer", "n_in", "n_out", "pattern", "rank", "lambda", "objective_damped", "objective_raw", "mask_feasible",
           "rank_feasible", "effective_params"});
  for (std::size_t l = 0; l < outcomes.size(); ++l) {
    const DecompositionResult& res = outcomes[l].result;
    const std::string prefix = (std::filesystem::path(args.out_dir) / ("layer" + std::to_string(l))).string();
    write_factors(prefix, res);
    const Index n_in = layers[l].n_in();
    const Index n_out = layers[l].n_out();
    csv.row({std::to_string(l), std::to_string(n_in), std::to_string(n_out), to_string(specs[l].pattern),
             std::to_string(specs[l].rank), io::format_double(outcomes[l].lambda),
             io::format_double(res.trace.back().objective_damped), io::format_double(res.trace.back().objective_raw),
             yes_no(is_feasible(res.sparse.mask, specs[l].pattern)),
             yes_no(numeric_rank(res.lowrank.product()) <= specs[l].rank),
             std::to_string(effective_params(specs[l].pattern, specs[l].rank, n_in, n_out))});
    log << "layer " << l << ": objective_raw=" << io::format_double(res.trace.back().objective_raw) << '\n';
  }
}

void oracle_sparse(const std::string& weights, const std::string& activations, const std::string& pattern,
                   double percdamp, std::ostream& out) {
  const DenseWeights w = load_weights(weights);
  const MatrixXd gram = io::stream_gram(activations);
  check_gram(gram, w, activations);
  const GramHessian h = dampen(gram, percdamp);
  const auto best = oracle::exhaustive_sparse(w.data, h.h(), parse_pattern(pattern));
  io::CsvWriter csv(out);
  csv.row({"metric", "value"});
  csv.row({"objective_damped", io::format_double(best.objective)});
  csv.row({"nonzeros", std::to_string(best.component.nonzeros())});
}

}  // namespace splr::commands
