#include "splr/altmin.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "splr/objective.hpp"
#include "splr/pattern.hpp"

namespace splr {

namespace {

void check_problem(const GramHessian& h, const DenseWeights& w_hat, const SparsityPattern& pattern, Index r) {
  if (h.size() != w_hat.n_in())
    throw ContractError("Hessian is " + shape_string(h.size(), h.size()) + " but weights are " +
                        shape_string(w_hat.n_in(), w_hat.n_out()));
  validate_pattern(pattern, w_hat.n_in(), w_hat.n_out());
  if (r < 0 || r > std::min(w_hat.n_in(), w_hat.n_out()))
    throw ContractError("rank " + std::to_string(r) + " infeasible for a " + shape_string(w_hat.n_in(), w_hat.n_out()) +
                        " layer");
}

struct TraceRecorder {
  const GramHessian& h;
  const MatrixXd raw;
  const MatrixXd& w_hat;
  std::vector<TraceEntry>& trace;

  void record(int t, HalfStep step, const SparseComponent& s, const LowRankFactors& m) {
    trace.push_back({t, step, reconstruction_objective(h.h(), w_hat, s.values, m),
                     reconstruction_objective(raw, w_hat, s.values, m)});
  }
};

}  // namespace

void AltMinConfig::validate() const {
  if (t_am < 1) throw ContractError("t_am must be >= 1");
  if (t_lr < 1) throw ContractError("t_lr must be >= 1");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ContractError("eta must be > 0");
  if (!(percdamp > 0.0)) throw ContractError("percdamp must be > 0");
  if (const auto* obs = std::get_if<ObsPruner>(&pruner); obs != nullptr && obs->blocksize < 1)
    throw ContractError("OBS blocksize must be >= 1");
}

std::string AltMinConfig::describe() const {
  std::ostringstream out;
  out.precision(17);
  out << "pruner=" << to_string(pruner);
  if (const auto* obs = std::get_if<ObsPruner>(&pruner)) out << ";obs_blocksize=" << obs->blocksize;
  out << ";lowrank=" << to_string(lowrank_mode) << ";scaled=" << (is_scaled ? "true" : "false") << ";t_am=" << t_am
      << ";t_lr=" << t_lr << ";eta=" << eta << ";percdamp=" << percdamp
      << ";damp_convention=" << (damp_convention == DampConvention::Trace ? "trace" : "mean-diag") << ";seed=" << seed
      << ";optimizer=" << (optimizer == OptimizerKind::Adam ? "adam" : "gd") << ";activation=" << to_string(activation);
  return out.str();
}

AltMinConfig AltMinConfig::hassle() { return AltMinConfig{}; }

AltMinConfig AltMinConfig::oats() {
  AltMinConfig cfg;
  cfg.pruner = WandaPruner{};
  cfg.lowrank_mode = LowRankMode::DiagClosedForm;
  return cfg;
}

const char* to_string(LowRankMode mode) {
  switch (mode) {
    case LowRankMode::FullHessianGD: return "gd";
    case LowRankMode::DiagClosedForm: return "diag";
    case LowRankMode::DataFreeSVD: return "svd";
  }
  return "?";
}

const char* to_string(Activation act) { return act == Activation::Relu ? "relu" : "identity"; }

double get_lr(int t, double eta) {
  if (t < 1) throw ContractError("get_lr: iteration index must be >= 1");
  if (!(eta > 0.0)) throw ContractError("get_lr: base learning rate must be > 0");
  return eta / (static_cast<double>(t) + 10.0);
}

DecompositionResult hassle_free(const GramHessian& h, const DenseWeights& w_hat, const SparsityPattern& pattern,
                                Index r, const AltMinConfig& cfg, const HalfStepObserver& observer) {
  cfg.validate();
  check_problem(h, w_hat, pattern, r);
  const Index n_in = w_hat.n_in();
  const Index n_out = w_hat.n_out();
  const MatrixXd& w = w_hat.data;

  DecompositionResult result;
  result.config_echo = cfg.describe() + ";pattern=" + to_string(pattern) + ";rank=" + std::to_string(r);
  result.sparse = {MatrixXd::Zero(n_in, n_out), Mask::Constant(n_in, n_out, false)};
  result.lowrank = LowRankFactors::zeros(n_in, n_out, r);
  if (r > 0) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(r)));
    for (Index j = 0; j < r; ++j)
      for (Index i = 0; i < n_out; ++i) result.lowrank.v(i, j) = normal(rng);
  }
  result.trace.reserve(static_cast<std::size_t>(2 * cfg.t_am));
  TraceRecorder recorder{h, h.raw(), w, result.trace};

  for (int t = 1; t <= cfg.t_am; ++t) {
    result.sparse = prune(cfg.pruner, w - result.lowrank.product(), h, pattern);
    recorder.record(t, HalfStep::Sparse, result.sparse, result.lowrank);
    if (observer) observer(t, HalfStep::Sparse, result.sparse, result.lowrank);

    if (r > 0) {
      const double eta_t = get_lr(t, cfg.eta);
      const MatrixXd target = w - result.sparse.values;
      switch (cfg.lowrank_mode) {
        case LowRankMode::FullHessianGD:
          result.lowrank = cfg.is_scaled
                               ? lowrank_gd_scaled(h, target, result.lowrank, cfg.t_lr, eta_t, cfg.optimizer)
                               : lowrank_gd(h.h(), target, result.lowrank.u, result.lowrank.v, cfg.t_lr, eta_t,
                                            cfg.optimizer);
          break;
        case LowRankMode::DiagClosedForm: result.lowrank = diag_weighted_lowrank(target, h.scaler(), r); break;
        case LowRankMode::DataFreeSVD: result.lowrank = truncated_svd(target, r); break;
      }
    }
    recorder.record(t, HalfStep::LowRank, result.sparse, result.lowrank);
    if (observer) observer(t, HalfStep::LowRank, result.sparse, result.lowrank);
  }
  return result;
}

DecompositionResult oats_baseline(const GramHessian& h, const DenseWeights& w_hat, const SparsityPattern& pattern,
                                  Index r, int t_am, const HalfStepObserver& observer) {
  if (t_am < 1) throw ContractError("oats_baseline: T_AM must be >= 1");
  check_problem(h, w_hat, pattern, r);
  const MatrixXd& w = w_hat.data;
  const VectorXd& d = h.scaler();

  AltMinConfig echo = AltMinConfig::oats();
  echo.t_am = t_am;
  DecompositionResult result;
  result.config_echo = echo.describe() + ";pattern=" + to_string(pattern) + ";rank=" + std::to_string(r);
  result.lowrank = LowRankFactors::zeros(w_hat.n_in(), w_hat.n_out(), r);
  TraceRecorder recorder{h, h.raw(), w, result.trace};

  for (int t = 1; t <= t_am; ++t) {
    result.sparse = prune_wanda(w - result.lowrank.product(), d, pattern);
    recorder.record(t, HalfStep::Sparse, result.sparse, result.lowrank);
    if (observer) observer(t, HalfStep::Sparse, result.sparse, result.lowrank);
    if (r > 0) result.lowrank = diag_weighted_lowrank(w - result.sparse.values, d, r);
    recorder.record(t, HalfStep::LowRank, result.sparse, result.lowrank);
    if (observer) observer(t, HalfStep::LowRank, result.sparse, result.lowrank);
  }
  return result;
}

MatrixXd apply_activation(MatrixXd x, Activation act) {
  if (act == Activation::Relu) x = x.cwiseMax(0.0);
  return x;
}

std::vector<LayerOutcome> sequential_decompose(const std::vector<DenseWeights>& layers,
                                               const CalibrationActivations& x0, const std::vector<LayerSpec>& specs,
                                               const AltMinConfig& cfg) {
  if (layers.empty()) throw ContractError("sequential_decompose: no layers");
  if (specs.size() != layers.size())
    throw ContractError("sequential_decompose: " + std::to_string(specs.size()) + " layer specs for " +
                        std::to_string(layers.size()) + " layers");
  Index width = x0.n_in();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].n_in() != width)
      throw ContractError("sequential_decompose: layer " + std::to_string(l) + " expects " +
                          std::to_string(layers[l].n_in()) + " inputs but receives " + std::to_string(width));
    width = layers[l].n_out();
  }
  cfg.validate();

  std::vector<LayerOutcome> outcomes;
  outcomes.reserve(layers.size());
  MatrixXd x = x0.data;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    LayerOutcome out;
    out.gram = build_gram(x);
    const GramHessian h = dampen(out.gram, cfg.percdamp, cfg.damp_convention);
    out.lambda = h.lambda();
    out.result = hassle_free(h, layers[l], specs[l].pattern, specs[l].rank, cfg);
    x = apply_activation(x * out.result.reconstruction(), cfg.activation);
    if (!x.allFinite()) throw NumericError("sequential_decompose: non-finite activations after layer " + std::to_string(l));
    outcomes.push_back(std::move(out));
  }
  return outcomes;
}

}  // namespace splr
