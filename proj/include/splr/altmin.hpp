#ifndef SPLR_ALTMIN_HPP
#define SPLR_ALTMIN_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "splr/gram.hpp"
#include "splr/lowrank.hpp"
#include "splr/pruners.hpp"
#include "splr/types.hpp"

namespace splr {

enum class LowRankMode { FullHessianGD, DiagClosedForm, DataFreeSVD };
enum class Activation { Identity, Relu };

struct AltMinConfig {
  int t_am = 80;
  int t_lr = 50;
  double eta = 1e-2;
  PrunerKind pruner = ObsPruner{};
  LowRankMode lowrank_mode = LowRankMode::FullHessianGD;
  bool is_scaled = true;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double percdamp = 0.01;
  DampConvention damp_convention = DampConvention::MeanDiagonal;
  std::uint64_t seed = 0;
  Activation activation = Activation::Identity;

  void validate() const;
  std::string describe() const;

  // {OBS, FullHessianGD, scaled}
  static AltMinConfig hassle();
  // {Wanda, DiagClosedForm}
  static AltMinConfig oats();
};

const char* to_string(LowRankMode mode);
const char* to_string(Activation act);

// eta / (t + 10), t >= 1.
double get_lr(int t, double eta);

// Sees the current iterate after each half-step.
using HalfStepObserver =
    std::function<void(int iteration, HalfStep step, const SparseComponent& sparse, const LowRankFactors& lowrank)>;

/// Alternating minimization of Tr(D^T H D), D = W_hat - W_S - U V^T.
///
/// Starts from W_S = 0, U = 0 and V with iid N(0, 1/r) entries drawn from
/// cfg.seed. Each iteration prunes W_hat - U V^T with cfg.pruner, then
/// refits the low-rank part to W_hat - W_S with cfg.lowrank_mode using the
/// step size get_lr(t, eta). Both damped and raw objectives are logged after
/// every half-step. H and everything derived from it are reused; nothing
/// here refactors the Hessian. r = 0 skips the low-rank steps.
DecompositionResult hassle_free(const GramHessian& h, const DenseWeights& w_hat, const SparsityPattern& pattern,
                                Index r, const AltMinConfig& cfg, const HalfStepObserver& observer = {});

/// OATS: Wanda pruning alternated with the diagonal-Hessian closed form,
/// both exact for the surrogate Tr(D^T diag(H) D).
DecompositionResult oats_baseline(const GramHessian& h, const DenseWeights& w_hat, const SparsityPattern& pattern,
                                  Index r, int t_am, const HalfStepObserver& observer = {});

struct LayerSpec {
  SparsityPattern pattern;
  Index rank = 0;
};

struct LayerOutcome {
  MatrixXd gram;  // raw X^T X seen by this layer
  double lambda = 0.0;
  DecompositionResult result;
};

// Layer-by-layer compression of a linear chain: each layer's Hessian comes
// from the outputs of the already-compressed previous layers.
std::vector<LayerOutcome> sequential_decompose(const std::vector<DenseWeights>& layers,
                                               const CalibrationActivations& x0, const std::vector<LayerSpec>& specs,
                                               const AltMinConfig& cfg);

MatrixXd apply_activation(MatrixXd x, Activation act);

}  // namespace splr

#endif  // SPLR_ALTMIN_HPP
