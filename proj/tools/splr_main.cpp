// splr: sparse plus low-rank layer decomposition.
//
//   splr decompose --weights W.hslf --activations X.hslf --config run.cfg --out-prefix out/layer
//   splr budget    --pattern 2:8 --rho 0.5 --nin 4096 --nout 4096
//   splr eval      --weights W.hslf --activations X.hslf --sparse S.hslf --u U.hslf --v V.hslf
//   splr pipeline  --layers a.hslf,b.hslf --activations X.hslf --config run.cfg --out-dir out/
//
// Exit codes: 0 success, 2 usage/contract/format error, 3 numeric failure.

#include <iostream>

#include "CLI11.hpp"
#include "splr/commands.hpp"

namespace {

constexpr int kExitContract = 2;
constexpr int kExitNumeric = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse plus low-rank decomposition of layer weights"};
  app.require_subcommand(1);

  splr::commands::DecomposeArgs dec;
  auto* decompose = app.add_subcommand("decompose", "Decompose one layer");
  decompose->add_option("--weights", dec.weights, "Weight matrix (N_in x N_out)")->required();
  decompose->add_option("--activations", dec.activations, "Calibration activations (samples x N_in)")->required();
  decompose->add_option("--config", dec.config, "key = value run configuration")->required();
  decompose->add_option("--out-prefix", dec.out_prefix, "Prefix for output files")->required();

  splr::commands::BudgetArgs bud;
  double rho = 0.0;
  double kappa = 0.0;
  auto* budget = app.add_subcommand("budget", "Rank and nonzero budgets for a compression target");
  budget->add_option("--pattern", bud.pattern, "N:M, k, or k:<int>")->required();
  auto* rho_opt = budget->add_option("--rho", rho, "Compression ratio");
  auto* kappa_opt = budget->add_option("--kappa", kappa, "Rank ratio");
  budget->add_option("--nin", bud.n_in)->required();
  budget->add_option("--nout", bud.n_out)->required();

  splr::commands::EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Evaluate a stored decomposition");
  eval->add_option("--weights", ev.weights)->required();
  eval->add_option("--activations", ev.activations)->required();
  eval->add_option("--sparse", ev.sparse)->required();
  eval->add_option("--u", ev.u)->required();
  eval->add_option("--v", ev.v)->required();
  eval->add_option("--config", ev.config, "Damping and pattern settings");
  eval->add_option("--pattern", ev.pattern, "Pattern to check the mask against");

  splr::commands::PipelineArgs pipe;
  auto* pipeline = app.add_subcommand("pipeline", "Compress a chain of layers sequentially");
  pipeline->add_option("--layers", pipe.layers, "Comma-separated weight files in order")->required()->delimiter(',');
  pipeline->add_option("--activations", pipe.activations)->required();
  pipeline->add_option("--config", pipe.config)->required();
  pipeline->add_option("--out-dir", pipe.out_dir)->required();

  std::string or_weights, or_acts, or_pattern = "2:4";
  double or_percdamp = 0.01;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive sparse optimum (debugging)");
  oracle->group("");
  oracle->add_option("--weights", or_weights)->required();
  oracle->add_option("--activations", or_acts)->required();
  oracle->add_option("--pattern", or_pattern);
  oracle->add_option("--percdamp", or_percdamp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitContract;
  }

  try {
    if (*decompose) {
      const auto s = splr::commands::decompose(dec);
      std::cout << "objective_raw=" << s.objective_raw << " objective_damped=" << s.objective_damped
                << " rank=" << s.rank << " pattern=" << s.pattern << '\n';
    } else if (*budget) {
      if (*rho_opt) bud.rho = rho;
      if (*kappa_opt) bud.kappa = kappa;
      splr::commands::budget(bud, std::cout);
    } else if (*eval) {
      splr::commands::eval(ev, std::cout);
    } else if (*pipeline) {
      splr::commands::pipeline(pipe, std::cout);
    } else if (*oracle) {
      splr::commands::oracle_sparse(or_weights, or_acts, or_pattern, or_percdamp, std::cout);
    }
  } catch (const splr::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const splr::ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  }
  return 0;
}
