#include "goatmix/sgoat.hpp"

#include "goatmix/errors.hpp"

namespace goatmix {
namespace {

ThetaEvaluation evaluate_generator(const Generator& g, const Partition& part, std::size_t rows, std::uint64_t seed,
                                   const GbdtConfig& classifier) {
  ThetaEvaluation out;
  const Dataset synthetic = g.sample(rows, derive_seed(seed, "sample"));
  out.eval = evaluate_utility(synthetic, part.val, classifier);
  out.outcome.degenerate = out.eval.degenerate;
  if (const auto* fitted = dynamic_cast<const FittedSynthesizer*>(&g)) out.outcome.converged = fitted->converged();
  return out;
}

}  // namespace

std::uint64_t sgoat_fit_seed(std::uint64_t seed, std::size_t k) { return derive_seed(derive_seed(seed, {k}), "fit"); }

void SgoatConfig::validate() const {
  if (max_iterations < 1) throw ConfigError("S-GOAT needs K >= 1");
  if (patience < 1) throw ConfigError("S-GOAT needs patience >= 1");
}

ThetaEvaluation evaluate_theta(Method m, const HyperParams& theta, const Partition& part, std::size_t rows,
                               std::uint64_t seed, const GbdtConfig& classifier) {
  const auto g = fit(m, part.train, theta, derive_seed(seed, "fit"));
  return evaluate_generator(g, part, rows, seed, classifier);
}

SgoatResult run_sgoat(const SgoatConfig& cfg, const Partition& part) {
  if (cfg.frozen && cfg.method == Method::gaussian_copula)
    throw ConfigError("frozen gaussian_copula has no hyperparameters to tune; evaluate it once with evaluate_theta");
  const Method m = cfg.method;
  return run_sgoat(cfg, part, search_space(m, cfg.frozen), default_theta(m),
                   [m](const Dataset& train, const HyperParams& theta, std::uint64_t seed) {
                     return std::make_shared<FittedSynthesizer>(fit(m, train, theta, seed));
                   });
}

SgoatResult run_sgoat(const SgoatConfig& cfg, const Partition& part, const SearchSpace& space,
                      const HyperParams& initial, const GeneratorFactory& factory) {
  cfg.validate();
  if (space.empty()) throw ConfigError("S-GOAT needs a nonempty search space");
  const std::size_t rows = cfg.rows ? cfg.rows : part.train.n_rows();

  SgoatResult result{cfg.method, {}, -0.5, TrialHistory(space, derive_seed(cfg.seed, "tpe"), cfg.tpe), {}, 0, 0, false};
  auto& history = result.history;
  auto run_trial = [&](const HyperParams& theta, TrialTag tag) {
    const std::uint64_t seed = derive_seed(cfg.seed, {history.size()});
    const auto g = factory(part.train, theta, sgoat_fit_seed(cfg.seed, history.size()));
    const auto ev = evaluate_generator(*g, part, rows, seed, cfg.classifier);
    history.record(theta, ev.eval.loss, tag);
    result.outcomes.push_back(ev.outcome);
  };

  run_trial(initial, TrialTag::warm_start);
  while (history.size() < cfg.max_iterations) {
    if (history.size() > cfg.tpe.n_startup && history.should_stop(cfg.patience)) break;
    run_trial(history.suggest(), TrialTag::suggested);
  }

  const auto& best = history.best();
  result.best_theta = best.point;
  result.best_val_loss = best.loss;
  result.iterations_run = history.size();
  result.best_fit_seed = sgoat_fit_seed(cfg.seed, history.best_index());
  result.degenerate = true;
  for (const auto& o : result.outcomes) result.degenerate = result.degenerate && o.degenerate;
  return result;
}

}  // namespace goatmix
