#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "goatmix/gbdt.hpp"
#include "goatmix/metrics.hpp"
#include "goatmix/preprocess.hpp"
#include "goatmix/synthesizer.hpp"
#include "goatmix/tpe.hpp"

namespace goatmix {

struct SgoatConfig {
  Method method = Method::gaussian_copula;
  std::size_t max_iterations = 350;  // K, warm start included
  std::size_t patience = 10;
  std::size_t rows = 0;  // synthetic rows per trial; 0 means |train|
  std::uint64_t seed = 0;
  /// GaussianCopula with no hyperparameters; run_sgoat rejects it.
  bool frozen = false;
  GbdtConfig classifier;
  TpeOptions tpe;

  void validate() const;
};

struct TrialOutcome {
  bool degenerate = false;  // synthetic data held a single class
  bool converged = true;    // every EM fit reached its tolerance
};

struct SgoatResult {
  Method method = Method::gaussian_copula;
  HyperParams best_theta;
  double best_val_loss = -0.5;
  TrialHistory history;
  std::vector<TrialOutcome> outcomes;  // parallel to history.trials()
  std::size_t iterations_run = 0;
  /// Fit seed of the best trial; fit(method, train, best_theta, best_fit_seed) rebuilds its generator.
  std::uint64_t best_fit_seed = 0;
  /// Every trial was degenerate; best_val_loss is -0.5.
  bool degenerate = false;
};

/// Builds a generator from training data; the default wraps fit().
using GeneratorFactory =
    std::function<std::shared_ptr<const Generator>(const Dataset& train, const HyperParams& theta, std::uint64_t seed)>;

struct ThetaEvaluation {
  EvalResult eval;
  TrialOutcome outcome;
};

/// One fit, sample, train, score pass. Returns -validation AUC in eval.loss.
ThetaEvaluation evaluate_theta(Method m, const HyperParams& theta, const Partition& part, std::size_t rows,
                               std::uint64_t seed, const GbdtConfig& classifier = {});

/// Tunes the hyperparameters of cfg.method. Trial 0 is default_theta(method),
/// tagged warm_start; later trials come from TPE. Stops after K trials or once
/// more than n_startup trials exist and the best is `patience` trials old.
/// Throws ConfigError for a frozen or otherwise empty search space.
SgoatResult run_sgoat(const SgoatConfig& cfg, const Partition& part);

/// Fit seed used by trial k of a run seeded with `seed`.
std::uint64_t sgoat_fit_seed(std::uint64_t seed, std::size_t k);

/// Same loop over an arbitrary space and generator factory.
SgoatResult run_sgoat(const SgoatConfig& cfg, const Partition& part, const SearchSpace& space,
                      const HyperParams& initial, const GeneratorFactory& factory);

}  // namespace goatmix
