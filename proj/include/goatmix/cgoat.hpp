#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "goatmix/gbdt.hpp"
#include "goatmix/preprocess.hpp"
#include "goatmix/sgoat.hpp"
#include "goatmix/synthesizer.hpp"
#include "goatmix/tpe.hpp"

namespace goatmix {

/// Mixture proportions over an ordered list of generators.
struct MixtureWeights {
  std::vector<double> alpha;

  /// Normalizes raw non-negative coordinates; an all-zero vector maps to uniform.
  static MixtureWeights from_raw(std::span<const double> raw);
  /// Throws ConfigError unless every weight is in [0, 1] and they sum to 1 +- 1e-9.
  void validate() const;
  bool operator==(const MixtureWeights&) const = default;
};

using GeneratorSet = std::vector<std::shared_ptr<const Generator>>;

/// The corner points e_0 .. e_{M-1} followed by the AUC-proportional point
/// (auc_m - min) / sum_j (auc_j - min), uniform when all AUCs are equal.
/// Throws ConfigError for an AUC outside [0, 1].
std::vector<MixtureWeights> warm_starts(std::span<const double> auc_val);

/// Round-half-even of alpha_m n, then +-1 corrections until the total is n.
/// Additions go to the largest remainders alpha_m n - rounded_m, removals to
/// the most negative ones; ties go to the lower index.
std::vector<std::size_t> allocate_rows(std::span<const double> alpha, std::size_t n);

/// Samples allocate_rows(alpha, n)[m] rows from generator m with seed
/// derive_seed(seed, {m}) and stacks the blocks in generator order.
Dataset compose(const GeneratorSet& generators, std::span<const double> alpha, std::size_t n, std::uint64_t seed);

struct CgoatConfig {
  std::size_t max_iterations = 150;  // K, warm starts included
  std::size_t patience = 15;
  std::size_t rows = 0;  // composed rows per trial; 0 means |train|
  std::uint64_t seed = 0;
  /// Validation AUC of each generator for the proportional warm start. When
  /// empty, the AUCs of the corner trials of this run are used.
  std::vector<double> individual_auc;
  /// Return a fresh draw from best_alpha instead of the winning trial's data.
  bool resample_final = false;
  GbdtConfig classifier;
  TpeOptions tpe;

  void validate() const;
};

struct CgoatResult {
  MixtureWeights best_alpha;
  Dataset best_synthetic;
  double best_val_loss = -0.5;
  TrialHistory history;
  std::vector<TrialOutcome> outcomes;  // parallel to history.trials()
  std::vector<MixtureWeights> warm_starts;
  std::vector<double> individual_auc;
  std::size_t iterations_run = 0;
  bool degenerate = false;  // every trial was single-class
};

/// Name of the simplex parameter in the C-GOAT search space.
inline constexpr const char* kAlphaParam = "alpha";

SearchSpace mixture_space(std::size_t n_generators);

/// Learns mixture weights over `generators` (at least two, one shared schema)
/// against validation AUC. Warm starts are recorded first as warm_start trials.
CgoatResult run_cgoat(const CgoatConfig& cfg, const GeneratorSet& generators, const Partition& part);

}  // namespace goatmix
