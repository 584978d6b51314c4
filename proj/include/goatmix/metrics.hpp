#pragma once

#include <span>

#include "goatmix/dataset.hpp"
#include "goatmix/gbdt.hpp"

namespace goatmix {

/// Mann-Whitney AUC: P(score_pos > score_neg) + P(tie) / 2. Computed from
/// integer half-rank sums, so it equals pair counting bit for bit.
/// Throws DataError unless both classes are present, ConfigError on NaN or
/// a length mismatch.
double auc(std::span<const double> scores, std::span<const int> labels);

struct EvalResult {
  double auc = 0.5;
  double loss = -0.5;  // always -auc
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  /// Training data held fewer than two classes; auc is pinned to 0.5.
  bool degenerate = false;
};

/// Trains the downstream classifier on `train` and scores AUC on `eval`.
/// A single-class or empty `train` gives a degenerate result instead of an error.
/// Throws DataError when `eval` lacks a class.
EvalResult evaluate_utility(const Dataset& train, const Dataset& eval, const GbdtConfig& config = {});

}  // namespace goatmix
