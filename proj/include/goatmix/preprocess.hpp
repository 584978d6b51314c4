#pragma once

#include <cstdint>
#include <vector>

#include "goatmix/dataset.hpp"

namespace goatmix {

struct SplitFractions {
  double train = 0.7;
  double val = 0.2;
  double test = 0.1;
};

struct Partition {
  Dataset train;
  Dataset val;
  Dataset test;
  std::uint64_t seed = 0;
  /// Source row indices of each part.
  std::vector<std::size_t> train_rows, val_rows, test_rows;
};

/// Seeded shuffle followed by contiguous assignment: |train| = round(0.7 n),
/// |val| = round(0.2 n), test gets the rest. Re-draws (up to 100 derived seeds)
/// until the training part holds both label classes.
Partition split(const Dataset& d, std::uint64_t seed, const SplitFractions& fractions = {});

/// Smoothed target encoding fitted on a training set. Category c with n_c rows
/// and label mean m_c maps to (n_c m_c + s g) / (n_c + s), g the global label mean.
class TargetEncoder {
 public:
  TargetEncoder(const Dataset& train, double smoothing);

  /// Replaces every categorical feature with its encoded value; output columns are continuous.
  Dataset apply(const Dataset& d) const;

  double global_mean() const noexcept { return global_mean_; }
  /// Encoded value of category `category` of schema column `column`.
  double value(std::size_t column, std::size_t category) const { return table_.at(column).at(category); }

 private:
  Schema source_schema_;
  Schema encoded_schema_;
  double global_mean_ = 0.0;
  std::vector<std::vector<double>> table_;  // per schema column; empty for non-encoded columns
};

Dataset target_encode(const Dataset& train, const Dataset& apply_to, double smoothing);

struct SmoteOptions {
  std::size_t k_neighbors = 5;
  /// Desired minority/majority row ratio in (0, 1].
  double target_ratio = 0.5;
};

/// SMOTE oversampling of the minority class combined with random undersampling
/// of the majority class. Both classes are rescaled by the same factor so the
/// output ratio matches target_ratio to within one row. Synthetic rows are
/// x + u (x_nn - x), u ~ U(0,1), x_nn among the k nearest minority neighbours.
/// Retained source rows keep their order; synthetic rows are appended.
Dataset smote_balance(const Dataset& d, const SmoteOptions& options, std::uint64_t seed);

}  // namespace goatmix
