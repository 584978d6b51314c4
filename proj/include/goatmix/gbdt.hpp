#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "goatmix/dataset.hpp"

namespace goatmix {

/// Boosting configuration. Defaults follow the usual XGBoost defaults.
struct GbdtConfig {
  std::size_t rounds = 100;
  std::size_t max_depth = 6;
  double learning_rate = 0.3;
  double min_child_weight = 1.0;
  double lambda = 1.0;  // L2 penalty on leaf weights
  double min_split_gain = 1e-6;
  std::size_t max_thresholds = 256;  // split candidates per feature

  /// Hash over every field's bit pattern; equal configs hash equal.
  std::uint64_t fingerprint() const;
  bool operator==(const GbdtConfig&) const = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // rows with x < threshold go left
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf weight before the learning rate
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double leaf_value(std::span<const double> x) const;
};

class GbdtModel {
 public:
  GbdtModel(GbdtConfig config, double base_score, std::size_t n_features, std::vector<Tree> trees);

  const GbdtConfig& config() const noexcept { return config_; }
  double base_score() const noexcept { return base_score_; }
  std::size_t n_features() const noexcept { return n_features_; }
  const std::vector<Tree>& trees() const noexcept { return trees_; }

  /// Log-odds of one row using the first `n_trees` trees (all by default).
  double margin(std::span<const double> x, std::size_t n_trees = SIZE_MAX) const;
  /// Scores in (0, 1). Throws ConfigError when the column count differs.
  std::vector<double> predict_proba(const FeatureMatrix& x, std::size_t n_trees = SIZE_MAX) const;

 private:
  GbdtConfig config_;
  double base_score_;
  std::size_t n_features_;
  std::vector<Tree> trees_;
};

/// Second-order gradient boosting on the logistic loss. Base score is the
/// training prior log-odds. Throws DataError unless y holds both classes.
GbdtModel train_classifier(const FeatureMatrix& x, std::span<const int> y, const GbdtConfig& config = {});
GbdtModel train_classifier(const Dataset& train, const GbdtConfig& config = {});

/// Mean logistic loss of the first `n_trees` trees.
double logistic_loss(const GbdtModel& model, const FeatureMatrix& x, std::span<const int> y,
                     std::size_t n_trees = SIZE_MAX);

double logistic(double z);

}  // namespace goatmix
