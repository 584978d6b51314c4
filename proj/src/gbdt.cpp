#include "goatmix/gbdt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "goatmix/errors.hpp"
#include "goatmix/random.hpp"

namespace goatmix {
namespace {

/// Candidate thresholds of one feature: midpoints between adjacent distinct
/// values, thinned to at most `cap` by quantile position.
std::vector<double> candidate_thresholds(std::vector<double> values, std::size_t cap) {
  std::sort(values.begin(), values.end());
  std::vector<double> distinct = values;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> out;
  if (distinct.size() < 2) return out;
  if (distinct.size() - 1 <= cap) {
    for (std::size_t i = 1; i < distinct.size(); ++i) out.push_back(0.5 * (distinct[i - 1] + distinct[i]));
    return out;
  }
  const std::size_t n = values.size();
  for (std::size_t i = 1; i <= cap; ++i) {
    const double v = values[i * n / (cap + 1)];
    const auto it = std::lower_bound(distinct.begin(), distinct.end(), v);
    if (it == distinct.begin()) continue;
    const double t = 0.5 * (*(it - 1) + *it);
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  return out;
}

struct Builder {
  const GbdtConfig& config;
  std::size_t n_features;
  const std::vector<std::vector<double>>& thresholds;
  const std::vector<std::uint16_t>& bins;  // feature-major: bins[f * n + r]
  std::size_t n;
  const std::vector<double>& grad;
  const std::vector<double>& hess;
  std::vector<double>& margin;
  Tree tree;

  double weight(double g, double h) const { return -g / (h + config.lambda); }
  double score(double g, double h) const { return g * g / (h + config.lambda); }

  int grow(std::vector<std::size_t>& rows, std::size_t depth) {
    double g = 0.0, h = 0.0;
    for (auto r : rows) {
      g += grad[r];
      h += hess[r];
    }
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});

    int best_feature = -1;
    std::size_t best_bin = 0;
    double best_gain = config.min_split_gain;
    if (depth < config.max_depth && h >= 2.0 * config.min_child_weight) {
      const double parent = score(g, h);
      std::vector<double> hg, hh;
      for (std::size_t f = 0; f < n_features; ++f) {
        const std::size_t nb = thresholds[f].size() + 1;
        if (nb < 2) continue;
        hg.assign(nb, 0.0);
        hh.assign(nb, 0.0);
        const std::uint16_t* fb = bins.data() + f * n;
        for (auto r : rows) {
          hg[fb[r]] += grad[r];
          hh[fb[r]] += hess[r];
        }
        double gl = 0.0, hl = 0.0;
        for (std::size_t b = 0; b + 1 < nb; ++b) {
          gl += hg[b];
          hl += hh[b];
          const double hr = h - hl;
          if (hl < config.min_child_weight || hr < config.min_child_weight) continue;
          const double gain = 0.5 * (score(gl, hl) + score(g - gl, hr) - parent);
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = static_cast<int>(f);
            best_bin = b;
          }
        }
      }
    }

    if (best_feature < 0) {
      const double w = weight(g, h);
      tree.nodes[static_cast<std::size_t>(id)].value = w;
      for (auto r : rows) margin[r] += config.learning_rate * w;
      return id;
    }
    const auto f = static_cast<std::size_t>(best_feature);
    const std::uint16_t* fb = bins.data() + f * n;
    std::vector<std::size_t> left, right;
    for (auto r : rows) (fb[r] <= best_bin ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = thresholds[f][best_bin];
    node.left = l;
    node.right = r;
    return id;
  }
};

}  // namespace

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::uint64_t GbdtConfig::fingerprint() const {
  std::uint64_t h = tag_hash("gbdt-config");
  auto feed = [&h](std::uint64_t v) { h = mix64(h ^ v); };
  feed(rounds);
  feed(max_depth);
  feed(std::bit_cast<std::uint64_t>(learning_rate));
  feed(std::bit_cast<std::uint64_t>(min_child_weight));
  feed(std::bit_cast<std::uint64_t>(lambda));
  feed(std::bit_cast<std::uint64_t>(min_split_gain));
  feed(max_thresholds);
  return h;
}

double Tree::leaf_value(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& node = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left : node.right);
  }
  return nodes[i].value;
}

GbdtModel::GbdtModel(GbdtConfig config, double base_score, std::size_t n_features, std::vector<Tree> trees)
    : config_(config), base_score_(base_score), n_features_(n_features), trees_(std::move(trees)) {
  for (const auto& t : trees_)
    for (const auto& node : t.nodes)
      if (node.feature >= static_cast<int>(n_features_)) throw ConfigError("tree splits on a feature out of range");
}

double GbdtModel::margin(std::span<const double> x, std::size_t n_trees) const {
  double m = base_score_;
  const std::size_t count = std::min(n_trees, trees_.size());
  for (std::size_t t = 0; t < count; ++t) m += config_.learning_rate * trees_[t].leaf_value(x);
  return m;
}

std::vector<double> GbdtModel::predict_proba(const FeatureMatrix& x, std::size_t n_trees) const {
  if (x.cols != n_features_)
    throw ConfigError("feature count " + std::to_string(x.cols) + " does not match model (" +
                      std::to_string(n_features_) + ")");
  std::vector<double> out(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r) out[r] = logistic(margin(x.row(r), n_trees));
  return out;
}

GbdtModel train_classifier(const FeatureMatrix& x, std::span<const int> y, const GbdtConfig& config) {
  const std::size_t n = x.rows;
  if (y.size() != n) throw ConfigError("label count does not match feature rows");
  if (config.max_thresholds == 0 || config.max_thresholds > 65534) throw ConfigError("max_thresholds out of range");
  const auto pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  if (pos == 0 || pos == n) throw DataError("classifier training data holds a single class");

  std::vector<std::vector<double>> thresholds(x.cols);
  std::vector<std::uint16_t> bins(x.cols * n);
  std::vector<double> column(n);
  for (std::size_t f = 0; f < x.cols; ++f) {
    for (std::size_t r = 0; r < n; ++r) column[r] = x.at(r, f);
    thresholds[f] = candidate_thresholds(column, config.max_thresholds);
    const auto& t = thresholds[f];
    for (std::size_t r = 0; r < n; ++r)
      bins[f * n + r] = static_cast<std::uint16_t>(std::upper_bound(t.begin(), t.end(), column[r]) - t.begin());
  }

  const double prior = static_cast<double>(pos) / static_cast<double>(n);
  const double base = std::log(prior / (1.0 - prior));
  std::vector<double> margin(n, base), grad(n), hess(n);
  std::vector<Tree> trees;
  std::vector<std::size_t> rows(n);
  for (std::size_t round = 0; round < config.rounds; ++round) {
    for (std::size_t r = 0; r < n; ++r) {
      const double p = logistic(margin[r]);
      grad[r] = p - static_cast<double>(y[r]);
      hess[r] = std::max(p * (1.0 - p), 1e-16);
    }
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    Builder b{config, x.cols, thresholds, bins, n, grad, hess, margin, Tree{}};
    b.grow(rows, 0);
    rows.resize(n);
    trees.push_back(std::move(b.tree));
  }
  return GbdtModel(config, base, x.cols, std::move(trees));
}

GbdtModel train_classifier(const Dataset& train, const GbdtConfig& config) {
  const auto labels = train.labels();
  return train_classifier(train.features(), labels, config);
}

double logistic_loss(const GbdtModel& model, const FeatureMatrix& x, std::span<const int> y, std::size_t n_trees) {
  double total = 0.0;
  for (std::size_t r = 0; r < x.rows; ++r) {
    const double m = model.margin(x.row(r), n_trees);
    // log(1 + e^m) - y m, evaluated stably.
    total += std::max(m, 0.0) + std::log1p(std::exp(-std::abs(m))) - static_cast<double>(y[r]) * m;
  }
  return total / static_cast<double>(x.rows);
}

}  // namespace goatmix
