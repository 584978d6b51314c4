#include "goatmix/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "goatmix/errors.hpp"
#include "goatmix/random.hpp"

namespace goatmix {

Partition split(const Dataset& d, std::uint64_t seed, const SplitFractions& fractions) {
  constexpr int kMaxAttempts = 100;
  const double sum = fractions.train + fractions.val + fractions.test;
  if (std::abs(sum - 1.0) > 1e-9 || fractions.train <= 0 || fractions.val <= 0 || fractions.test <= 0)
    throw ConfigError("split fractions must be positive and sum to 1");
  const std::size_t n = d.n_rows();
  if (n < 10) throw DataError("dataset too small to split (need >= 10 rows, have " + std::to_string(n) + ")");
  const auto n_train = static_cast<std::size_t>(std::lround(fractions.train * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::lround(fractions.val * static_cast<double>(n)));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= n)
    throw DataError("dataset too small to place a row in every part");
  auto [neg, pos] = d.class_counts();
  if (neg == 0 || pos == 0) throw DataError("single-class dataset cannot be split with both classes in train");

  std::vector<std::size_t> perm(n);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(derive_seed(seed, "split", static_cast<std::uint64_t>(attempt)));
    std::shuffle(perm.begin(), perm.end(), rng);
    bool has[2] = {false, false};
    for (std::size_t i = 0; i < n_train; ++i) has[d.label(perm[i])] = true;
    if (!(has[0] && has[1])) continue;

    Partition p;
    p.seed = seed;
    p.train_rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    p.val_rows.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                      perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    p.test_rows.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), perm.end());
    p.train = d.select_rows(p.train_rows);
    p.val = d.select_rows(p.val_rows);
    p.test = d.select_rows(p.test_rows);
    return p;
  }
  throw DataError("could not draw a split with both classes in train after 100 attempts");
}

TargetEncoder::TargetEncoder(const Dataset& train, double smoothing) : source_schema_(train.schema()) {
  if (!(smoothing > 0.0) || !std::isfinite(smoothing)) throw ConfigError("target encoding smoothing must be positive");
  if (train.empty()) throw DataError("target encoder needs a non-empty training set");
  const auto& schema = train.schema();
  const std::size_t label = schema.label_index();
  const auto [neg, pos] = train.class_counts();
  global_mean_ = static_cast<double>(pos) / static_cast<double>(neg + pos);

  table_.resize(schema.size());
  std::vector<ColumnSchema> cols = schema.columns();
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (c == label || !cols[c].is_categorical()) continue;
    const std::size_t k = cols[c].categories.size();
    std::vector<double> count(k, 0.0), positives(k, 0.0);
    for (std::size_t r = 0; r < train.n_rows(); ++r) {
      auto cat = static_cast<std::size_t>(train.at(r, c));
      count[cat] += 1.0;
      positives[cat] += train.label(r);
    }
    auto& t = table_[c];
    t.resize(k);
    // n_c m_c is the positive count, so no division by n_c is needed.
    for (std::size_t j = 0; j < k; ++j) t[j] = (positives[j] + smoothing * global_mean_) / (count[j] + smoothing);
    cols[c].kind = ColumnKind::continuous;
    cols[c].categories.clear();
  }
  encoded_schema_ = Schema(std::move(cols), schema.label());
}

Dataset TargetEncoder::apply(const Dataset& d) const {
  if (!(d.schema() == source_schema_)) throw DataError("target encoder applied to a dataset with a different schema");
  std::vector<double> cells(d.cells().begin(), d.cells().end());
  const std::size_t cols = d.n_cols();
  for (std::size_t c = 0; c < cols; ++c) {
    if (table_[c].empty()) continue;
    for (std::size_t r = 0; r < d.n_rows(); ++r) {
      double& v = cells[r * cols + c];
      v = table_[c][static_cast<std::size_t>(v)];
    }
  }
  return Dataset(encoded_schema_, std::move(cells));
}

Dataset target_encode(const Dataset& train, const Dataset& apply_to, double smoothing) {
  return TargetEncoder(train, smoothing).apply(apply_to);
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b, std::size_t skip) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i == skip) continue;
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

}  // namespace

Dataset smote_balance(const Dataset& d, const SmoteOptions& options, std::uint64_t seed) {
  if (!(options.target_ratio > 0.0 && options.target_ratio <= 1.0))
    throw ConfigError("SMOTE target_ratio must lie in (0, 1]");
  if (options.k_neighbors == 0) throw ConfigError("SMOTE k_neighbors must be positive");
  if (d.schema().has_categorical_features())
    throw DataError("SMOTE requires continuous features; encode categorical columns first");
  const auto [neg, pos] = d.class_counts();
  if (neg == 0 || pos == 0) throw DataError("SMOTE requires both classes");
  const int minority_class = pos <= neg ? 1 : 0;
  std::vector<std::size_t> minority, majority;
  for (std::size_t r = 0; r < d.n_rows(); ++r) (d.label(r) == minority_class ? minority : majority).push_back(r);
  const std::size_t m = minority.size();
  const std::size_t big = majority.size();
  if (m < 2) throw DataError("SMOTE needs at least two minority rows");
  if (options.k_neighbors >= m) throw ConfigError("SMOTE k_neighbors must be smaller than the minority count");

  const double r = options.target_ratio;
  const double current = static_cast<double>(m) / static_cast<double>(big);
  std::size_t keep_majority = big;
  std::size_t want_minority = m;
  if (current < r) {
    const double factor = std::sqrt(r / current);
    keep_majority = std::min(big, static_cast<std::size_t>(std::lround(static_cast<double>(big) / factor)));
    want_minority = static_cast<std::size_t>(std::lround(r * static_cast<double>(keep_majority)));
    if (want_minority < m) {
      want_minority = m;
      keep_majority = std::min(big, static_cast<std::size_t>(std::lround(static_cast<double>(m) / r)));
    }
  } else {
    want_minority = static_cast<std::size_t>(std::lround(r * static_cast<double>(big)));
    want_minority = std::clamp<std::size_t>(want_minority, 1, m);
  }
  if (keep_majority == big && want_minority == m) return d;

  Rng rng(seed);
  auto subsample = [&rng](std::vector<std::size_t> rows, std::size_t keep) {
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(keep);
    std::sort(rows.begin(), rows.end());
    return rows;
  };
  std::vector<std::size_t> kept_minority = want_minority < m ? subsample(minority, want_minority) : minority;
  std::vector<std::size_t> kept_majority = subsample(majority, keep_majority);
  std::vector<std::size_t> kept;
  kept.reserve(kept_minority.size() + kept_majority.size());
  std::merge(kept_minority.begin(), kept_minority.end(), kept_majority.begin(), kept_majority.end(),
             std::back_inserter(kept));
  Dataset base = d.select_rows(kept);
  if (want_minority <= m) return base;

  // k nearest minority neighbours (Euclidean over the features, ties by index).
  const std::size_t label_col = d.schema().label_index();
  const std::size_t k = options.k_neighbors;
  std::vector<std::vector<std::size_t>> neighbours(m);
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < m; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) dist.emplace_back(squared_distance(d.row(minority[i]), d.row(minority[j]), label_col), j);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    for (std::size_t t = 0; t < k; ++t) neighbours[i].push_back(dist[t].second);
  }

  const std::size_t extra = want_minority - m;
  const std::size_t cols = d.n_cols();
  std::vector<double> cells(base.cells().begin(), base.cells().end());
  cells.reserve(cells.size() + extra * cols);
  for (std::size_t s = 0; s < extra; ++s) {
    const std::size_t i = s % m;
    const std::size_t nn = neighbours[i][uniform_index(rng, k)];
    const double u = uniform01(rng);
    auto x = d.row(minority[i]);
    auto y = d.row(minority[nn]);
    for (std::size_t c = 0; c < cols; ++c)
      cells.push_back(c == label_col ? static_cast<double>(minority_class) : x[c] + u * (y[c] - x[c]));
  }
  return Dataset(d.schema(), std::move(cells));
}

}  // namespace goatmix
