#include "goatmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "goatmix/errors.hpp"

namespace goatmix {

double auc(std::span<const double> scores, std::span<const int> labels) {
  const std::size_t n = scores.size();
  if (labels.size() != n) throw ConfigError("score and label counts differ");
  std::uint64_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(scores[i])) throw ConfigError("NaN score");
    if (labels[i] != 0 && labels[i] != 1) throw ConfigError("labels must be 0 or 1");
    pos += static_cast<std::uint64_t>(labels[i]);
  }
  const std::uint64_t neg = n - pos;
  if (pos == 0 || neg == 0) throw DataError("AUC needs both classes");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  // Twice the rank sum of positives; a tie group over positions [i, j) has
  // average 1-based rank (i + 1 + j) / 2.
  std::uint64_t twice_rank_sum = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    std::uint64_t group_pos = 0;
    for (std::size_t k = i; k < j; ++k) group_pos += static_cast<std::uint64_t>(labels[order[k]]);
    twice_rank_sum += group_pos * (i + 1 + j);
    i = j;
  }
  const std::uint64_t numerator = twice_rank_sum - pos * (pos + 1);
  return static_cast<double>(numerator) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

EvalResult evaluate_utility(const Dataset& train, const Dataset& eval, const GbdtConfig& config) {
  EvalResult out;
  const auto [neg, pos] = eval.class_counts();
  out.n_pos = pos;
  out.n_neg = neg;
  if (pos == 0 || neg == 0) throw DataError("evaluation data must contain both classes");
  const auto [tneg, tpos] = train.class_counts();
  if (tneg == 0 || tpos == 0) {
    out.degenerate = true;
    return out;
  }
  const auto model = train_classifier(train, config);
  const auto scores = model.predict_proba(eval.features());
  out.auc = auc(scores, eval.labels());
  out.loss = -out.auc;
  return out;
}

}  // namespace goatmix
