#include "goatmix/cgoat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "goatmix/errors.hpp"
#include "goatmix/metrics.hpp"

namespace goatmix {

MixtureWeights MixtureWeights::from_raw(std::span<const double> raw) { return MixtureWeights{normalize_simplex(raw)}; }

void MixtureWeights::validate() const {
  if (alpha.empty()) throw ConfigError("mixture weights are empty");
  double sum = 0.0;
  for (double a : alpha) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("mixture weight outside [0, 1]");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("mixture weights do not sum to 1");
}

std::vector<MixtureWeights> warm_starts(std::span<const double> auc_val) {
  const std::size_t m = auc_val.size();
  if (m < 2) throw ConfigError("warm starts need at least two generators");
  for (double a : auc_val)
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("validation AUC outside [0, 1]");
  std::vector<MixtureWeights> out;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> e(m, 0.0);
    e[i] = 1.0;
    out.push_back(MixtureWeights{std::move(e)});
  }
  const double lo = *std::min_element(auc_val.begin(), auc_val.end());
  double total = 0.0;
  for (double a : auc_val) total += a - lo;
  std::vector<double> prop(m, 1.0 / static_cast<double>(m));
  if (total > 0.0)
    for (std::size_t i = 0; i < m; ++i) prop[i] = (auc_val[i] - lo) / total;
  out.push_back(MixtureWeights{std::move(prop)});
  return out;
}

std::vector<std::size_t> allocate_rows(std::span<const double> alpha, std::size_t n) {
  const std::size_t m = alpha.size();
  std::vector<long long> counts(m);
  std::vector<double> rem(m);
  long long total = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double exact = alpha[i] * static_cast<double>(n);
    counts[i] = std::llrint(exact);  // default rounding mode: half to even
    rem[i] = exact - static_cast<double>(counts[i]);
    total += counts[i];
  }
  const auto target = static_cast<long long>(n);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (total < target) {
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rem[a] > rem[b]; });
    for (std::size_t k = 0; total < target; ++k, ++total) ++counts[order[k % m]];
  } else if (total > target) {
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rem[a] < rem[b]; });
    for (std::size_t k = 0; total > target; ++k) {
      auto& c = counts[order[k % m]];
      if (c > 0) {
        --c;
        --total;
      }
    }
  }
  return std::vector<std::size_t>(counts.begin(), counts.end());
}

Dataset compose(const GeneratorSet& generators, std::span<const double> alpha, std::size_t n, std::uint64_t seed) {
  if (generators.empty() || generators.size() != alpha.size())
    throw ConfigError("one mixture weight per generator is required");
  const Schema& schema = generators.front()->schema();
  for (const auto& g : generators)
    if (g->schema() != schema) throw ConfigError("generators in a mixture must share one schema");
  const auto counts = allocate_rows(alpha, n);
  std::vector<Dataset> blocks;
  for (std::size_t m = 0; m < generators.size(); ++m)
    if (counts[m] > 0) blocks.push_back(generators[m]->sample(counts[m], derive_seed(seed, {m})));
  if (blocks.empty()) return Dataset(schema);
  return Dataset::concat(blocks);
}

void CgoatConfig::validate() const {
  if (max_iterations < 1) throw ConfigError("C-GOAT needs K >= 1");
  if (patience < 1) throw ConfigError("C-GOAT needs patience >= 1");
}

SearchSpace mixture_space(std::size_t n_generators) {
  return SearchSpace({ParamSpec::simplex(kAlphaParam, n_generators)});
}

CgoatResult run_cgoat(const CgoatConfig& cfg, const GeneratorSet& generators, const Partition& part) {
  cfg.validate();
  const std::size_t m = generators.size();
  if (m < 2) throw ConfigError("C-GOAT needs at least two generators");
  if (!cfg.individual_auc.empty() && cfg.individual_auc.size() != m)
    throw ConfigError("one individual AUC per generator is required");
  for (const auto& g : generators)
    if (!g || g->schema() != part.train.schema()) throw ConfigError("generator schema differs from the data schema");
  const std::size_t rows = cfg.rows ? cfg.rows : part.train.n_rows();

  const SearchSpace space = mixture_space(m);
  CgoatResult result{{}, {}, -0.5, TrialHistory(space, derive_seed(cfg.seed, "tpe"), cfg.tpe), {}, {}, {}, 0, false};
  auto& history = result.history;
  std::vector<double> trial_auc;

  auto to_point = [&](const std::vector<double>& raw) {
    Point p;
    for (std::size_t i = 0; i < m; ++i) p[simplex_coordinate(kAlphaParam, i)] = raw[i];
    return p;
  };
  auto run_trial = [&](const Point& point, TrialTag tag) {
    const auto alpha = space.simplex_weights(point, kAlphaParam);
    const std::uint64_t seed = derive_seed(cfg.seed, {history.size()});
    const Dataset synthetic = compose(generators, alpha, rows, seed);
    const EvalResult ev = evaluate_utility(synthetic, part.val, cfg.classifier);
    history.record(point, ev.loss, tag);
    result.outcomes.push_back(TrialOutcome{ev.degenerate, true});
    trial_auc.push_back(ev.auc);
  };

  for (std::size_t i = 0; i < m && history.size() < cfg.max_iterations; ++i) {
    std::vector<double> corner(m, 0.0);
    corner[i] = 1.0;
    run_trial(to_point(corner), TrialTag::warm_start);
  }
  result.individual_auc = cfg.individual_auc.empty() ? trial_auc : cfg.individual_auc;
  if (result.individual_auc.size() == m) {
    result.warm_starts = warm_starts(result.individual_auc);
    if (history.size() < cfg.max_iterations) run_trial(to_point(result.warm_starts.back().alpha), TrialTag::warm_start);
  }
  while (history.size() < cfg.max_iterations) {
    if (history.size() > cfg.tpe.n_startup && history.should_stop(cfg.patience)) break;
    run_trial(history.suggest(), TrialTag::suggested);
  }

  const std::size_t k = history.best_index();
  result.best_alpha = MixtureWeights{space.simplex_weights(history.trials()[k].point, kAlphaParam)};
  result.best_val_loss = history.trials()[k].loss;
  result.best_synthetic = compose(generators, result.best_alpha.alpha, rows,
                                  cfg.resample_final ? derive_seed(cfg.seed, "final") : derive_seed(cfg.seed, {k}));
  result.iterations_run = history.size();
  result.degenerate = std::all_of(result.outcomes.begin(), result.outcomes.end(),
                                  [](const TrialOutcome& o) { return o.degenerate; });
  return result;
}

}  // namespace goatmix
