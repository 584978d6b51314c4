#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "goatmix/search_space.hpp"

namespace goatmix {

/// Tree-structured Parzen Estimator constants.
struct TpeOptions {
  double gamma = 0.25;            // good-set quantile of the losses
  std::size_t n_startup = 10;     // prior samples before modelling
  std::size_t n_candidates = 24;  // draws from l(x) scored by l(x)/g(x)
};

enum class TrialTag { warm_start, suggested };

std::string_view to_string(TrialTag tag);

struct Trial {
  std::size_t iteration = 0;
  Point point;
  double loss = 0.0;
  TrialTag tag = TrialTag::suggested;
};

/// Append-only record of evaluated points over one search space. The optimizer
/// always minimizes; callers maximizing a score record its negation.
class TrialHistory {
 public:
  TrialHistory(SearchSpace space, std::uint64_t seed, TpeOptions options = {});

  const SearchSpace& space() const noexcept { return space_; }
  const std::vector<Trial>& trials() const noexcept { return trials_; }
  std::size_t size() const noexcept { return trials_.size(); }
  bool empty() const noexcept { return trials_.empty(); }
  std::uint64_t seed() const noexcept { return seed_; }
  const TpeOptions& options() const noexcept { return options_; }

  /// Appends a trial. Throws ConfigError for an invalid point or a non-finite loss.
  void record(Point point, double loss, TrialTag tag = TrialTag::suggested);

  /// Next point to evaluate: a prior draw while fewer than n_startup trials
  /// exist, otherwise the TPE candidate maximizing l(x)/g(x). Deterministic
  /// given the recorded trials and the seed.
  Point suggest() const;

  /// Minimal-loss trial, earliest on ties. Throws ConfigError when empty.
  const Trial& best() const;
  std::size_t best_index() const;

  /// True iff the running best has not strictly improved within the last `patience` trials.
  bool should_stop(std::size_t patience) const;

  /// One JSON object per line: iteration, tag, loss, point.
  std::string to_jsonl() const;

 private:
  SearchSpace space_;
  std::uint64_t seed_;
  TpeOptions options_;
  std::vector<Trial> trials_;
};

/// Reads a log written by TrialHistory::to_jsonl back into trials.
std::vector<Trial> parse_trial_log(const std::string& jsonl);

}  // namespace goatmix
