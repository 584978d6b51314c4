#include "goatmix/tpe.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <limits>
#include <numeric>
#include <sstream>

#include "goatmix/errors.hpp"

namespace goatmix {
namespace {

constexpr double kLogFloor = -700.0;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double log_sum_exp(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return kLogFloor;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

/// Adaptive Parzen estimator over [lo, hi]: one Gaussian per observation plus
/// a broad prior component, bandwidths from neighbour spacing, truncated to the bounds.
class ParzenEstimator {
 public:
  ParzenEstimator(std::vector<double> obs, double lo, double hi) : lo_(lo), hi_(hi) {
    const double prior_mu = 0.5 * (lo + hi);
    const double prior_sigma = hi - lo;
    std::vector<std::pair<double, bool>> pts;
    for (double x : obs) pts.emplace_back(x, false);
    pts.emplace_back(prior_mu, true);
    std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    const std::size_t k = pts.size();
    const double min_sigma = prior_sigma / std::min(100.0, 1.0 + static_cast<double>(obs.size()));
    for (std::size_t i = 0; i < k; ++i) {
      double s;
      if (k == 1) {
        s = prior_sigma;
      } else if (i == 0) {
        s = pts[1].first - pts[0].first;
      } else if (i + 1 == k) {
        s = pts[i].first - pts[i - 1].first;
      } else {
        s = std::max(pts[i].first - pts[i - 1].first, pts[i + 1].first - pts[i].first);
      }
      s = pts[i].second ? prior_sigma : std::clamp(s, min_sigma, prior_sigma);
      mu_.push_back(pts[i].first);
      sigma_.push_back(s);
    }
    weight_.assign(k, 1.0 / static_cast<double>(k));
    accept_ = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      accept_ += weight_[i] * (normal_cdf((hi_ - mu_[i]) / sigma_[i]) - normal_cdf((lo_ - mu_[i]) / sigma_[i]));
  }

  double log_pdf(double x) const {
    std::vector<double> terms(mu_.size());
    for (std::size_t i = 0; i < mu_.size(); ++i) {
      const double z = (x - mu_[i]) / sigma_[i];
      terms[i] = std::log(weight_[i]) - 0.5 * z * z - std::log(sigma_[i] * std::sqrt(2.0 * M_PI));
    }
    return log_sum_exp(terms) - std::log(accept_);
  }

  double log_mass(double a, double b) const {
    a = std::max(a, lo_);
    b = std::min(b, hi_);
    double m = 0.0;
    for (std::size_t i = 0; i < mu_.size(); ++i)
      m += weight_[i] * (normal_cdf((b - mu_[i]) / sigma_[i]) - normal_cdf((a - mu_[i]) / sigma_[i]));
    return m > 0.0 ? std::log(m / accept_) : kLogFloor;
  }

  double sample(Rng& rng) const {
    std::discrete_distribution<std::size_t> pick(weight_.begin(), weight_.end());
    for (int attempt = 0; attempt < 100; ++attempt) {
      const std::size_t i = pick(rng);
      const double x = mu_[i] + sigma_[i] * standard_normal(rng);
      if (x >= lo_ && x <= hi_) return x;
    }
    return std::clamp(mu_[pick(rng)], lo_, hi_);
  }

 private:
  double lo_, hi_;
  std::vector<double> mu_, sigma_, weight_;
  double accept_ = 1.0;
};

/// Internal coordinate system of a numeric parameter: log space for log
/// domains, a half-unit widening for integers.
struct NumericAxis {
  double lo, hi;
  bool log;
  bool integer;

  static NumericAxis of(const ParamSpec& s) {
    const bool is_int = s.kind == ParamKind::integer;
    const bool is_log = s.kind == ParamKind::log_uniform || (is_int && s.log);
    double a = is_int ? s.lo - 0.5 : s.lo;
    double b = is_int ? s.hi + 0.5 : s.hi;
    if (is_log) {
      a = std::log(a);
      b = std::log(b);
    }
    return {a, b, is_log, is_int};
  }
  double to_internal(double v) const { return log ? std::log(v) : v; }
};

struct ParamModel {
  const ParamSpec* spec;
  // numeric
  std::optional<NumericAxis> axis;
  std::optional<ParzenEstimator> good, bad;
  // categorical
  std::vector<double> good_p, bad_p;

  ParamValue sample(Rng& rng) const {
    if (spec->kind == ParamKind::categorical) {
      std::discrete_distribution<std::size_t> pick(good_p.begin(), good_p.end());
      return spec->choices[pick(rng)];
    }
    double x = good->sample(rng);
    if (axis->log) x = std::exp(x);
    if (axis->integer)
      return static_cast<std::int64_t>(
          std::clamp(std::llround(x), static_cast<long long>(spec->lo), static_cast<long long>(spec->hi)));
    return std::clamp(x, spec->lo, spec->hi);
  }

  double log_ratio(const ParamValue& v) const {
    if (spec->kind == ParamKind::categorical) {
      const auto it = std::find(spec->choices.begin(), spec->choices.end(), std::get<std::string>(v));
      const auto j = static_cast<std::size_t>(it - spec->choices.begin());
      return std::log(good_p[j]) - std::log(bad_p[j]);
    }
    if (axis->integer) {
      const double x = static_cast<double>(std::get<std::int64_t>(v));
      double a = x - 0.5, b = x + 0.5;
      if (axis->log) {
        a = std::log(a);
        b = std::log(b);
      }
      return good->log_mass(a, b) - bad->log_mass(a, b);
    }
    const double x = axis->to_internal(std::get<double>(v));
    return good->log_pdf(x) - bad->log_pdf(x);
  }
};

}  // namespace

std::string_view to_string(TrialTag tag) { return tag == TrialTag::warm_start ? "warm_start" : "suggested"; }

TrialHistory::TrialHistory(SearchSpace space, std::uint64_t seed, TpeOptions options)
    : space_(std::move(space)), seed_(seed), options_(options) {
  if (!(options_.gamma > 0.0 && options_.gamma < 1.0)) throw ConfigError("TPE gamma must lie in (0, 1)");
  if (options_.n_candidates == 0) throw ConfigError("TPE needs at least one candidate");
}

void TrialHistory::record(Point point, double loss, TrialTag tag) {
  if (!std::isfinite(loss)) throw ConfigError("trial loss must be finite");
  space_.validate(point);
  trials_.push_back(Trial{trials_.size(), std::move(point), loss, tag});
}

Point TrialHistory::suggest() const {
  Rng rng(derive_seed(seed_, "suggest", trials_.size()));
  if (trials_.size() < options_.n_startup || space_.empty()) return space_.sample_prior(rng);

  std::vector<std::size_t> order(trials_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return trials_[a].loss < trials_[b].loss; });
  const auto n_good = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(options_.gamma * static_cast<double>(trials_.size()))));
  const std::span<const std::size_t> good_idx(order.data(), n_good);
  const std::span<const std::size_t> bad_idx(order.data() + n_good, order.size() - n_good);

  std::vector<ParamModel> models;
  for (const auto& spec : space_.expanded()) {
    ParamModel m{&spec, std::nullopt, std::nullopt, std::nullopt, {}, {}};
    if (spec.kind == ParamKind::categorical) {
      const std::size_t k = spec.choices.size();
      auto probs = [&](std::span<const std::size_t> idx) {
        std::vector<double> count(k, 1.0);  // add-one smoothing
        for (auto t : idx) {
          const auto& s = std::get<std::string>(trials_[t].point.at(spec.name));
          count[static_cast<std::size_t>(std::find(spec.choices.begin(), spec.choices.end(), s) -
                                         spec.choices.begin())] += 1.0;
        }
        const double total = std::accumulate(count.begin(), count.end(), 0.0);
        for (double& c : count) c /= total;
        return count;
      };
      m.good_p = probs(good_idx);
      m.bad_p = probs(bad_idx);
    } else {
      const auto axis = NumericAxis::of(spec);
      auto observations = [&](std::span<const std::size_t> idx) {
        std::vector<double> xs;
        for (auto t : idx) xs.push_back(axis.to_internal(as_double(trials_[t].point.at(spec.name))));
        return xs;
      };
      m.axis = axis;
      m.good.emplace(observations(good_idx), axis.lo, axis.hi);
      m.bad.emplace(observations(bad_idx), axis.lo, axis.hi);
    }
    models.push_back(std::move(m));
  }

  Point best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < options_.n_candidates; ++c) {
    Point candidate;
    double score = 0.0;
    for (const auto& m : models) {
      auto v = m.sample(rng);
      score += m.log_ratio(v);
      candidate[m.spec->name] = std::move(v);
    }
    if (c == 0 || score > best_score) {
      best_score = score;
      best = std::move(candidate);
    }
  }
  return best;
}

std::size_t TrialHistory::best_index() const {
  if (trials_.empty()) throw ConfigError("best() of an empty trial history");
  std::size_t b = 0;
  for (std::size_t i = 1; i < trials_.size(); ++i)
    if (trials_[i].loss < trials_[b].loss) b = i;
  return b;
}

const Trial& TrialHistory::best() const { return trials_[best_index()]; }

bool TrialHistory::should_stop(std::size_t patience) const {
  if (patience == 0) throw ConfigError("patience must be >= 1");
  if (trials_.empty()) return false;
  return trials_.size() - 1 - best_index() >= patience;
}

std::string TrialHistory::to_jsonl() const {
  std::string out;
  for (const auto& t : trials_) {
    nlohmann::ordered_json j;
    j["iteration"] = t.iteration;
    j["tag"] = std::string(to_string(t.tag));
    j["loss"] = t.loss;
    j["point"] = point_to_json(t.point);
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<Trial> parse_trial_log(const std::string& jsonl) {
  std::vector<Trial> out;
  std::istringstream in(jsonl);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::ordered_json::parse(line);
    Trial t;
    t.iteration = j.at("iteration").get<std::size_t>();
    t.tag = j.at("tag").get<std::string>() == "warm_start" ? TrialTag::warm_start : TrialTag::suggested;
    t.loss = j.at("loss").get<double>();
    t.point = point_from_json(j.at("point"));
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace goatmix
