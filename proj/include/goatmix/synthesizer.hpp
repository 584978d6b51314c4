#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "goatmix/dataset.hpp"
#include "goatmix/io.hpp"
#include "goatmix/search_space.hpp"

namespace goatmix {

/// The synthesizer family M, in the fixed order used for mixture weights.
enum class Method { gaussian_copula, joint_mixture, histogram, kde_perturb };

inline constexpr std::array<Method, 4> kAllMethods = {Method::gaussian_copula, Method::joint_mixture,
                                                      Method::histogram, Method::kde_perturb};

std::string_view to_string(Method m);
/// Throws ConfigError for ids outside M (e.g. neural synthesizers).
Method parse_method(std::string_view id);

/// Anything that emits rows of a fixed schema. Implementations must be
/// deterministic in (n, seed) and safe to call concurrently.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual const Schema& schema() const = 0;
  virtual Dataset sample(std::size_t n, std::uint64_t seed) const = 0;
  virtual std::string name() const = 0;
};

/// Learned parameters of one synthesizer over all columns (label included).
class SynthModel {
 public:
  virtual ~SynthModel() = default;
  virtual Method method() const = 0;
  /// Appends n rows in schema order to `out`.
  virtual void sample_rows(std::size_t n, Rng& rng, std::vector<double>& out) const = 0;
  virtual Json to_json() const = 0;
  /// False when an internal EM hit its iteration cap.
  virtual bool converged() const { return true; }
};

struct FitOptions {
  /// Also fit one sub-model per label class so sample_conditional works.
  bool conditional = false;
};

/// Shares per label class, e.g. {{0, 0.9982}, {1, 0.0018}}.
using ClassShares = std::map<int, double>;

class FittedSynthesizer final : public Generator {
 public:
  FittedSynthesizer(Method method, Schema schema, HyperParams theta, std::uint64_t seed,
                    std::shared_ptr<const SynthModel> model,
                    std::map<int, std::shared_ptr<const SynthModel>> class_models = {});

  Method method() const noexcept { return method_; }
  const HyperParams& theta() const noexcept { return theta_; }
  std::uint64_t fit_seed() const noexcept { return seed_; }
  const Schema& schema() const override { return schema_; }
  std::string name() const override { return std::string(to_string(method_)); }

  const SynthModel& model() const { return *model_; }
  bool conditional() const noexcept { return !class_models_.empty(); }
  const SynthModel& class_model(int label) const;
  /// Warning flag: false when any EM fit stopped at its iteration cap.
  bool converged() const;

  Dataset sample(std::size_t n, std::uint64_t seed) const override;

  /// Exactly the largest-remainder allocation of n rows per class, each class
  /// drawn from its own sub-model. Rows are grouped by ascending class.
  Dataset sample_conditional(std::size_t n, const ClassShares& shares, std::uint64_t seed) const;

  /// Versioned JSON: method id, schema, theta, seed and learned parameters.
  Json to_json() const;
  static FittedSynthesizer from_json(const Json& j);

 private:
  Method method_;
  Schema schema_;
  HyperParams theta_;
  std::uint64_t seed_;
  std::shared_ptr<const SynthModel> model_;
  std::map<int, std::shared_ptr<const SynthModel>> class_models_;
};

/// Fits synthesizer `m` on `train`. Deterministic in (train, theta, seed).
/// Throws ConfigError for a theta outside search_space(m) and DataError for
/// fewer than two training rows. An empty theta is accepted for GaussianCopula.
/// With options.conditional, classes without training rows get no sub-model.
FittedSynthesizer fit(Method m, const Dataset& train, const HyperParams& theta, std::uint64_t seed,
                      const FitOptions& options = {});

/// Tunable hyperparameter domains. With `frozen`, GaussianCopula exposes no
/// hyperparameters at all (its marginal component cap stays at the default).
SearchSpace search_space(Method m, bool frozen = false);

/// Untuned configuration of each method.
HyperParams default_theta(Method m);

/// Largest-remainder (Hamilton) allocation of n rows: floors first, then the
/// remaining rows go to the largest fractional parts, lower class first on ties.
std::map<int, std::size_t> allocate_class_counts(const ClassShares& shares, std::size_t n);

}  // namespace goatmix
