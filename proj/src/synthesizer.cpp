#include "goatmix/synthesizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "goatmix/errors.hpp"
#include "goatmix/models.hpp"

namespace goatmix {
namespace {

constexpr int kFormatVersion = 1;

std::shared_ptr<const SynthModel> fit_model(Method m, const Dataset& d, const HyperParams& theta, Rng& rng) {
  switch (m) {
    case Method::gaussian_copula: {
      const auto it = theta.find("max_components");
      const auto k = it == theta.end() ? 5 : as_int(it->second);
      return std::make_shared<GaussianCopulaModel>(GaussianCopulaModel::fit(d, static_cast<std::size_t>(k), rng));
    }
    case Method::joint_mixture:
      return std::make_shared<JointMixtureModel>(JointMixtureModel::fit(
          d, static_cast<std::size_t>(as_int(theta.at("n_components"))), as_double(theta.at("covariance_ridge")),
          std::stoul(as_string(theta.at("em_iterations"))), rng));
    case Method::histogram:
      return std::make_shared<HistogramModel>(HistogramModel::fit(d, static_cast<std::size_t>(as_int(theta.at("bins")))));
    case Method::kde_perturb:
      return std::make_shared<KdePerturbModel>(
          KdePerturbModel::fit(d, as_double(theta.at("bandwidth_scale")), as_double(theta.at("flip_probability"))));
  }
  throw ConfigError("unknown method");
}

std::shared_ptr<const SynthModel> model_from_json(Method m, const Json& j, const Schema& schema) {
  switch (m) {
    case Method::gaussian_copula:
      return std::make_shared<GaussianCopulaModel>(GaussianCopulaModel::from_json(j));
    case Method::joint_mixture:
      return std::make_shared<JointMixtureModel>(JointMixtureModel::from_json(j));
    case Method::histogram:
      return std::make_shared<HistogramModel>(HistogramModel::from_json(j));
    case Method::kde_perturb:
      return std::make_shared<KdePerturbModel>(KdePerturbModel::from_json(j, schema));
  }
  throw ConfigError("unknown method");
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::gaussian_copula: return "gaussian_copula";
    case Method::joint_mixture: return "joint_mixture";
    case Method::histogram: return "histogram";
    case Method::kde_perturb: return "kde_perturb";
  }
  return "unknown";
}

Method parse_method(std::string_view id) {
  for (auto m : kAllMethods)
    if (to_string(m) == id) return m;
  throw ConfigError("unknown synthesizer '" + std::string(id) + "'; expected one of gaussian_copula, joint_mixture, "
                    "histogram, kde_perturb");
}

SearchSpace search_space(Method m, bool frozen) {
  switch (m) {
    case Method::gaussian_copula:
      if (frozen) return SearchSpace{};
      return SearchSpace({ParamSpec::integer("max_components", 1, 5)});
    case Method::joint_mixture:
      return SearchSpace({ParamSpec::integer("n_components", 1, 30, true),
                          ParamSpec::log_uniform("covariance_ridge", 1e-6, 1e-1),
                          ParamSpec::categorical("em_iterations", {"50", "100", "200"})});
    case Method::histogram:
      return SearchSpace({ParamSpec::integer("bins", 5, 128, true)});
    case Method::kde_perturb:
      return SearchSpace({ParamSpec::log_uniform("bandwidth_scale", 0.01, 1.0),
                          ParamSpec::uniform("flip_probability", 0.0, 0.2)});
  }
  throw ConfigError("unknown method");
}

HyperParams default_theta(Method m) {
  switch (m) {
    case Method::gaussian_copula:
      return {{"max_components", std::int64_t{5}}};
    case Method::joint_mixture:
      return {{"n_components", std::int64_t{10}}, {"covariance_ridge", 1e-3}, {"em_iterations", std::string("100")}};
    case Method::histogram:
      return {{"bins", std::int64_t{32}}};
    case Method::kde_perturb:
      return {{"bandwidth_scale", 0.2}, {"flip_probability", 0.05}};
  }
  throw ConfigError("unknown method");
}

std::map<int, std::size_t> allocate_class_counts(const ClassShares& shares, std::size_t n) {
  double total = 0.0;
  for (const auto& [cls, share] : shares) {
    if (!(share >= 0.0)) throw ConfigError("class shares must be non-negative");
    total += share;
  }
  if (shares.empty() || std::abs(total - 1.0) > 1e-9) throw ConfigError("class shares must sum to 1");

  std::map<int, std::size_t> counts;
  std::vector<std::pair<int, double>> remainders;
  std::size_t assigned = 0;
  for (const auto& [cls, share] : shares) {
    const double exact = share * static_cast<double>(n);
    // Nudge so products like 0.9982 * 10000 = 9981.999... floor to the intended integer.
    const auto base = static_cast<std::size_t>(std::floor(exact + 1e-9));
    counts[cls] = base;
    assigned += base;
    remainders.emplace_back(cls, exact - static_cast<double>(base));
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[remainders[i % remainders.size()].first];
  return counts;
}

FittedSynthesizer::FittedSynthesizer(Method method, Schema schema, HyperParams theta, std::uint64_t seed,
                                     std::shared_ptr<const SynthModel> model,
                                     std::map<int, std::shared_ptr<const SynthModel>> class_models)
    : method_(method),
      schema_(std::move(schema)),
      theta_(std::move(theta)),
      seed_(seed),
      model_(std::move(model)),
      class_models_(std::move(class_models)) {
  if (!model_) throw ConfigError("fitted synthesizer needs a model");
}

const SynthModel& FittedSynthesizer::class_model(int label) const {
  const auto it = class_models_.find(label);
  if (it == class_models_.end()) throw ConfigError("no conditional model for class " + std::to_string(label));
  return *it->second;
}

bool FittedSynthesizer::converged() const {
  if (!model_->converged()) return false;
  return std::all_of(class_models_.begin(), class_models_.end(), [](const auto& kv) { return kv.second->converged(); });
}

Dataset FittedSynthesizer::sample(std::size_t n, std::uint64_t seed) const {
  Rng rng(derive_seed(seed, "sample"));
  std::vector<double> cells;
  cells.reserve(n * schema_.size());
  model_->sample_rows(n, rng, cells);
  return Dataset(schema_, std::move(cells));
}

Dataset FittedSynthesizer::sample_conditional(std::size_t n, const ClassShares& shares, std::uint64_t seed) const {
  if (!conditional()) throw ConfigError("sample_conditional requires a synthesizer fitted with conditional support");
  for (const auto& [cls, share] : shares) {
    if (cls != 0 && cls != 1) throw ConfigError("class shares refer to a label class outside {0, 1}");
    if (share > 0.0 && !class_models_.count(cls))
      throw DataError("class " + std::to_string(cls) + " was absent from the training data");
  }
  const auto counts = allocate_class_counts(shares, n);
  const std::size_t label = schema_.label_index();
  const std::size_t cols = schema_.size();
  std::vector<double> cells;
  cells.reserve(n * cols);
  for (const auto& [cls, count] : counts) {
    if (count == 0) continue;
    Rng rng(derive_seed(seed, "sample-class", static_cast<std::uint64_t>(cls)));
    const std::size_t start = cells.size();
    class_models_.at(cls)->sample_rows(count, rng, cells);
    for (std::size_t i = start + label; i < cells.size(); i += cols) cells[i] = static_cast<double>(cls);
  }
  return Dataset(schema_, std::move(cells));
}

Json FittedSynthesizer::to_json() const {
  Json classes = Json::object();
  for (const auto& [cls, model] : class_models_) classes[std::to_string(cls)] = model->to_json();
  return Json{{"format_version", kFormatVersion},
              {"method", std::string(to_string(method_))},
              {"schema", schema_to_json(schema_)},
              {"theta", point_to_json(theta_)},
              {"seed", seed_},
              {"model", model_->to_json()},
              {"class_models", std::move(classes)}};
}

FittedSynthesizer FittedSynthesizer::from_json(const Json& j) {
  if (j.at("format_version").get<int>() != kFormatVersion) throw ConfigError("unsupported synthesizer format version");
  const Method m = parse_method(j.at("method").get<std::string>());
  Schema schema = schema_from_json(j.at("schema"));
  std::map<int, std::shared_ptr<const SynthModel>> classes;
  for (const auto& [key, value] : j.at("class_models").items()) classes[std::stoi(key)] = model_from_json(m, value, schema);
  auto model = model_from_json(m, j.at("model"), schema);
  return FittedSynthesizer(m, schema, point_from_json(j.at("theta")), j.at("seed").get<std::uint64_t>(),
                           std::move(model), std::move(classes));
}

FittedSynthesizer fit(Method m, const Dataset& train, const HyperParams& theta, std::uint64_t seed,
                      const FitOptions& options) {
  if (!(m == Method::gaussian_copula && theta.empty())) search_space(m).validate(theta);
  if (train.n_rows() < 2) throw DataError("synthesizer fit needs at least two training rows");

  Rng rng(derive_seed(seed, "fit"));
  auto model = fit_model(m, train, theta, rng);
  std::map<int, std::shared_ptr<const SynthModel>> classes;
  if (options.conditional) {
    const auto labels = train.labels();
    for (int cls = 0; cls < 2; ++cls) {
      std::vector<std::size_t> rows;
      for (std::size_t r = 0; r < labels.size(); ++r)
        if (labels[r] == cls) rows.push_back(r);
      if (rows.empty()) continue;
      Rng class_rng(derive_seed(seed, "fit-class", static_cast<std::uint64_t>(cls)));
      classes[cls] = fit_model(m, train.select_rows(rows), theta, class_rng);
    }
  }
  return FittedSynthesizer(m, train.schema(), theta, seed, std::move(model), std::move(classes));
}

}  // namespace goatmix
