#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "goatmix/random.hpp"

namespace goatmix {

using ParamValue = std::variant<double, std::int64_t, std::string>;
/// A point in a search space: parameter name -> value. Simplex parameters are
/// stored as their raw coordinates under "name[i]".
using Point = std::map<std::string, ParamValue>;
/// Synthesizer hyperparameters (theta) share the point representation.
using HyperParams = Point;

enum class ParamKind { uniform, log_uniform, integer, categorical, simplex };

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::uniform;
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;  // integer only
  std::vector<std::string> choices;
  std::size_t dim = 0;  // simplex only

  static ParamSpec uniform(std::string name, double lo, double hi);
  static ParamSpec log_uniform(std::string name, double lo, double hi);
  static ParamSpec integer(std::string name, std::int64_t lo, std::int64_t hi, bool log = false);
  static ParamSpec categorical(std::string name, std::vector<std::string> choices);
  /// dim independent uniform(0,1) coordinates normalized to sum to one on use.
  static ParamSpec simplex(std::string name, std::size_t dim);

  bool operator==(const ParamSpec&) const = default;
};

std::string simplex_coordinate(const std::string& name, std::size_t i);

class SearchSpace {
 public:
  SearchSpace() = default;
  explicit SearchSpace(std::vector<ParamSpec> params);

  const std::vector<ParamSpec>& params() const noexcept { return params_; }
  /// Parameters with every simplex replaced by its uniform(0,1) coordinates.
  const std::vector<ParamSpec>& expanded() const noexcept { return expanded_; }
  bool empty() const noexcept { return params_.empty(); }

  /// Throws ConfigError unless `p` assigns an in-domain value to every parameter and nothing else.
  void validate(const Point& p) const;
  bool contains(const Point& p) const;
  Point sample_prior(Rng& rng) const;
  /// Normalized weights of simplex parameter `name`.
  std::vector<double> simplex_weights(const Point& p, const std::string& name) const;

  bool operator==(const SearchSpace&) const = default;

 private:
  std::vector<ParamSpec> params_;
  std::vector<ParamSpec> expanded_;
};

/// alpha_m / sum_j alpha_j. An all-zero vector maps to uniform weights.
std::vector<double> normalize_simplex(std::span<const double> raw);

double as_double(const ParamValue& v);
std::int64_t as_int(const ParamValue& v);
const std::string& as_string(const ParamValue& v);

nlohmann::ordered_json point_to_json(const Point& p);
Point point_from_json(const nlohmann::ordered_json& j);
std::string to_string(const Point& p);

}  // namespace goatmix
