#include "goatmix/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "goatmix/errors.hpp"

namespace goatmix {

ParamSpec ParamSpec::uniform(std::string name, double lo, double hi) {
  if (!(lo < hi)) throw ConfigError("uniform '" + name + "': lo must be < hi");
  return {std::move(name), ParamKind::uniform, lo, hi, false, {}, 0};
}

ParamSpec ParamSpec::log_uniform(std::string name, double lo, double hi) {
  if (!(lo > 0.0 && lo < hi)) throw ConfigError("log_uniform '" + name + "': need 0 < lo < hi");
  return {std::move(name), ParamKind::log_uniform, lo, hi, false, {}, 0};
}

ParamSpec ParamSpec::integer(std::string name, std::int64_t lo, std::int64_t hi, bool log) {
  if (!(lo < hi)) throw ConfigError("integer '" + name + "': lo must be < hi");
  if (log && lo < 1) throw ConfigError("log integer '" + name + "': lo must be >= 1");
  return {std::move(name), ParamKind::integer, static_cast<double>(lo), static_cast<double>(hi), log, {}, 0};
}

ParamSpec ParamSpec::categorical(std::string name, std::vector<std::string> choices) {
  if (choices.empty()) throw ConfigError("categorical '" + name + "': choices must be nonempty");
  return {std::move(name), ParamKind::categorical, 0.0, 0.0, false, std::move(choices), 0};
}

ParamSpec ParamSpec::simplex(std::string name, std::size_t dim) {
  if (dim < 2) throw ConfigError("simplex '" + name + "': dim must be >= 2");
  return {std::move(name), ParamKind::simplex, 0.0, 1.0, false, {}, dim};
}

std::string simplex_coordinate(const std::string& name, std::size_t i) {
  return name + "[" + std::to_string(i) + "]";
}

SearchSpace::SearchSpace(std::vector<ParamSpec> params) : params_(std::move(params)) {
  std::set<std::string> names;
  for (const auto& p : params_) {
    if (p.kind == ParamKind::simplex) {
      for (std::size_t i = 0; i < p.dim; ++i) expanded_.push_back(ParamSpec::uniform(simplex_coordinate(p.name, i), 0.0, 1.0));
    } else {
      expanded_.push_back(p);
    }
  }
  for (const auto& p : expanded_)
    if (!names.insert(p.name).second) throw ConfigError("duplicate parameter name '" + p.name + "'");
}

void SearchSpace::validate(const Point& p) const {
  if (p.size() != expanded_.size())
    throw ConfigError("point has " + std::to_string(p.size()) + " entries, space expects " +
                      std::to_string(expanded_.size()));
  for (const auto& spec : expanded_) {
    auto it = p.find(spec.name);
    if (it == p.end()) throw ConfigError("point is missing parameter '" + spec.name + "'");
    const auto& v = it->second;
    switch (spec.kind) {
      case ParamKind::uniform:
      case ParamKind::log_uniform: {
        if (!std::holds_alternative<double>(v)) throw ConfigError("parameter '" + spec.name + "' must be real");
        const double x = std::get<double>(v);
        if (!(x >= spec.lo && x <= spec.hi)) throw ConfigError("parameter '" + spec.name + "' out of range");
        break;
      }
      case ParamKind::integer: {
        if (!std::holds_alternative<std::int64_t>(v)) throw ConfigError("parameter '" + spec.name + "' must be integer");
        const auto x = static_cast<double>(std::get<std::int64_t>(v));
        if (x < spec.lo || x > spec.hi) throw ConfigError("parameter '" + spec.name + "' out of range");
        break;
      }
      case ParamKind::categorical: {
        if (!std::holds_alternative<std::string>(v)) throw ConfigError("parameter '" + spec.name + "' must be a choice");
        const auto& s = std::get<std::string>(v);
        if (std::find(spec.choices.begin(), spec.choices.end(), s) == spec.choices.end())
          throw ConfigError("parameter '" + spec.name + "' has unknown choice '" + s + "'");
        break;
      }
      case ParamKind::simplex:
        break;  // never present after expansion
    }
  }
}

bool SearchSpace::contains(const Point& p) const {
  try {
    validate(p);
    return true;
  } catch (const ConfigError&) {
    return false;
  }
}

Point SearchSpace::sample_prior(Rng& rng) const {
  Point p;
  for (const auto& spec : expanded_) {
    switch (spec.kind) {
      case ParamKind::uniform:
        p[spec.name] = spec.lo + (spec.hi - spec.lo) * uniform01(rng);
        break;
      case ParamKind::log_uniform:
        p[spec.name] = std::clamp(std::exp(std::log(spec.lo) + (std::log(spec.hi) - std::log(spec.lo)) * uniform01(rng)),
                                  spec.lo, spec.hi);
        break;
      case ParamKind::integer: {
        std::int64_t x;
        if (spec.log) {
          const double a = std::log(spec.lo - 0.5), b = std::log(spec.hi + 0.5);
          x = static_cast<std::int64_t>(std::llround(std::exp(a + (b - a) * uniform01(rng))));
        } else {
          x = static_cast<std::int64_t>(spec.lo) +
              static_cast<std::int64_t>(uniform_index(rng, static_cast<std::size_t>(spec.hi - spec.lo) + 1));
        }
        p[spec.name] = std::clamp(x, static_cast<std::int64_t>(spec.lo), static_cast<std::int64_t>(spec.hi));
        break;
      }
      case ParamKind::categorical:
        p[spec.name] = spec.choices[uniform_index(rng, spec.choices.size())];
        break;
      case ParamKind::simplex:
        break;
    }
  }
  return p;
}

std::vector<double> SearchSpace::simplex_weights(const Point& p, const std::string& name) const {
  for (const auto& spec : params_) {
    if (spec.name != name || spec.kind != ParamKind::simplex) continue;
    std::vector<double> raw(spec.dim);
    for (std::size_t i = 0; i < spec.dim; ++i) raw[i] = as_double(p.at(simplex_coordinate(name, i)));
    return normalize_simplex(raw);
  }
  throw ConfigError("no simplex parameter named '" + name + "'");
}

std::vector<double> normalize_simplex(std::span<const double> raw) {
  std::vector<double> out(raw.begin(), raw.end());
  for (double v : out)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("simplex coordinates must be finite and non-negative");
  const double sum = std::accumulate(out.begin(), out.end(), 0.0);
  if (sum <= 0.0) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    return out;
  }
  for (double& v : out) v /= sum;
  return out;
}

double as_double(const ParamValue& v) {
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  if (std::holds_alternative<std::int64_t>(v)) return static_cast<double>(std::get<std::int64_t>(v));
  throw ConfigError("expected a numeric parameter value");
}

std::int64_t as_int(const ParamValue& v) {
  if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
  throw ConfigError("expected an integer parameter value");
}

const std::string& as_string(const ParamValue& v) {
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  throw ConfigError("expected a categorical parameter value");
}

nlohmann::ordered_json point_to_json(const Point& p) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : p) std::visit([&](const auto& x) { j[k] = x; }, v);
  return j;
}

Point point_from_json(const nlohmann::ordered_json& j) {
  Point p;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& v = it.value();
    if (v.is_number_integer()) {
      p[it.key()] = v.get<std::int64_t>();
    } else if (v.is_number()) {
      p[it.key()] = v.get<double>();
    } else if (v.is_string()) {
      p[it.key()] = v.get<std::string>();
    } else {
      throw ConfigError("unsupported value for parameter '" + it.key() + "'");
    }
  }
  return p;
}

std::string to_string(const Point& p) { return point_to_json(p).dump(); }

}  // namespace goatmix
