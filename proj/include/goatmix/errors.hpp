#pragma once

#include <stdexcept>
#include <string>

namespace goatmix {

/// Invalid configuration, hyperparameters, or API misuse.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed, inconsistent, or unusable input data.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace goatmix
