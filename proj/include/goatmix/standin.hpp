#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "goatmix/dataset.hpp"

namespace goatmix {

/// Mixed-type census-style table: 4 continuous, 1 binary and 3 multiclass
/// features, label "income" with about 24% positives.
Dataset make_adult_like(std::size_t n, std::uint64_t seed);

/// All-continuous transaction-style table (V1..V10, amount) whose rare
/// positive class is shifted in a few coordinates. `positive_rate` is exact
/// up to rounding.
Dataset make_credit_like(std::size_t n, double positive_rate, std::uint64_t seed);

/// Resolves "builtin:<name>[:<rows>]" with name adult-like, credit-like
/// (0.18% positives) or credit-balanced-like (33.3% positives).
/// Throws ConfigError for an unknown name.
Dataset make_builtin(std::string_view spec, std::uint64_t seed);

bool is_builtin(std::string_view data);
std::vector<std::string> builtin_names();

}  // namespace goatmix
