#pragma once

#include <map>
#include <span>

#include "goatmix/dataset.hpp"

namespace goatmix {

struct TTestResult {
  double t = 0.0;  // +-infinity when the differences are constant and nonzero
  double p = 0.5;  // one-sided, H1: mean(a - b) > 0
  std::size_t df = 0;
};

/// One-sided paired t-test on d = a - b. Throws ConfigError for a length
/// mismatch or fewer than two pairs.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_x - F_y|.
double ks_statistic(std::span<const double> x, std::span<const double> y);

struct ChiSquareResult {
  double chi2 = 0.0;
  double p = 1.0;
  std::size_t df = 0;
};

/// Chi-square goodness of fit of `y` against the category proportions of `x`.
/// Both samples hold category indices in [0, n_categories). Categories absent
/// from `x` are pooled into the positive-expected category with the smallest
/// expectation. Throws DataError for empty samples or zero degrees of freedom.
ChiSquareResult cs_statistic(std::span<const double> x, std::span<const double> y, std::size_t n_categories);

/// Fraction of rows per label class; both classes always appear.
std::map<int, double> class_share_report(const Dataset& d);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample sd (n - 1 divisor); 0 for a single value
};

MeanSd mean_sd(std::span<const double> v);

}  // namespace goatmix
