#include "goatmix/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "goatmix/errors.hpp"

namespace goatmix {

MeanSd mean_sd(std::span<const double> v) {
  MeanSd out;
  if (v.empty()) return out;
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() < 2) return out;
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return out;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("paired t-test needs samples of equal length");
  if (a.size() < 2) throw ConfigError("paired t-test needs at least two pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const auto [mean, sd] = mean_sd(d);
  TTestResult out;
  out.df = d.size() - 1;
  if (sd == 0.0) {
    if (mean == 0.0) return out;
    out.t = mean > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    out.p = mean > 0.0 ? 0.0 : 1.0;
    return out;
  }
  out.t = mean / (sd / std::sqrt(static_cast<double>(d.size())));
  const double nu = static_cast<double>(out.df);
  // P(T > |t|) = I_{nu / (nu + t^2)}(nu / 2, 1 / 2) / 2.
  const double tail = 0.5 * boost::math::ibeta(0.5 * nu, 0.5, nu / (nu + out.t * out.t));
  out.p = out.t >= 0.0 ? tail : 1.0 - tail;
  return out;
}

double ks_statistic(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw DataError("KS statistic needs two nonempty samples");
  std::vector<double> xs(x.begin(), x.end()), ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double nx = static_cast<double>(xs.size()), ny = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < xs.size() || j < ys.size()) {
    const double v = j == ys.size() || (i < xs.size() && xs[i] <= ys[j]) ? xs[i] : ys[j];
    while (i < xs.size() && xs[i] == v) ++i;
    while (j < ys.size() && ys[j] == v) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return best;
}

ChiSquareResult cs_statistic(std::span<const double> x, std::span<const double> y, std::size_t n_categories) {
  if (x.empty() || y.empty()) throw DataError("chi-square test needs two nonempty samples");
  std::vector<double> cx(n_categories, 0.0), cy(n_categories, 0.0);
  auto tally = [n_categories](std::span<const double> s, std::vector<double>& c) {
    for (double v : s) {
      if (!(v >= 0.0) || v >= static_cast<double>(n_categories)) throw DataError("category index out of range");
      c[static_cast<std::size_t>(v)] += 1.0;
    }
  };
  tally(x, cx);
  tally(y, cy);
  const double scale = static_cast<double>(y.size()) / static_cast<double>(x.size());
  std::vector<double> expected(n_categories), observed = cy;
  std::size_t sink = n_categories;
  for (std::size_t c = 0; c < n_categories; ++c) {
    expected[c] = cx[c] * scale;
    if (cx[c] > 0.0 && (sink == n_categories || cx[c] < cx[sink])) sink = c;
  }
  for (std::size_t c = 0; c < n_categories; ++c) {
    if (cx[c] == 0.0) {
      observed[sink] += observed[c];
      observed[c] = 0.0;
    }
  }
  ChiSquareResult out;
  std::size_t kept = 0;
  for (std::size_t c = 0; c < n_categories; ++c) {
    if (cx[c] == 0.0) continue;
    ++kept;
    out.chi2 += (observed[c] - expected[c]) * (observed[c] - expected[c]) / expected[c];
  }
  if (kept < 2) throw DataError("chi-square test has zero degrees of freedom");
  out.df = kept - 1;
  out.p = boost::math::gamma_q(0.5 * static_cast<double>(out.df), 0.5 * out.chi2);
  return out;
}

std::map<int, double> class_share_report(const Dataset& d) {
  if (d.empty()) throw DataError("class shares of an empty dataset are undefined");
  const auto [neg, pos] = d.class_counts();
  const double n = static_cast<double>(d.n_rows());
  return {{0, static_cast<double>(neg) / n}, {1, static_cast<double>(pos) / n}};
}

}  // namespace goatmix
