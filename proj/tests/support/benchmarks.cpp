#include "benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "goatmix/random.hpp"
#include "goatmix/stats.hpp"

namespace goatmix::testing {
namespace {

Schema continuous_schema(std::size_t features) {
  std::vector<ColumnSchema> cols;
  for (std::size_t i = 0; i < features; ++i) cols.push_back({"x" + std::to_string(i), ColumnKind::continuous, {}});
  cols.push_back({"y", ColumnKind::binary, {"0", "1"}});
  return Schema(std::move(cols), "y");
}

Dataset relabel(const Dataset& d, const std::function<int(std::size_t)>& label) {
  std::vector<double> cells(d.cells().begin(), d.cells().end());
  const std::size_t cols = d.n_cols(), li = d.schema().label_index();
  for (std::size_t r = 0; r < d.n_rows(); ++r) cells[r * cols + li] = label(r);
  return Dataset(d.schema(), std::move(cells));
}

std::shared_ptr<const Generator> fitted(Method m, const Dataset& train, const HyperParams& theta, std::uint64_t seed) {
  return std::make_shared<FittedSynthesizer>(fit(m, train, theta, seed));
}

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

LabelNoiseGenerator::LabelNoiseGenerator(std::shared_ptr<const Generator> inner, double rate)
    : inner_(std::move(inner)), rate_(rate) {}

Dataset LabelNoiseGenerator::sample(std::size_t n, std::uint64_t seed) const {
  Rng rng(derive_seed(seed, "label-noise"));
  return relabel(inner_->sample(n, seed), [&](std::size_t) { return uniform01(rng) < rate_ ? 1 : 0; });
}

CollapsedGenerator::CollapsedGenerator(std::shared_ptr<const Generator> inner, int label)
    : inner_(std::move(inner)), label_(label) {}

Dataset CollapsedGenerator::sample(std::size_t n, std::uint64_t seed) const {
  return relabel(inner_->sample(n, seed), [&](std::size_t) { return label_; });
}

Dataset make_linear_data(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> cells;
  for (std::size_t r = 0; r < n; ++r) {
    double x[4];
    for (double& v : x) v = standard_normal(rng);
    const int y = x[0] + x[1] + 0.5 * standard_normal(rng) > 0.0 ? 1 : 0;
    cells.insert(cells.end(), {x[0], x[1], x[2], x[3], static_cast<double>(y)});
  }
  return Dataset(continuous_schema(4), std::move(cells));
}

Dataset make_two_halves_data(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> cells;
  for (std::size_t r = 0; r < n; ++r) {
    const bool half_b = r % 2 == 1;
    const double x0 = (half_b ? 2.0 : 0.0) + uniform01(rng);
    const double x1 = standard_normal(rng), x2 = standard_normal(rng);
    const double signal = half_b ? x2 : x1;
    const int y = signal + 0.3 * standard_normal(rng) > 0.0 ? 1 : 0;
    cells.insert(cells.end(), {x0, x1, x2, static_cast<double>(y)});
  }
  return Dataset(continuous_schema(3), std::move(cells));
}

Dataset make_piecewise_data(std::size_t n, double high, std::size_t features, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> cells;
  for (std::size_t r = 0; r < n; ++r) {
    const int y = uniform01(rng) < 0.5 ? 1 : 0;
    for (std::size_t f = 0; f < features; ++f) {
      double x;
      if (r < 2) {
        x = static_cast<double>(r);
      } else {
        // Pieces 0, 2, 4, ... carry mass `high` under y = 1 and 1 - high under y = 0.
        const bool even = uniform01(rng) < (y == 1 ? high : 1.0 - high);
        const auto piece = 2 * static_cast<std::size_t>(uniform01(rng) * 5.0) + (even ? 0 : 1);
        x = (static_cast<double>(std::min<std::size_t>(piece, 9)) + uniform01(rng)) / 10.0;
      }
      cells.push_back(x);
    }
    cells.push_back(y);
  }
  return Dataset(continuous_schema(features), std::move(cells));
}

Dataset make_xor_data(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> cells;
  for (std::size_t r = 0; r < n; ++r) {
    const int a = uniform01(rng) < 0.5, b = uniform01(rng) < 0.5;
    int y = a ^ b;
    if (uniform01(rng) < 0.05) y = 1 - y;
    cells.insert(cells.end(), {a + 0.4 * uniform01(rng), b + 0.4 * uniform01(rng), static_cast<double>(y)});
  }
  return Dataset(continuous_schema(2), std::move(cells));
}

MixtureBenchmark dominance_benchmark(std::uint64_t seed, std::size_t n) {
  MixtureBenchmark b{split(make_linear_data(n, derive_seed(seed, "data")), derive_seed(seed, "split")), {}};
  const auto& train = b.part.train;
  const double rate = class_share_report(train).at(1);
  const Method noisy[] = {Method::gaussian_copula, Method::joint_mixture, Method::histogram};
  for (std::size_t i = 0; i < 3; ++i)
    b.generators.push_back(std::make_shared<LabelNoiseGenerator>(
        fitted(noisy[i], train, default_theta(noisy[i]), derive_seed(seed, "fit", i)), rate));
  b.generators.push_back(fitted(Method::kde_perturb, train, {{"bandwidth_scale", 0.05}, {"flip_probability", 0.0}},
                                derive_seed(seed, "fit", 3)));
  return b;
}

MixtureBenchmark two_halves_benchmark(std::uint64_t seed, std::size_t n) {
  MixtureBenchmark b{split(make_two_halves_data(n, derive_seed(seed, "data")), derive_seed(seed, "split")), {}};
  const auto& train = b.part.train;
  std::vector<std::size_t> a_rows, b_rows;
  for (std::size_t r = 0; r < train.n_rows(); ++r) (train.at(r, 0) < 1.5 ? a_rows : b_rows).push_back(r);
  const HyperParams copy{{"bandwidth_scale", 0.05}, {"flip_probability", 0.0}};
  b.generators.push_back(fitted(Method::kde_perturb, train.select_rows(a_rows), copy, derive_seed(seed, "fit", 0)));
  b.generators.push_back(fitted(Method::kde_perturb, train.select_rows(b_rows), copy, derive_seed(seed, "fit", 1)));
  b.generators.push_back(
      fitted(Method::histogram, train, default_theta(Method::histogram), derive_seed(seed, "fit", 2)));
  b.generators.push_back(
      fitted(Method::gaussian_copula, train, default_theta(Method::gaussian_copula), derive_seed(seed, "fit", 3)));
  return b;
}

PairedBest abs7_search(std::uint64_t seed, std::size_t budget) {
  const SearchSpace space({ParamSpec::uniform("x", 0.0, 10.0)});
  auto loss = [](const Point& p) { return std::abs(as_double(p.at("x")) - 7.0); };
  TrialHistory h(space, derive_seed(seed, "tpe"));
  for (std::size_t k = 0; k < budget; ++k) {
    Point p = h.suggest();
    const double l = loss(p);
    h.record(std::move(p), l);
  }
  Rng rng(derive_seed(seed, "random"));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < budget; ++k) best = std::min(best, loss(space.sample_prior(rng)));
  return {h.best().loss, best};
}

double auc_pairs(std::span<const double> scores, std::span<const int> labels) {
  std::uint64_t twice = 0, pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      twice += scores[i] > scores[j] ? 2 : scores[i] == scores[j] ? 1 : 0;
    }
  }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(pairs));
}

double ks_brute(std::span<const double> x, std::span<const double> y) {
  auto ecdf = [](std::span<const double> s, double v) {
    return static_cast<double>(std::count_if(s.begin(), s.end(), [v](double e) { return e <= v; })) /
           static_cast<double>(s.size());
  };
  double best = 0.0;
  for (auto s : {x, y})
    for (double v : s) best = std::max(best, std::abs(ecdf(x, v) - ecdf(y, v)));
  return best;
}

double t_upper_tail_quadrature(double t, double df) {
  const double log_c = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) - 0.5 * std::log(df * M_PI);
  auto density = [&](double x) { return std::exp(log_c - 0.5 * (df + 1.0) * std::log1p(x * x / df)); };
  const double a = std::abs(t);
  const double fa = density(0.0), fb = density(a), fm = density(0.5 * a);
  const double whole = a / 6.0 * (fa + 4.0 * fm + fb);
  const double central = a == 0.0 ? 0.0 : simpson(density, 0.0, a, fa, fm, fb, whole, 1e-14, 60);
  return t >= 0.0 ? 0.5 - central : 0.5 + central;
}

}  // namespace goatmix::testing
