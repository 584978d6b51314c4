#include "goatmix/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "goatmix/errors.hpp"

namespace goatmix {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// k-means++ seeding over scalar or vector rows; returns chosen row indices.
template <typename Dist2>
std::vector<std::size_t> kmeanspp(std::size_t n, std::size_t k, Dist2 dist2, Rng& rng) {
  std::vector<std::size_t> centers{uniform_index(rng, n)};
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    const std::size_t last = centers.back();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], dist2(i, last));
      total += d2[i];
    }
    if (total <= 0.0) break;
    double target = uniform01(rng) * total;
    std::size_t pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      target -= d2[i];
      if (target < 0.0) {
        pick = i;
        break;
      }
    }
    centers.push_back(pick);
  }
  return centers;
}

}  // namespace

double Gmm1d::cdf(double x) const {
  double c = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (variances[i] <= 0.0) {
      c += x >= means[i] ? weights[i] : 0.0;
    } else {
      c += weights[i] * normal_cdf((x - means[i]) / std::sqrt(variances[i]));
    }
  }
  return c;
}

double Gmm1d::quantile(double u) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double s = std::sqrt(std::max(variances[i], 0.0));
    lo = std::min(lo, means[i] - 40.0 * s);
    hi = std::max(hi, means[i] + 40.0 * s);
  }
  if (!(hi > lo)) return lo;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double Gmm1d::sample(Rng& rng) const {
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  const std::size_t i = pick(rng);
  return means[i] + std::sqrt(std::max(variances[i], 0.0)) * standard_normal(rng);
}

double Gmm1d::bic(std::size_t n) const {
  const double params = 3.0 * static_cast<double>(components()) - 1.0;
  return -2.0 * log_likelihood + params * std::log(static_cast<double>(n));
}

Gmm1d fit_gmm_1d(std::span<const double> x, std::size_t k, const EmOptions& options, Rng& rng) {
  const std::size_t n = x.size();
  if (n == 0) throw DataError("cannot fit a mixture to an empty sample");
  if (k == 0) throw ConfigError("mixture needs at least one component");
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  if (*mn == *mx) return Gmm1d{{1.0}, {*mn}, {0.0}, 0.0, true};

  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double floor = std::max(1e-6 * var, 1e-300);

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const auto distinct = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
  k = std::min(k, distinct);

  auto centers = kmeanspp(n, k, [&](std::size_t i, std::size_t j) { return (x[i] - x[j]) * (x[i] - x[j]); }, rng);
  k = centers.size();
  Gmm1d g;
  g.weights.assign(k, 1.0 / static_cast<double>(k));
  g.variances.assign(k, var);
  for (auto c : centers) g.means.push_back(x[c]);

  std::vector<double> resp(n * k);
  std::vector<double> logp(k);
  double prev = -std::numeric_limits<double>::infinity();
  Gmm1d best = g;
  best.log_likelihood = prev;
  g.converged = false;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        const double d = x[i] - g.means[j];
        logp[j] = std::log(g.weights[j]) - 0.5 * (kLog2Pi + std::log(g.variances[j]) + d * d / g.variances[j]);
        m = std::max(m, logp[j]);
      }
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += std::exp(logp[j] - m);
      const double lse = m + std::log(s);
      ll += lse;
      for (std::size_t j = 0; j < k; ++j) resp[i * k + j] = std::exp(logp[j] - lse);
    }
    g.log_likelihood = ll;
    if (ll > best.log_likelihood) best = g;
    const double mean_ll = ll / static_cast<double>(n);
    if (std::abs(mean_ll - prev) < options.tolerance) {
      best.converged = true;
      return best;
    }
    prev = mean_ll;

    for (std::size_t j = 0; j < k; ++j) {
      double nk = 0.0, sx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nk += resp[i * k + j];
        sx += resp[i * k + j] * x[i];
      }
      if (nk < 1e-10) {
        g.weights[j] = 1e-10;
        continue;
      }
      const double mu = sx / nk;
      double sv = 0.0;
      for (std::size_t i = 0; i < n; ++i) sv += resp[i * k + j] * (x[i] - mu) * (x[i] - mu);
      g.weights[j] = nk / static_cast<double>(n);
      g.means[j] = mu;
      g.variances[j] = std::max(sv / nk, floor);
    }
    const double wsum = std::accumulate(g.weights.begin(), g.weights.end(), 0.0);
    for (double& w : g.weights) w /= wsum;
  }
  best.converged = false;
  return best;
}

Gmm1d select_gmm_1d(std::span<const double> x, std::size_t max_k, const EmOptions& options, Rng& rng) {
  if (max_k == 0) throw ConfigError("mixture needs at least one component");
  Gmm1d best = fit_gmm_1d(x, 1, options, rng);
  if (best.variances.front() == 0.0) return best;
  double best_bic = best.bic(x.size());
  for (std::size_t k = 2; k <= max_k; ++k) {
    Gmm1d g = fit_gmm_1d(x, k, options, rng);
    if (g.components() < k) break;  // fewer distinct values than k
    const double b = g.bic(x.size());
    if (b < best_bic) {
      best_bic = b;
      best = std::move(g);
    }
  }
  return best;
}

std::vector<Eigen::MatrixXd> GmmFull::cholesky_factors() const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(covariances.size());
  for (const auto& c : covariances) out.emplace_back(c.llt().matrixL());
  return out;
}

GmmFull fit_gmm_full(const Eigen::MatrixXd& x, std::size_t k, double ridge, const EmOptions& options, Rng& rng) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto d = x.cols();
  if (n == 0) throw DataError("cannot fit a mixture to an empty sample");
  if (k == 0) throw ConfigError("mixture needs at least one component");
  if (!(ridge > 0.0)) throw ConfigError("covariance ridge must be positive");
  k = std::min(k, n);

  const Eigen::VectorXd global_mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - global_mean.transpose();
  Eigen::MatrixXd global_cov = centered.transpose() * centered / static_cast<double>(n);
  global_cov.diagonal().array() += ridge;

  auto centers = kmeanspp(n, k, [&](std::size_t i, std::size_t j) { return (x.row(i) - x.row(j)).squaredNorm(); }, rng);
  k = centers.size();
  GmmFull g;
  g.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(k), 1.0 / static_cast<double>(k));
  for (auto c : centers) {
    g.means.emplace_back(x.row(static_cast<Eigen::Index>(c)).transpose());
    g.covariances.push_back(global_cov);
  }

  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd logp(static_cast<Eigen::Index>(n), kk);
  double prev = -std::numeric_limits<double>::infinity();
  GmmFull best = g;
  best.log_likelihood = prev;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    for (Eigen::Index j = 0; j < kk; ++j) {
      Eigen::LLT<Eigen::MatrixXd> llt(g.covariances[static_cast<std::size_t>(j)]);
      if (llt.info() != Eigen::Success) {
        g.covariances[static_cast<std::size_t>(j)] = global_cov;
        llt.compute(global_cov);
      }
      const Eigen::MatrixXd diff = (x.rowwise() - g.means[static_cast<std::size_t>(j)].transpose()).transpose();
      const Eigen::MatrixXd y = llt.matrixL().solve(diff);
      const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
      logp.col(j) = (-0.5 * (static_cast<double>(d) * kLog2Pi + logdet + y.colwise().squaredNorm().array())).matrix();
      logp.col(j).array() += std::log(g.weights(j));
    }
    const Eigen::VectorXd row_max = logp.rowwise().maxCoeff();
    const Eigen::VectorXd lse =
        row_max.array() + (logp.colwise() - row_max).array().exp().rowwise().sum().log();
    const double ll = lse.sum();
    g.log_likelihood = ll;
    if (ll > best.log_likelihood) best = g;
    const double mean_ll = ll / static_cast<double>(n);
    if (std::abs(mean_ll - prev) < options.tolerance) {
      best.converged = true;
      return best;
    }
    prev = mean_ll;

    const Eigen::MatrixXd resp = (logp.colwise() - lse).array().exp().matrix();
    for (Eigen::Index j = 0; j < kk; ++j) {
      const double nk = resp.col(j).sum();
      if (nk < 1e-10) {
        g.weights(j) = 1e-10;
        continue;
      }
      const Eigen::VectorXd mu = (x.transpose() * resp.col(j)) / nk;
      const Eigen::MatrixXd xc = x.rowwise() - mu.transpose();
      Eigen::MatrixXd cov = (xc.array().colwise() * resp.col(j).array()).matrix().transpose() * xc / nk;
      cov.diagonal().array() += ridge;
      g.weights(j) = nk / static_cast<double>(n);
      g.means[static_cast<std::size_t>(j)] = mu;
      g.covariances[static_cast<std::size_t>(j)] = std::move(cov);
    }
    g.weights /= g.weights.sum();
  }
  best.converged = false;
  return best;
}

}  // namespace goatmix
