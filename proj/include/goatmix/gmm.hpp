#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "goatmix/random.hpp"

namespace goatmix {

struct EmOptions {
  std::size_t max_iterations = 200;
  /// Convergence threshold on the change of the mean per-sample log-likelihood.
  double tolerance = 1e-6;
};

/// Univariate Gaussian mixture. A component with zero variance is a point mass.
struct Gmm1d {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;
  double log_likelihood = 0.0;
  bool converged = true;

  std::size_t components() const noexcept { return weights.size(); }
  double cdf(double x) const;
  /// Inverse CDF by bisection; u in (0, 1).
  double quantile(double u) const;
  double sample(Rng& rng) const;
  /// Bayesian information criterion, -2 LL + (3k - 1) ln n.
  double bic(std::size_t n) const;
};

/// EM with k-means++ initialization. A constant sample yields a single point mass.
Gmm1d fit_gmm_1d(std::span<const double> x, std::size_t k, const EmOptions& options, Rng& rng);

/// Fits k = 1..max_k and keeps the lowest-BIC model (fewer components on ties).
Gmm1d select_gmm_1d(std::span<const double> x, std::size_t max_k, const EmOptions& options, Rng& rng);

/// Full-covariance Gaussian mixture over rows of a data matrix.
struct GmmFull {
  Eigen::VectorXd weights;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;
  double log_likelihood = 0.0;
  bool converged = true;

  std::size_t components() const noexcept { return static_cast<std::size_t>(weights.size()); }
  std::size_t dim() const noexcept { return means.empty() ? 0 : static_cast<std::size_t>(means.front().size()); }
  /// Per-component lower Cholesky factors, for sampling.
  std::vector<Eigen::MatrixXd> cholesky_factors() const;
};

/// EM on the rows of `x`; `ridge` is added to every covariance diagonal.
/// Returns the best-likelihood iterate; `converged` is false when the
/// iteration cap was reached first.
GmmFull fit_gmm_full(const Eigen::MatrixXd& x, std::size_t k, double ridge, const EmOptions& options, Rng& rng);

}  // namespace goatmix
