#pragma once

#include <vector>

#include <Eigen/Dense>

#include "goatmix/gmm.hpp"
#include "goatmix/synthesizer.hpp"

namespace goatmix {

/// Gaussian copula with GMM marginals for continuous columns and
/// frequency-ordered [0,1] intervals for categorical ones.
class GaussianCopulaModel final : public SynthModel {
 public:
  struct Marginal {
    bool categorical = false;
    Gmm1d gmm;                       // continuous
    std::vector<std::size_t> order;  // categorical: category indices, most frequent first
    std::vector<double> cumulative;  // categorical: upper interval bound of each entry of `order`
  };

  GaussianCopulaModel(std::vector<Marginal> marginals, Eigen::MatrixXd correlation);

  /// max_components caps the BIC search over marginal component counts.
  static GaussianCopulaModel fit(const Dataset& d, std::size_t max_components, Rng& rng);
  static GaussianCopulaModel from_json(const Json& j);

  Method method() const override { return Method::gaussian_copula; }
  void sample_rows(std::size_t n, Rng& rng, std::vector<double>& out) const override;
  Json to_json() const override;
  bool converged() const override;

  const std::vector<Marginal>& marginals() const noexcept { return marginals_; }
  const Eigen::MatrixXd& correlation() const noexcept { return correlation_; }

 private:
  std::vector<Marginal> marginals_;
  Eigen::MatrixXd correlation_;
  Eigen::MatrixXd factor_;  // correlation = factor * factor^T
};

/// Full-covariance GMM over standardized continuous columns and one-hot
/// categorical blocks; categoricals are decoded by argmax.
class JointMixtureModel final : public SynthModel {
 public:
  struct Block {
    bool categorical = false;
    std::size_t offset = 0;  // first encoded dimension
    std::size_t width = 1;
    double mean = 0.0;  // continuous standardization
    double scale = 1.0;
  };

  JointMixtureModel(std::vector<Block> blocks, GmmFull gmm);

  static JointMixtureModel fit(const Dataset& d, std::size_t n_components, double ridge, std::size_t em_iterations,
                               Rng& rng);
  static JointMixtureModel from_json(const Json& j);

  Method method() const override { return Method::joint_mixture; }
  void sample_rows(std::size_t n, Rng& rng, std::vector<double>& out) const override;
  Json to_json() const override;
  bool converged() const override { return gmm_.converged; }

  const GmmFull& gmm() const noexcept { return gmm_; }

 private:
  std::vector<Block> blocks_;
  GmmFull gmm_;
  std::vector<Eigen::MatrixXd> factors_;
};

/// Label frequency table plus independent per-class column histograms
/// (equal-width bins over the training range) and frequency tables.
class HistogramModel final : public SynthModel {
 public:
  struct ColumnTable {
    bool categorical = false;
    std::vector<double> edges;   // continuous: bins + 1 edges (a single edge for a point mass)
    std::vector<double> masses;  // per bin or per category; sums to 1
  };

  HistogramModel(std::size_t label_index, std::vector<double> label_masses,
                 std::vector<std::vector<ColumnTable>> per_class);

  static HistogramModel fit(const Dataset& d, std::size_t bins);
  static HistogramModel from_json(const Json& j);

  Method method() const override { return Method::histogram; }
  void sample_rows(std::size_t n, Rng& rng, std::vector<double>& out) const override;
  Json to_json() const override;

  const std::vector<double>& label_masses() const noexcept { return label_masses_; }
  /// Column tables of class `label`; empty when the class had no training rows.
  const std::vector<ColumnTable>& tables(int label) const { return per_class_.at(static_cast<std::size_t>(label)); }

 private:
  std::size_t label_index_;
  std::vector<double> label_masses_;
  std::vector<std::vector<ColumnTable>> per_class_;
};

/// Bootstrap of training rows with Gaussian jitter on continuous columns
/// (sd = bandwidth_scale * column sd) and random categorical flips.
class KdePerturbModel final : public SynthModel {
 public:
  KdePerturbModel(Schema schema, std::vector<double> rows, std::vector<double> noise_sd, double flip_probability);

  static KdePerturbModel fit(const Dataset& d, double bandwidth_scale, double flip_probability);
  static KdePerturbModel from_json(const Json& j, const Schema& schema);

  Method method() const override { return Method::kde_perturb; }
  void sample_rows(std::size_t n, Rng& rng, std::vector<double>& out) const override;
  Json to_json() const override;

 private:
  Schema schema_;
  std::vector<double> rows_;
  std::size_t n_rows_;
  std::vector<double> noise_sd_;
  double flip_probability_;
};

}  // namespace goatmix
