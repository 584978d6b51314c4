#include "goatmix/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "goatmix/errors.hpp"

namespace goatmix {
namespace {

constexpr double kUnitClip = 1e-12;

double probit(double u) {
  static const boost::math::normal standard;
  return boost::math::quantile(standard, std::clamp(u, kUnitClip, 1.0 - kUnitClip));
}

double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
  return m;
}

Json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from_json(const Json& j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json gmm_to_json(const Gmm1d& g) {
  return Json{{"weights", g.weights}, {"means", g.means}, {"variances", g.variances},
              {"log_likelihood", g.log_likelihood}, {"converged", g.converged}};
}

Gmm1d gmm_from_json(const Json& j) {
  Gmm1d g;
  g.weights = j.at("weights").get<std::vector<double>>();
  g.means = j.at("means").get<std::vector<double>>();
  g.variances = j.at("variances").get<std::vector<double>>();
  g.log_likelihood = j.at("log_likelihood").get<double>();
  g.converged = j.at("converged").get<bool>();
  return g;
}

/// Nearest-ish correlation matrix: eigenvalues clipped at 1e-8, unit diagonal restored.
Eigen::MatrixXd project_correlation(const Eigen::MatrixXd& r) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r);
  if (es.eigenvalues().minCoeff() >= 1e-8) return r;
  Eigen::VectorXd lambda = es.eigenvalues().cwiseMax(1e-8);
  Eigen::MatrixXd fixed = es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().transpose();
  const Eigen::VectorXd inv = fixed.diagonal().cwiseSqrt().cwiseInverse();
  fixed = inv.asDiagonal() * fixed * inv.asDiagonal();
  fixed = 0.5 * (fixed + fixed.transpose());
  fixed.diagonal().setOnes();
  return fixed;
}

Eigen::MatrixXd sqrt_factor(const Eigen::MatrixXd& r) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

// ---------------------------------------------------------------------------
// Gaussian copula

GaussianCopulaModel::GaussianCopulaModel(std::vector<Marginal> marginals, Eigen::MatrixXd correlation)
    : marginals_(std::move(marginals)), correlation_(std::move(correlation)), factor_(sqrt_factor(correlation_)) {}

GaussianCopulaModel GaussianCopulaModel::fit(const Dataset& d, std::size_t max_components, Rng& rng) {
  const std::size_t n = d.n_rows();
  const std::size_t cols = d.n_cols();
  const auto nn = static_cast<Eigen::Index>(n);
  std::vector<Marginal> marginals(cols);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(nn, static_cast<Eigen::Index>(cols));
  std::vector<bool> degenerate(cols, false);

  for (std::size_t c = 0; c < cols; ++c) {
    const auto& col = d.schema().column(c);
    auto& m = marginals[c];
    const auto values = d.column(c);
    const auto cc = static_cast<Eigen::Index>(c);
    if (col.is_categorical()) {
      m.categorical = true;
      std::vector<double> counts(col.categories.size(), 0.0);
      for (double v : values) counts[static_cast<std::size_t>(v)] += 1.0;
      m.order.resize(counts.size());
      std::iota(m.order.begin(), m.order.end(), std::size_t{0});
      std::stable_sort(m.order.begin(), m.order.end(), [&](auto a, auto b) { return counts[a] > counts[b]; });
      std::vector<std::size_t> position(counts.size());
      double acc = 0.0;
      for (std::size_t p = 0; p < m.order.size(); ++p) {
        position[m.order[p]] = p;
        acc += counts[m.order[p]] / static_cast<double>(n);
        m.cumulative.push_back(acc);
      }
      std::size_t last = m.order.size() - 1;
      while (last > 0 && counts[m.order[last]] == 0.0) --last;
      std::fill(m.cumulative.begin() + static_cast<std::ptrdiff_t>(last), m.cumulative.end(), 1.0);
      degenerate[c] = counts[m.order.front()] == static_cast<double>(n);
      if (degenerate[c]) continue;
      for (std::size_t r = 0; r < n; ++r) {
        const std::size_t p = position[static_cast<std::size_t>(values[r])];
        const double lo = p == 0 ? 0.0 : m.cumulative[p - 1];
        const double hi = m.cumulative[p];
        z(static_cast<Eigen::Index>(r), cc) = probit(lo + uniform01(rng) * (hi - lo));
      }
    } else {
      m.gmm = select_gmm_1d(values, max_components, EmOptions{}, rng);
      degenerate[c] = m.gmm.components() == 1 && m.gmm.variances.front() == 0.0;
      if (degenerate[c]) continue;
      for (std::size_t r = 0; r < n; ++r) z(static_cast<Eigen::Index>(r), cc) = probit(m.gmm.cdf(values[r]));
    }
  }

  const Eigen::RowVectorXd mean = z.colwise().mean();
  const Eigen::MatrixXd centered = z.rowwise() - mean;
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(std::max<std::size_t>(n, 1));
  const auto k = static_cast<Eigen::Index>(cols);
  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if (degenerate[static_cast<std::size_t>(i)] || degenerate[static_cast<std::size_t>(j)]) continue;
      const double denom = std::sqrt(cov(i, i) * cov(j, j));
      const double r = denom > 0.0 ? std::clamp(cov(i, j) / denom, -1.0, 1.0) : 0.0;
      corr(i, j) = corr(j, i) = r;
    }
  }
  return GaussianCopulaModel(std::move(marginals), project_correlation(corr));
}

void GaussianCopulaModel::sample_rows(std::size_t n, Rng& rng, std::vector<double>& out) const {
  const auto k = static_cast<Eigen::Index>(marginals_.size());
  Eigen::VectorXd e(k);
  for (std::size_t r = 0; r < n; ++r) {
    for (Eigen::Index i = 0; i < k; ++i) e(i) = standard_normal(rng);
    const Eigen::VectorXd zr = factor_ * e;
    for (Eigen::Index c = 0; c < k; ++c) {
      const auto& m = marginals_[static_cast<std::size_t>(c)];
      const double u = std::clamp(phi(zr(c)), kUnitClip, 1.0 - kUnitClip);
      if (m.categorical) {
        std::size_t p = 0;
        while (p + 1 < m.order.size() && u >= m.cumulative[p]) ++p;
        out.push_back(static_cast<double>(m.order[p]));
      } else if (m.gmm.components() == 1 && m.gmm.variances.front() == 0.0) {
        out.push_back(m.gmm.means.front());
      } else {
        out.push_back(m.gmm.quantile(u));
      }
    }
  }
}

bool GaussianCopulaModel::converged() const {
  return std::all_of(marginals_.begin(), marginals_.end(), [](const Marginal& m) { return m.categorical || m.gmm.converged; });
}

Json GaussianCopulaModel::to_json() const {
  Json marg = Json::array();
  for (const auto& m : marginals_) {
    if (m.categorical) {
      marg.push_back(Json{{"type", "categorical"}, {"order", m.order}, {"cumulative", m.cumulative}});
    } else {
      marg.push_back(Json{{"type", "gmm"}, {"gmm", gmm_to_json(m.gmm)}});
    }
  }
  return Json{{"marginals", std::move(marg)}, {"correlation", matrix_to_json(correlation_)}};
}

GaussianCopulaModel GaussianCopulaModel::from_json(const Json& j) {
  std::vector<Marginal> marginals;
  for (const auto& e : j.at("marginals")) {
    Marginal m;
    if (e.at("type").get<std::string>() == "categorical") {
      m.categorical = true;
      m.order = e.at("order").get<std::vector<std::size_t>>();
      m.cumulative = e.at("cumulative").get<std::vector<double>>();
    } else {
      m.gmm = gmm_from_json(e.at("gmm"));
    }
    marginals.push_back(std::move(m));
  }
  return GaussianCopulaModel(std::move(marginals), matrix_from_json(j.at("correlation")));
}

// ---------------------------------------------------------------------------
// Joint mixture

JointMixtureModel::JointMixtureModel(std::vector<Block> blocks, GmmFull gmm)
    : blocks_(std::move(blocks)), gmm_(std::move(gmm)), factors_(gmm_.cholesky_factors()) {}

JointMixtureModel JointMixtureModel::fit(const Dataset& d, std::size_t n_components, double ridge,
                                         std::size_t em_iterations, Rng& rng) {
  std::vector<Block> blocks;
  std::size_t width = 0;
  for (const auto& col : d.schema().columns()) {
    Block b;
    b.categorical = col.is_categorical();
    b.offset = width;
    b.width = b.categorical ? col.categories.size() : 1;
    width += b.width;
    blocks.push_back(b);
  }
  const std::size_t n = d.n_rows();
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));
  for (std::size_t c = 0; c < blocks.size(); ++c) {
    auto& b = blocks[c];
    const auto values = d.column(c);
    if (b.categorical) {
      for (std::size_t r = 0; r < n; ++r)
        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(b.offset + static_cast<std::size_t>(values[r]))) = 1.0;
      continue;
    }
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    b.mean = mean;
    // A zero scale decodes a constant column back to its mean exactly.
    b.scale = var > 0.0 ? std::sqrt(var) : 0.0;
    const double divisor = var > 0.0 ? b.scale : 1.0;
    for (std::size_t r = 0; r < n; ++r)
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(b.offset)) = (values[r] - b.mean) / divisor;
  }
  EmOptions options;
  options.max_iterations = em_iterations;
  return JointMixtureModel(std::move(blocks), fit_gmm_full(x, n_components, ridge, options, rng));
}

void JointMixtureModel::sample_rows(std::size_t n, Rng& rng, std::vector<double>& out) const {
  std::discrete_distribution<std::size_t> pick(gmm_.weights.data(), gmm_.weights.data() + gmm_.weights.size());
  const auto dim = static_cast<Eigen::Index>(gmm_.dim());
  Eigen::VectorXd e(dim);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t j = pick(rng);
    for (Eigen::Index i = 0; i < dim; ++i) e(i) = standard_normal(rng);
    const Eigen::VectorXd v = gmm_.means[j] + factors_[j] * e;
    for (const auto& b : blocks_) {
      if (b.categorical) {
        Eigen::Index best = 0;
        v.segment(static_cast<Eigen::Index>(b.offset), static_cast<Eigen::Index>(b.width)).maxCoeff(&best);
        out.push_back(static_cast<double>(best));
      } else {
        out.push_back(b.mean + b.scale * v(static_cast<Eigen::Index>(b.offset)));
      }
    }
  }
}

Json JointMixtureModel::to_json() const {
  Json blocks = Json::array();
  for (const auto& b : blocks_)
    blocks.push_back(Json{{"categorical", b.categorical}, {"offset", b.offset}, {"width", b.width},
                          {"mean", b.mean}, {"scale", b.scale}});
  Json means = Json::array(), covs = Json::array();
  for (const auto& m : gmm_.means) means.push_back(vector_to_json(m));
  for (const auto& c : gmm_.covariances) covs.push_back(matrix_to_json(c));
  return Json{{"blocks", std::move(blocks)},
              {"weights", vector_to_json(gmm_.weights)},
              {"means", std::move(means)},
              {"covariances", std::move(covs)},
              {"log_likelihood", gmm_.log_likelihood},
              {"converged", gmm_.converged}};
}

JointMixtureModel JointMixtureModel::from_json(const Json& j) {
  std::vector<Block> blocks;
  for (const auto& e : j.at("blocks"))
    blocks.push_back(Block{e.at("categorical").get<bool>(), e.at("offset").get<std::size_t>(),
                           e.at("width").get<std::size_t>(), e.at("mean").get<double>(), e.at("scale").get<double>()});
  GmmFull g;
  g.weights = vector_from_json(j.at("weights"));
  for (const auto& m : j.at("means")) g.means.push_back(vector_from_json(m));
  for (const auto& c : j.at("covariances")) g.covariances.push_back(matrix_from_json(c));
  g.log_likelihood = j.at("log_likelihood").get<double>();
  g.converged = j.at("converged").get<bool>();
  return JointMixtureModel(std::move(blocks), std::move(g));
}

// ---------------------------------------------------------------------------
// Histogram

HistogramModel::HistogramModel(std::size_t label_index, std::vector<double> label_masses,
                               std::vector<std::vector<ColumnTable>> per_class)
    : label_index_(label_index), label_masses_(std::move(label_masses)), per_class_(std::move(per_class)) {}

HistogramModel HistogramModel::fit(const Dataset& d, std::size_t bins) {
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  const auto& schema = d.schema();
  const std::size_t label = schema.label_index();
  const auto [neg, pos] = d.class_counts();
  const double n = static_cast<double>(d.n_rows());
  std::vector<double> label_masses = {static_cast<double>(neg) / n, static_cast<double>(pos) / n};

  std::vector<std::pair<double, double>> range(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (schema.column(c).is_categorical()) continue;
    const auto v = d.column(c);
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    range[c] = {*mn, *mx};
  }

  std::vector<std::vector<ColumnTable>> per_class(2);
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < d.n_rows(); ++r)
      if (d.label(r) == cls) rows.push_back(r);
    if (rows.empty()) continue;
    auto& tables = per_class[static_cast<std::size_t>(cls)];
    tables.resize(schema.size());
    const double m = static_cast<double>(rows.size());
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (c == label) continue;
      auto& t = tables[c];
      const auto& col = schema.column(c);
      if (col.is_categorical()) {
        t.categorical = true;
        t.masses.assign(col.categories.size(), 0.0);
        for (auto r : rows) t.masses[static_cast<std::size_t>(d.at(r, c))] += 1.0 / m;
        continue;
      }
      const auto [lo, hi] = range[c];
      if (lo == hi) {
        t.edges = {lo};
        t.masses = {1.0};
        continue;
      }
      const double width = (hi - lo) / static_cast<double>(bins);
      t.edges.resize(bins + 1);
      for (std::size_t b = 0; b <= bins; ++b) t.edges[b] = lo + width * static_cast<double>(b);
      t.edges.back() = hi;
      t.masses.assign(bins, 0.0);
      for (auto r : rows) {
        const auto b = std::min(bins - 1, static_cast<std::size_t>(std::floor((d.at(r, c) - lo) / width)));
        t.masses[b] += 1.0 / m;
      }
    }
  }
  return HistogramModel(label, std::move(label_masses), std::move(per_class));
}

void HistogramModel::sample_rows(std::size_t n, Rng& rng, std::vector<double>& out) const {
  std::discrete_distribution<int> pick_label(label_masses_.begin(), label_masses_.end());
  std::vector<std::vector<std::discrete_distribution<std::size_t>>> pickers(2);
  for (std::size_t cls = 0; cls < 2; ++cls)
    for (const auto& t : per_class_[cls]) pickers[cls].emplace_back(t.masses.begin(), t.masses.end());

  for (std::size_t r = 0; r < n; ++r) {
    const int cls = pick_label(rng);
    const auto& tables = per_class_[static_cast<std::size_t>(cls)];
    auto& pick = pickers[static_cast<std::size_t>(cls)];
    for (std::size_t c = 0; c < tables.size(); ++c) {
      if (c == label_index_) {
        out.push_back(static_cast<double>(cls));
        continue;
      }
      const auto& t = tables[c];
      if (t.categorical) {
        out.push_back(static_cast<double>(pick[c](rng)));
      } else if (t.edges.size() == 1) {
        out.push_back(t.edges.front());
      } else {
        const std::size_t b = pick[c](rng);
        out.push_back(t.edges[b] + uniform01(rng) * (t.edges[b + 1] - t.edges[b]));
      }
    }
  }
}

Json HistogramModel::to_json() const {
  Json classes = Json::array();
  for (const auto& tables : per_class_) {
    Json cls = Json::array();
    for (const auto& t : tables)
      cls.push_back(Json{{"categorical", t.categorical}, {"edges", t.edges}, {"masses", t.masses}});
    classes.push_back(std::move(cls));
  }
  return Json{{"label_index", label_index_}, {"label_masses", label_masses_}, {"classes", std::move(classes)}};
}

HistogramModel HistogramModel::from_json(const Json& j) {
  std::vector<std::vector<ColumnTable>> per_class;
  for (const auto& cls : j.at("classes")) {
    std::vector<ColumnTable> tables;
    for (const auto& t : cls)
      tables.push_back(ColumnTable{t.at("categorical").get<bool>(), t.at("edges").get<std::vector<double>>(),
                                   t.at("masses").get<std::vector<double>>()});
    per_class.push_back(std::move(tables));
  }
  return HistogramModel(j.at("label_index").get<std::size_t>(), j.at("label_masses").get<std::vector<double>>(),
                        std::move(per_class));
}

// ---------------------------------------------------------------------------
// KDE perturbation

KdePerturbModel::KdePerturbModel(Schema schema, std::vector<double> rows, std::vector<double> noise_sd,
                                 double flip_probability)
    : schema_(std::move(schema)),
      rows_(std::move(rows)),
      n_rows_(schema_.size() ? rows_.size() / schema_.size() : 0),
      noise_sd_(std::move(noise_sd)),
      flip_probability_(flip_probability) {}

KdePerturbModel KdePerturbModel::fit(const Dataset& d, double bandwidth_scale, double flip_probability) {
  std::vector<double> sd(d.n_cols(), 0.0);
  for (std::size_t c = 0; c < d.n_cols(); ++c) {
    if (d.schema().column(c).is_categorical()) continue;
    const auto v = d.column(c);
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    sd[c] = bandwidth_scale * std::sqrt(var / static_cast<double>(v.size()));
  }
  return KdePerturbModel(d.schema(), std::vector<double>(d.cells().begin(), d.cells().end()), std::move(sd),
                         flip_probability);
}

void KdePerturbModel::sample_rows(std::size_t n, Rng& rng, std::vector<double>& out) const {
  const std::size_t cols = schema_.size();
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t src = uniform_index(rng, n_rows_);
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = rows_[src * cols + c];
      if (schema_.column(c).is_categorical()) {
        out.push_back(uniform01(rng) < flip_probability_ ? rows_[uniform_index(rng, n_rows_) * cols + c] : x);
      } else {
        out.push_back(x + noise_sd_[c] * standard_normal(rng));
      }
    }
  }
}

Json KdePerturbModel::to_json() const {
  return Json{{"noise_sd", noise_sd_}, {"flip_probability", flip_probability_}, {"rows", rows_}};
}

KdePerturbModel KdePerturbModel::from_json(const Json& j, const Schema& schema) {
  return KdePerturbModel(schema, j.at("rows").get<std::vector<double>>(), j.at("noise_sd").get<std::vector<double>>(),
                         j.at("flip_probability").get<double>());
}

}  // namespace goatmix
