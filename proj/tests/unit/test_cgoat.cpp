#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "benchmarks.hpp"
#include "goatmix/cgoat.hpp"
#include "goatmix/errors.hpp"
#include "goatmix/random.hpp"

using namespace goatmix;

namespace {

double min_warm_loss(const CgoatResult& r) {
  double m = 0.0;
  for (const auto& t : r.history.trials())
    if (t.tag == TrialTag::warm_start) m = std::min(m, t.loss);
  return m;
}

GeneratorSet default_generators(const Dataset& train, std::uint64_t seed) {
  GeneratorSet g;
  for (std::size_t i = 0; i < kAllMethods.size(); ++i)
    g.push_back(std::make_shared<FittedSynthesizer>(
        fit(kAllMethods[i], train, default_theta(kAllMethods[i]), derive_seed(seed, "fit", i))));
  return g;
}

}  // namespace

TEST_CASE("warm starts: corners then the AUC-proportional point") {
  const auto w = warm_starts(std::vector<double>{0.9, 0.8, 0.7, 0.6});
  REQUIRE(w.size() == 5);
  for (std::size_t m = 0; m < 4; ++m) {
    std::vector<double> e(4, 0.0);
    e[m] = 1.0;
    CHECK(w[m].alpha == e);
  }
  // auc* = 0.6, excesses (0.3, 0.2, 0.1, 0) over a total of 0.6.
  const double expect[] = {0.5, 1.0 / 3.0, 1.0 / 6.0, 0.0};
  for (std::size_t m = 0; m < 4; ++m) CHECK(std::abs(w[4].alpha[m] - expect[m]) <= 1e-12);
  CHECK(warm_starts(std::vector<double>{0.7, 0.7, 0.7, 0.7})[4].alpha == std::vector<double>(4, 0.25));
  CHECK_THROWS_AS(warm_starts(std::vector<double>{0.7, 1.2, 0.7, 0.7}), ConfigError);
}

TEST_CASE("row allocation examples") {
  CHECK(allocate_rows(std::vector<double>{0.5, 0.3, 0.2, 0.0}, 1000) == std::vector<std::size_t>{500, 300, 200, 0});
  CHECK(allocate_rows(std::vector<double>{0.25, 0.25, 0.25, 0.25}, 10) == std::vector<std::size_t>{3, 3, 2, 2});
  CHECK(allocate_rows(std::vector<double>{1.0, 0.0, 0.0, 0.0}, 7) == std::vector<std::size_t>{7, 0, 0, 0});
  CHECK(allocate_rows(std::vector<double>{0.25, 0.25, 0.25, 0.25}, 0) == std::vector<std::size_t>{0, 0, 0, 0});
}

TEST_CASE("row allocation always sums to n and stays within one row of alpha n") {
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Rng rng(seed);
    const std::size_t m = 2 + uniform_index(rng, 5);
    std::vector<double> raw(m);
    for (double& v : raw) v = uniform_index(rng, 4) == 0 ? 0.0 : uniform01(rng);
    const auto w = MixtureWeights::from_raw(raw);
    CHECK_NOTHROW(w.validate());
    const std::size_t n = uniform_index(rng, 5000);
    const auto rows = allocate_rows(w.alpha, n);
    REQUIRE(std::accumulate(rows.begin(), rows.end(), std::size_t{0}) == n);
    for (std::size_t i = 0; i < m; ++i)
      CHECK(std::abs(static_cast<double>(rows[i]) - w.alpha[i] * static_cast<double>(n)) < 1.0 + 1e-9);
  }
}

TEST_CASE("compose stacks blocks in generator order") {
  const Partition part = split(testing::make_linear_data(600, 3), 3);
  const GeneratorSet g = default_generators(part.train, 3);
  const Dataset d = compose(g, std::vector<double>{0.5, 0.3, 0.2, 0.0}, 1000, 44);
  REQUIRE(d.n_rows() == 1000);
  const std::size_t bounds[][2] = {{0, 500}, {500, 800}, {800, 1000}};
  for (std::size_t m = 0; m < 3; ++m) {
    const Dataset block = g[m]->sample(bounds[m][1] - bounds[m][0], derive_seed(44, {m}));
    std::vector<std::size_t> rows(bounds[m][1] - bounds[m][0]);
    std::iota(rows.begin(), rows.end(), bounds[m][0]);
    CHECK(d.select_rows(rows) == block);
  }
  for (std::size_t m = 0; m < 4; ++m) {
    std::vector<double> e(4, 0.0);
    e[m] = 1.0;
    CHECK(compose(g, e, 300, 9) == g[m]->sample(300, derive_seed(9, {m})));
  }
  const Dataset empty = compose(g, std::vector<double>{0.25, 0.25, 0.25, 0.25}, 0, 1);
  CHECK(empty.empty());
  CHECK(empty.schema() == part.train.schema());
}

TEST_CASE("compose rejects mismatched schemas") {
  const Partition a = split(testing::make_linear_data(300, 1), 1);
  const Partition b = split(testing::make_xor_data(300, 1), 1);
  GeneratorSet g = {std::make_shared<FittedSynthesizer>(
                        fit(Method::histogram, a.train, default_theta(Method::histogram), 1)),
                    std::make_shared<FittedSynthesizer>(
                        fit(Method::histogram, b.train, default_theta(Method::histogram), 1))};
  CHECK_THROWS_AS(compose(g, std::vector<double>{0.5, 0.5}, 10, 1), ConfigError);
}

TEST_CASE("returned loss never exceeds the best warm start on fuzzed runs") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Rng rng(seed);
    const Partition part = split(seed % 2 ? testing::make_linear_data(300, seed) : testing::make_xor_data(300, seed),
                                 seed);
    const GeneratorSet g = default_generators(part.train, seed);
    CgoatConfig cfg;
    cfg.max_iterations = 5 + uniform_index(rng, 10);
    cfg.patience = 1 + uniform_index(rng, 6);
    cfg.rows = 50 + uniform_index(rng, 300);
    cfg.seed = seed;
    const CgoatResult r = run_cgoat(cfg, g, part);
    CHECK(r.best_val_loss <= min_warm_loss(r));
    CHECK(r.iterations_run <= cfg.max_iterations);
    CHECK(r.best_synthetic.n_rows() == cfg.rows);
    CHECK_NOTHROW(r.best_alpha.validate());
    CHECK(r.best_val_loss == r.history.best().loss);
  }
}

TEST_CASE("warm starts are the first five trials and use the corner AUCs when none are given") {
  const Partition part = split(testing::make_linear_data(600, 5), 5);
  const GeneratorSet g = default_generators(part.train, 5);
  CgoatConfig cfg;
  cfg.max_iterations = 8;
  cfg.seed = 5;
  const CgoatResult r = run_cgoat(cfg, g, part);
  REQUIRE(r.history.size() >= 5);
  for (std::size_t k = 0; k < 5; ++k) CHECK(r.history.trials()[k].tag == TrialTag::warm_start);
  for (std::size_t k = 5; k < r.history.size(); ++k) CHECK(r.history.trials()[k].tag == TrialTag::suggested);
  for (std::size_t m = 0; m < 4; ++m) CHECK(r.individual_auc[m] == -r.history.trials()[m].loss);
  const auto expect = warm_starts(r.individual_auc);
  CHECK(r.warm_starts == expect);
  CHECK(r.history.space().simplex_weights(r.history.trials()[4].point, kAlphaParam) == expect[4].alpha);
}

TEST_CASE("identical generators give mixtures within sampling noise of the corners") {
  const Partition part = split(testing::make_linear_data(3000, 6), 6);
  const auto one = std::make_shared<FittedSynthesizer>(
      fit(Method::gaussian_copula, part.train, default_theta(Method::gaussian_copula), 6));
  const GeneratorSet g = {one, one, one, one};
  CgoatConfig cfg;
  cfg.max_iterations = 20;
  cfg.patience = 20;
  cfg.rows = 20000;
  cfg.seed = 6;
  const CgoatResult r = run_cgoat(cfg, g, part);
  double best_corner = 0.0, corner_mean = 0.0, mixture_mean = 0.0;
  for (std::size_t m = 0; m < 4; ++m) {
    best_corner = std::min(best_corner, r.history.trials()[m].loss);
    corner_mean += r.history.trials()[m].loss / 4.0;
  }
  for (std::size_t k = 4; k < r.history.size(); ++k)
    mixture_mean += r.history.trials()[k].loss / static_cast<double>(r.history.size() - 4);
  CHECK(std::abs(r.best_val_loss - best_corner) <= 0.01);
  CHECK(std::abs(mixture_mean - corner_mean) <= 0.01);
}

TEST_CASE("an injected noise synthesizer costs at most 0.02 AUC") {
  for (std::uint64_t seed : {11, 12}) {
    auto b = testing::dominance_benchmark(seed);
    CgoatConfig cfg;
    cfg.max_iterations = 30;
    cfg.seed = seed;
    const CgoatResult base = run_cgoat(cfg, b.generators, b.part);
    GeneratorSet more = b.generators;
    more.push_back(std::make_shared<testing::LabelNoiseGenerator>(b.generators[3], 0.5));
    const CgoatResult noisy = run_cgoat(cfg, more, b.part);
    CHECK(noisy.best_val_loss <= base.best_val_loss + 0.02);
  }
}

TEST_CASE("run_cgoat is deterministic and can resample the final data") {
  const Partition part = split(testing::make_linear_data(500, 7), 7);
  const GeneratorSet g = default_generators(part.train, 7);
  CgoatConfig cfg;
  cfg.max_iterations = 10;
  cfg.seed = 7;
  const CgoatResult a = run_cgoat(cfg, g, part), b = run_cgoat(cfg, g, part);
  CHECK(a.history.to_jsonl() == b.history.to_jsonl());
  CHECK(a.best_alpha == b.best_alpha);
  CHECK(a.best_synthetic == b.best_synthetic);
  cfg.resample_final = true;
  const CgoatResult c = run_cgoat(cfg, g, part);
  CHECK(c.best_alpha == a.best_alpha);
  CHECK(c.best_synthetic == compose(g, c.best_alpha.alpha, part.train.n_rows(), derive_seed(7, "final")));
}

TEST_CASE("all-degenerate runs are flagged with loss -0.5") {
  const Partition part = split(testing::make_linear_data(400, 8), 8);
  const GeneratorSet base = default_generators(part.train, 8);
  GeneratorSet g;
  for (const auto& s : base) g.push_back(std::make_shared<testing::CollapsedGenerator>(s, 0));
  CgoatConfig cfg;
  cfg.max_iterations = 8;
  const CgoatResult r = run_cgoat(cfg, g, part);
  CHECK(r.degenerate);
  CHECK(r.best_val_loss == -0.5);
}

TEST_CASE("config validation") {
  const Partition part = split(testing::make_linear_data(200, 1), 1);
  const GeneratorSet g = default_generators(part.train, 1);
  CgoatConfig cfg;
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(run_cgoat(cfg, g, part), ConfigError);
  cfg.max_iterations = 5;
  CHECK_THROWS_AS(run_cgoat(cfg, GeneratorSet{g[0]}, part), ConfigError);
  cfg.individual_auc = {0.5, 0.6};
  CHECK_THROWS_AS(run_cgoat(cfg, g, part), ConfigError);
}
