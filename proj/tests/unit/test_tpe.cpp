#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "benchmarks.hpp"
#include "goatmix/errors.hpp"
#include "goatmix/random.hpp"
#include "goatmix/tpe.hpp"

using namespace goatmix;

namespace {

double x_of(const Point& p) { return as_double(p.at("x")); }

}  // namespace

TEST_CASE("empty history yields a prior sample inside the box") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const TrialHistory h(SearchSpace({ParamSpec::uniform("x", 0.0, 1.0)}), seed);
    const double x = x_of(h.suggest());
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }
}

TEST_CASE("suggest is deterministic given history and seed") {
  const SearchSpace space({ParamSpec::uniform("x", 0.0, 10.0), ParamSpec::categorical("c", {"a", "b"})});
  TrialHistory a(space, 3), b(space, 3);
  for (int k = 0; k < 25; ++k) {
    const Point p = a.suggest();
    CHECK(p == b.suggest());
    a.record(p, std::abs(x_of(p) - 2.0));
    b.record(p, std::abs(x_of(p) - 2.0));
  }
}

TEST_CASE("suggestions concentrate around the minimum of |x - 7|") {
  TrialHistory h(SearchSpace({ParamSpec::uniform("x", 0.0, 10.0)}), 2024);
  Rng rng(99);
  for (int k = 0; k < 40; ++k) {
    const double x = 10.0 * uniform01(rng);
    h.record({{"x", x}}, std::abs(x - 7.0));
  }
  int inside = 0;
  for (int k = 0; k < 200; ++k) {
    const double x = x_of(h.suggest());
    inside += x >= 5.5 && x <= 8.5;
    h.record({{"x", x}}, std::abs(x - 7.0));
  }
  CHECK(inside >= 160);
}

TEST_CASE("categorical choice that is always good is favoured") {
  const SearchSpace space({ParamSpec::categorical("c", {"A", "B", "C"})});
  int a = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    TrialHistory h(space, seed);
    for (int k = 0; k < 12; ++k) {
      const std::string c = k % 4 == 0 ? "A" : k % 4 == 1 || k % 4 == 3 ? "B" : "C";
      h.record({{"c", c}}, c == "A" ? 0.0 : 1.0);
    }
    a += as_string(h.suggest().at("c")) == "A";
  }
  CHECK(static_cast<double>(a) / 1000.0 > 1.0 / 3.0);
}

TEST_CASE("every suggestion validates against its space") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const SearchSpace space({ParamSpec::uniform("u", -2.0, 3.0), ParamSpec::log_uniform("l", 1e-4, 10.0),
                             ParamSpec::integer("i", 1, 9), ParamSpec::integer("j", 2, 300, true),
                             ParamSpec::categorical("c", {"p", "q", "r"}), ParamSpec::simplex("w", 3)});
    TrialHistory h(space, seed);
    for (int k = 0; k < 30; ++k) {
      const Point p = h.suggest();
      REQUIRE(space.contains(p));
      h.record(p, standard_normal(rng));
    }
  }
}

TEST_CASE("simplex weights are non-negative and sum to one") {
  const SearchSpace space({ParamSpec::simplex("w", 4)});
  Rng rng(8);
  for (int k = 0; k < 2000; ++k) {
    const Point p = space.sample_prior(rng);
    const auto w = space.simplex_weights(p, "w");
    REQUIRE(w.size() == 4);
    for (double v : w) CHECK(v >= 0.0);
    CHECK(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) <= 1e-12);
  }
  const std::vector<double> zeros(3, 0.0);
  CHECK(normalize_simplex(zeros) == std::vector<double>(3, 1.0 / 3.0));
}

TEST_CASE("best returns the argmin with earliest tie-break") {
  const SearchSpace space({ParamSpec::uniform("x", 0.0, 1.0)});
  TrialHistory h(space, 1);
  CHECK_THROWS_AS(h.best(), ConfigError);
  h.record({{"x", 0.1}}, 3.0);
  CHECK(h.best_index() == 0);
  h.record({{"x", 0.2}}, 1.0);
  h.record({{"x", 0.3}}, 2.0);
  CHECK(h.best_index() == 1);
  TrialHistory tie(space, 1);
  tie.record({{"x", 0.1}}, 1.0);
  tie.record({{"x", 0.2}}, 1.0);
  CHECK(tie.best_index() == 0);
}

TEST_CASE("best matches a linear scan and the running best never increases") {
  const SearchSpace space({ParamSpec::uniform("x", 0.0, 1.0)});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    TrialHistory h(space, seed);
    double running = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 100; ++k) {
      // Coarse losses so ties occur.
      h.record({{"x", uniform01(rng)}}, std::floor(10.0 * uniform01(rng)));
      std::size_t oracle = 0;
      for (std::size_t i = 1; i < h.size(); ++i)
        if (h.trials()[i].loss < h.trials()[oracle].loss) oracle = i;
      REQUIRE(h.best_index() == oracle);
      CHECK(h.best().loss <= running);
      running = h.best().loss;
    }
  }
}

TEST_CASE("record rejects non-finite losses and invalid points") {
  TrialHistory h(SearchSpace({ParamSpec::uniform("x", 0.0, 1.0)}), 1);
  CHECK_THROWS_AS(h.record({{"x", 0.5}}, std::nan("")), ConfigError);
  CHECK_THROWS_AS(h.record({{"x", 0.5}}, std::numeric_limits<double>::infinity()), ConfigError);
  CHECK_THROWS_AS(h.record({{"x", 1.5}}, 0.0), ConfigError);
  CHECK_THROWS_AS(h.record({{"y", 0.5}}, 0.0), ConfigError);
  CHECK(h.empty());
}

TEST_CASE("should_stop follows the non-improving window") {
  const SearchSpace space({ParamSpec::uniform("x", 0.0, 1.0)});
  auto history = [&](std::initializer_list<double> losses) {
    TrialHistory h(space, 1);
    for (double l : losses) h.record({{"x", 0.5}}, l);
    return h;
  };
  CHECK_FALSE(history({5, 4, 3}).should_stop(10));
  CHECK_FALSE(history({3, 4, 2}).should_stop(1));
  CHECK(history({3, 4}).should_stop(1));
  TrialHistory flat(space, 1);
  flat.record({{"x", 0.5}}, 3.0);
  for (int i = 1; i <= 15; ++i) {
    CHECK_FALSE(flat.should_stop(15));
    flat.record({{"x", 0.5}}, 3.0 + 0.1 * i);
  }
  CHECK(flat.should_stop(15));
}

TEST_CASE("trial log round-trips") {
  const SearchSpace space({ParamSpec::uniform("x", 0.0, 1.0), ParamSpec::categorical("c", {"a", "b"}),
                           ParamSpec::integer("n", 1, 5)});
  TrialHistory h(space, 4);
  h.record({{"x", 0.25}, {"c", std::string("b")}, {"n", std::int64_t{3}}}, -0.75, TrialTag::warm_start);
  for (int k = 0; k < 5; ++k) h.record(h.suggest(), 0.1 * k);
  const auto back = parse_trial_log(h.to_jsonl());
  REQUIRE(back.size() == h.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].iteration == h.trials()[i].iteration);
    CHECK(back[i].point == h.trials()[i].point);
    CHECK(back[i].loss == h.trials()[i].loss);
    CHECK(back[i].tag == h.trials()[i].tag);
  }
}

TEST_CASE("tpe beats random search on |x - 7| at budget 60") {
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = testing::abs7_search(seed, 60);
    wins += r.tpe <= r.random;
  }
  CHECK(wins >= 35);
}
