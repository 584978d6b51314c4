#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "goatmix/dataset.hpp"
#include "goatmix/errors.hpp"
#include "goatmix/io.hpp"
#include "goatmix/preprocess.hpp"
#include "goatmix/random.hpp"
#include "goatmix/stats.hpp"

using namespace goatmix;

namespace {

Schema two_column_schema() {
  return Schema({{"x", ColumnKind::continuous, {}}, {"y", ColumnKind::binary, {"0", "1"}}}, "y");
}

Dataset random_dataset(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> cells;
  for (std::size_t r = 0; r < n; ++r) {
    cells.push_back(standard_normal(rng));
    cells.push_back(r % 3 == 0 ? 1.0 : 0.0);
  }
  return Dataset(two_column_schema(), std::move(cells));
}

// Rows as sortable tuples; identical rows compare equal.
std::vector<std::vector<double>> row_multiset(const Dataset& d) {
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < d.n_rows(); ++r) rows.emplace_back(d.row(r).begin(), d.row(r).end());
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

TEST_CASE("csv inference: numeric columns are continuous, two labels make a binary column") {
  const Dataset d = parse_csv("age,income\n39,<=50k\n50,>50k\n28,<=50k\n", SchemaHint{"income", {}});
  REQUIRE(d.n_rows() == 3);
  CHECK(d.schema().column(0).kind == ColumnKind::continuous);
  CHECK(d.schema().column(1).kind == ColumnKind::binary);
  CHECK(d.schema().column(1).categories == std::vector<std::string>{"<=50k", ">50k"});
  CHECK(d.labels() == std::vector<int>{0, 1, 0});
  CHECK(d.at(1, 0) == 50.0);
}

TEST_CASE("csv inference: three distinct strings make a multiclass column in first-appearance order") {
  const Dataset d = parse_csv("c,y\nb,0\na,1\nc,0\nb,1\n", SchemaHint{"y", {}});
  CHECK(d.schema().column(0).kind == ColumnKind::multiclass);
  CHECK(d.schema().column(0).categories == std::vector<std::string>{"b", "a", "c"});
}

TEST_CASE("csv: declared binary column with three values is rejected") {
  SchemaHint hint{"income", {{"income", ColumnHint{ColumnKind::binary, {}}}}};
  CHECK_THROWS_AS(parse_csv("age,income\n1,a\n2,b\n3,c\n", hint), DataError);
}

TEST_CASE("csv: malformed inputs are rejected") {
  CHECK_THROWS_AS(parse_csv("", SchemaHint{"y", {}}), DataError);
  CHECK_THROWS_AS(parse_csv("x,y\n1,0\n2\n", SchemaHint{"y", {}}), DataError);
  CHECK_THROWS_AS(parse_csv("x,y\n1,0\n2,1\n", SchemaHint{"z", {}}), DataError);
  SchemaHint numeric{"y", {{"x", ColumnHint{ColumnKind::continuous, {}}}}};
  CHECK_THROWS_AS(parse_csv("x,y\n1,0\nabc,1\n", numeric), DataError);
}

TEST_CASE("csv round trip preserves cells and schema") {
  const Dataset d = parse_csv("x,c,y\n0.1,u,0\n-2.5e-7,v,1\n3,w,1\n1e300,u,0\n", SchemaHint{"y", {}});
  const std::string text = to_csv(d);
  SchemaHint hint{"y", {}};
  for (const auto& c : d.schema().columns()) hint.columns[c.name] = ColumnHint{c.kind, c.categories};
  const Dataset back = parse_csv(text, hint);
  CHECK(back == d);
  CHECK(schema_from_json(schema_to_json(d.schema())) == d.schema());
}

TEST_CASE("adult table loads with the published column typology and class shares") {
  const std::filesystem::path dir = GOATMIX_SOURCE_DIR;
  const Dataset d = load_csv(dir / "data/adult.csv", read_schema_hint(dir / "configs/adult.schema.json"));
  CHECK(d.n_rows() == 48842);
  std::map<ColumnKind, int> kinds;
  for (std::size_t c : d.schema().feature_indices()) ++kinds[d.schema().column(c).kind];
  ++kinds[d.schema().column(d.schema().label_index()).kind];
  CHECK(kinds[ColumnKind::continuous] == 6);
  CHECK(kinds[ColumnKind::binary] == 2);
  CHECK(kinds[ColumnKind::multiclass] == 7);
  const auto shares = class_share_report(d);
  CHECK(shares.at(0) == doctest::Approx(0.7607).epsilon(0.0005));
  CHECK(shares.at(1) == doctest::Approx(0.2393).epsilon(0.0005));
}

TEST_CASE("split sizes follow 70/20/10 rounding") {
  const Partition p = split(random_dataset(100, 1), 7);
  CHECK(p.train.n_rows() == 70);
  CHECK(p.val.n_rows() == 20);
  CHECK(p.test.n_rows() == 10);
  const Partition q = split(random_dataset(10, 1), 7);
  CHECK(q.train.n_rows() == 7);
  CHECK(q.val.n_rows() == 2);
  CHECK(q.test.n_rows() == 1);
}

TEST_CASE("split is deterministic given data and seed") {
  const Dataset d = random_dataset(200, 3);
  const Partition a = split(d, 11), b = split(d, 11);
  CHECK(a.train == b.train);
  CHECK(a.val == b.val);
  CHECK(a.test == b.test);
  CHECK(a.train_rows == b.train_rows);
  CHECK_FALSE(split(d, 12).train_rows == a.train_rows);
}

TEST_CASE("split is a partition of the source rows") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const std::size_t n = 10 + uniform_index(rng, 300);
    const Dataset d = random_dataset(n, seed);
    const Partition p = split(d, seed * 31 + 5);
    const Dataset parts[] = {p.train, p.val, p.test};
    CHECK(row_multiset(Dataset::concat(parts)) == row_multiset(d));
    std::vector<std::size_t> idx = p.train_rows;
    idx.insert(idx.end(), p.val_rows.begin(), p.val_rows.end());
    idx.insert(idx.end(), p.test_rows.begin(), p.test_rows.end());
    std::sort(idx.begin(), idx.end());
    for (std::size_t i = 0; i < n; ++i) REQUIRE(idx[i] == i);
    const auto [neg, pos] = p.train.class_counts();
    CHECK(neg > 0);
    CHECK(pos > 0);
  }
}

TEST_CASE("split rejects tiny and single-class inputs") {
  CHECK_THROWS(split(random_dataset(5, 1), 1));
  std::vector<double> cells;
  for (int r = 0; r < 50; ++r) cells.insert(cells.end(), {static_cast<double>(r), 0.0});
  CHECK_THROWS_AS(split(Dataset(two_column_schema(), cells), 1), DataError);
}

namespace {

// Category "a": 30 rows all positive; category "b": 90 rows all negative, so g = 0.25.
Dataset encoding_fixture() {
  Schema s({{"c", ColumnKind::multiclass, {"a", "b", "z"}}, {"y", ColumnKind::binary, {"0", "1"}}}, "y");
  std::vector<double> cells;
  for (int r = 0; r < 30; ++r) cells.insert(cells.end(), {0.0, 1.0});
  for (int r = 0; r < 90; ++r) cells.insert(cells.end(), {1.0, 0.0});
  return Dataset(s, cells);
}

}  // namespace

TEST_CASE("target encoding matches the smoothed category mean") {
  const Dataset train = encoding_fixture();
  const TargetEncoder enc(train, 10.0);
  CHECK(enc.global_mean() == doctest::Approx(0.25));
  CHECK(enc.value(0, 0) == doctest::Approx(0.8125).epsilon(1e-12));
  CHECK(enc.value(0, 1) == doctest::Approx((0.0 + 10.0 * 0.25) / 100.0).epsilon(1e-12));
  CHECK(enc.value(0, 2) == doctest::Approx(0.25).epsilon(1e-12));

  Schema s = train.schema();
  const Dataset unseen(s, {2.0, 0.0, 0.0, 1.0});
  const Dataset out = enc.apply(unseen);
  CHECK(out.schema().column(0).kind == ColumnKind::continuous);
  CHECK(out.at(0, 0) == doctest::Approx(0.25));
  CHECK(out.at(1, 0) == doctest::Approx(0.8125));
  CHECK(out.label(1) == 1);
}

TEST_CASE("target encoding tends to the global mean as smoothing grows") {
  const Dataset train = encoding_fixture();
  const TargetEncoder enc(train, 1e9);
  CHECK(enc.value(0, 0) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(enc.value(0, 1) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("target encoded values stay within [0,1] and no categorical features remain") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    Schema s({{"c", ColumnKind::multiclass, {"a", "b", "c", "d"}},
              {"s", ColumnKind::binary, {"m", "f"}},
              {"x", ColumnKind::continuous, {}},
              {"y", ColumnKind::binary, {"0", "1"}}},
             "y");
    std::vector<double> cells;
    for (int r = 0; r < 60; ++r)
      cells.insert(cells.end(), {static_cast<double>(uniform_index(rng, 4)), static_cast<double>(uniform_index(rng, 2)),
                                 standard_normal(rng), static_cast<double>(uniform_index(rng, 2))});
    const Dataset d(s, cells);
    const Dataset out = target_encode(d, d, 0.5 + uniform01(rng) * 20.0);
    CHECK_FALSE(out.schema().has_categorical_features());
    for (std::size_t r = 0; r < out.n_rows(); ++r)
      for (std::size_t c : {0, 1}) {
        CHECK(out.at(r, c) >= 0.0);
        CHECK(out.at(r, c) <= 1.0);
      }
  }
}

namespace {

Schema smote_schema() {
  return Schema({{"a", ColumnKind::continuous, {}}, {"b", ColumnKind::continuous, {}},
                 {"y", ColumnKind::binary, {"0", "1"}}},
                "y");
}

}  // namespace

TEST_CASE("smote synthetic points lie on the segment between the two minority rows") {
  std::vector<double> cells = {0.0, 0.0, 1.0, 1.0, 1.0, 1.0};
  Rng rng(5);
  for (int r = 0; r < 40; ++r) cells.insert(cells.end(), {standard_normal(rng), standard_normal(rng), 0.0});
  const Dataset out = smote_balance(Dataset(smote_schema(), cells), SmoteOptions{1, 0.5}, 9);
  std::size_t minority = 0;
  for (std::size_t r = 0; r < out.n_rows(); ++r) {
    if (out.label(r) != 1) continue;
    ++minority;
    CHECK(out.at(r, 0) == doctest::Approx(out.at(r, 1)));
    CHECK(out.at(r, 0) >= 0.0);
    CHECK(out.at(r, 0) <= 1.0);
  }
  CHECK(minority > 2);
}

TEST_CASE("smote rebalances a 492 / 284315 table to one third minority") {
  Rng rng(17);
  std::vector<double> cells;
  cells.reserve(3 * 284807);
  for (int r = 0; r < 284315; ++r) cells.insert(cells.end(), {standard_normal(rng), standard_normal(rng), 0.0});
  for (int r = 0; r < 492; ++r)
    cells.insert(cells.end(), {3.0 + standard_normal(rng), 3.0 + standard_normal(rng), 1.0});
  const Dataset out = smote_balance(Dataset(smote_schema(), std::move(cells)), SmoteOptions{}, 3);
  const auto [neg, pos] = out.class_counts();
  CHECK(std::abs(static_cast<double>(pos) - 0.5 * static_cast<double>(neg)) <= 1.0);
  const auto shares = class_share_report(out);
  CHECK(shares.at(1) == doctest::Approx(0.333).epsilon(0.002));
  CHECK(shares.at(0) == doctest::Approx(0.667).epsilon(0.002));
}

TEST_CASE("smote at the current ratio returns the input rows") {
  std::vector<double> cells;
  Rng rng(2);
  for (int r = 0; r < 30; ++r)
    cells.insert(cells.end(), {standard_normal(rng), standard_normal(rng), r % 3 == 0 ? 1.0 : 0.0});
  const Dataset d(smote_schema(), cells);
  const Dataset out = smote_balance(d, SmoteOptions{5, 0.5}, 1);
  CHECK(row_multiset(out) == row_multiset(d));
}

TEST_CASE("smote is deterministic and rejects bad inputs") {
  std::vector<double> cells;
  Rng rng(4);
  for (int r = 0; r < 60; ++r)
    cells.insert(cells.end(), {standard_normal(rng), standard_normal(rng), r % 10 == 0 ? 1.0 : 0.0});
  const Dataset d(smote_schema(), cells);
  CHECK(smote_balance(d, {}, 8) == smote_balance(d, {}, 8));
  CHECK_THROWS_AS(smote_balance(d, SmoteOptions{6, 0.5}, 1), ConfigError);
  Schema cat({{"c", ColumnKind::binary, {"p", "q"}}, {"y", ColumnKind::binary, {"0", "1"}}}, "y");
  CHECK_THROWS_AS(smote_balance(Dataset(cat, {0, 1, 1, 1, 0, 0, 1, 0, 0, 0, 1, 0}), {1, 0.5}, 1), DataError);
}
