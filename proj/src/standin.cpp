#include "goatmix/standin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "goatmix/errors.hpp"
#include "goatmix/random.hpp"

namespace goatmix {
namespace {

constexpr std::string_view kPrefix = "builtin:";

std::size_t pick(Rng& rng, const std::vector<double>& weights) {
  return std::discrete_distribution<std::size_t>(weights.begin(), weights.end())(rng);
}

/// Exactly round(rate * n) positives in shuffled positions.
std::vector<int> draw_labels(std::size_t n, double rate, Rng& rng) {
  const auto pos = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
  std::vector<int> y(n, 0);
  std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(std::min(pos, n)), 1);
  std::shuffle(y.begin(), y.end(), rng);
  return y;
}

}  // namespace

Dataset make_adult_like(std::size_t n, std::uint64_t seed) {
  Schema schema({{"age", ColumnKind::continuous, {}},
                 {"workclass", ColumnKind::multiclass, {"private", "self-emp", "gov", "other"}},
                 {"education", ColumnKind::multiclass, {"hs", "some-college", "bachelors", "masters", "doctorate"}},
                 {"marital-status", ColumnKind::multiclass, {"married", "never-married", "divorced"}},
                 {"sex", ColumnKind::binary, {"Female", "Male"}},
                 {"capital-gain", ColumnKind::continuous, {}},
                 {"hours-per-week", ColumnKind::continuous, {}},
                 {"education-num", ColumnKind::continuous, {}},
                 {"income", ColumnKind::binary, {"<=50K", ">50K"}}},
                "income");
  Rng rng(derive_seed(seed, "adult-like"));
  const auto y = draw_labels(n, 0.24, rng);
  std::vector<double> cells;
  cells.reserve(n * schema.size());
  for (std::size_t r = 0; r < n; ++r) {
    const bool pos = y[r] == 1;
    const double age = std::clamp(std::round(38.0 + (pos ? 6.0 : 0.0) + 12.0 * standard_normal(rng)), 17.0, 90.0);
    const auto work = pick(rng, pos ? std::vector<double>{0.6, 0.2, 0.15, 0.05} : std::vector<double>{0.72, 0.1, 0.12, 0.06});
    const auto edu = pick(rng, pos ? std::vector<double>{0.2, 0.22, 0.33, 0.18, 0.07} : std::vector<double>{0.5, 0.27, 0.16, 0.05, 0.02});
    const auto marital = pick(rng, pos ? std::vector<double>{0.82, 0.08, 0.1} : std::vector<double>{0.35, 0.43, 0.22});
    const double sex = uniform01(rng) < (pos ? 0.85 : 0.6) ? 1.0 : 0.0;
    const double gain = uniform01(rng) < (pos ? 0.2 : 0.03) ? std::round(std::exp(8.0 + standard_normal(rng))) : 0.0;
    const double hours = std::clamp(std::round(40.0 + (pos ? 5.0 : 0.0) + 10.0 * standard_normal(rng)), 1.0, 99.0);
    const double edu_num = 9.0 + 2.0 * static_cast<double>(edu) + std::round(standard_normal(rng));
    cells.insert(cells.end(), {age, static_cast<double>(work), static_cast<double>(edu), static_cast<double>(marital),
                               sex, gain, hours, edu_num, static_cast<double>(y[r])});
  }
  return Dataset(std::move(schema), std::move(cells));
}

Dataset make_credit_like(std::size_t n, double positive_rate, std::uint64_t seed) {
  if (!(positive_rate > 0.0 && positive_rate < 1.0)) throw ConfigError("positive_rate must be in (0, 1)");
  std::vector<ColumnSchema> columns;
  for (int i = 1; i <= 10; ++i) columns.push_back({"V" + std::to_string(i), ColumnKind::continuous, {}});
  columns.push_back({"Amount", ColumnKind::continuous, {}});
  columns.push_back({"Class", ColumnKind::binary, {"0", "1"}});
  Schema schema(std::move(columns), "Class");
  const std::vector<double> shift = {-2.5, 2.0, -3.0, 2.5, -1.0, -1.0, -2.0, 0.5, -1.5, -2.0};

  Rng rng(derive_seed(seed, "credit-like"));
  const auto y = draw_labels(n, positive_rate, rng);
  std::vector<double> cells;
  cells.reserve(n * schema.size());
  for (std::size_t r = 0; r < n; ++r) {
    const bool pos = y[r] == 1;
    for (std::size_t i = 0; i < shift.size(); ++i)
      cells.push_back((pos ? shift[i] : 0.0) + (pos ? 1.6 : 1.0) * standard_normal(rng));
    cells.push_back(std::round(100.0 * std::exp((pos ? 4.5 : 3.5) + 1.2 * standard_normal(rng))) / 100.0);
    cells.push_back(static_cast<double>(y[r]));
  }
  return Dataset(std::move(schema), std::move(cells));
}

bool is_builtin(std::string_view data) { return data.substr(0, kPrefix.size()) == kPrefix; }

std::vector<std::string> builtin_names() { return {"adult-like", "credit-like", "credit-balanced-like"}; }

Dataset make_builtin(std::string_view spec, std::uint64_t seed) {
  if (!is_builtin(spec)) throw ConfigError("not a builtin dataset: " + std::string(spec));
  std::string_view name = spec.substr(kPrefix.size());
  std::size_t rows = 0;
  if (const auto colon = name.find(':'); colon != std::string_view::npos) {
    const std::string count(name.substr(colon + 1));
    std::size_t used = 0;
    try {
      rows = std::stoul(count, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != count.size() || rows == 0) throw ConfigError("bad builtin row count '" + count + "'");
    name = name.substr(0, colon);
  }
  if (name == "adult-like") return make_adult_like(rows ? rows : 5000, seed);
  if (name == "credit-like") return make_credit_like(rows ? rows : 50000, 0.0018, seed);
  if (name == "credit-balanced-like") return make_credit_like(rows ? rows : 5000, 1.0 / 3.0, seed);
  throw ConfigError("unknown builtin dataset '" + std::string(name) + "'");
}

}  // namespace goatmix
