#include "goatmix/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "goatmix/cgoat.hpp"
#include "goatmix/errors.hpp"
#include "goatmix/metrics.hpp"
#include "goatmix/sgoat.hpp"
#include "goatmix/standin.hpp"
#include "goatmix/stats.hpp"
#include "goatmix/synthesizer.hpp"

namespace goatmix {
namespace {

constexpr int kReportVersion = 1;
constexpr std::string_view kMixture = "mixture";

/// JSON has no infinities; they are written as strings.
Json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

struct Entry {
  std::string setup;
  std::string method;
  double val_auc = 0.5;
  double test_auc = 0.5;
  bool degenerate = false;
  double positive_share = 0.0;
  Json fidelity;
};

struct RepeatResult {
  std::vector<Entry> entries;
  std::vector<double> alpha_untuned, alpha_tuned;
  Json thetas = Json::object();
  std::map<std::string, std::string> logs;
};

Entry make_entry(std::string setup, std::string method) {
  Entry e;
  e.setup = std::move(setup);
  e.method = std::move(method);
  return e;
}

void score_on_test(Entry& e, const Dataset& synthetic, const Partition& part, const GbdtConfig& classifier) {
  const EvalResult ev = evaluate_utility(synthetic, part.test, classifier);
  e.test_auc = ev.auc;
  e.degenerate = ev.degenerate;
  e.positive_share = synthetic.empty() ? 0.0 : class_share_report(synthetic).at(1);
  e.fidelity = fidelity_table(part.train, synthetic);
}

RepeatResult run_repeat(const ExperimentConfig& cfg, const Dataset& data, std::size_t r) {
  const std::uint64_t seed = derive_seed(cfg.seed, "repeat", r);
  const Partition part = prepare_partition(data, cfg.target_encode, cfg.smoothing, derive_seed(seed, "split"));
  const std::size_t rows = cfg.rows ? cfg.rows : part.train.n_rows();
  const std::string tag = "r" + std::to_string(r);
  RepeatResult out;

  Entry baseline = make_entry("real", "baseline");
  baseline.val_auc = evaluate_utility(part.train, part.val, cfg.classifier).auc;
  score_on_test(baseline, part.train, part, cfg.classifier);
  out.entries.push_back(std::move(baseline));

  GeneratorSet untuned, tuned;
  std::vector<double> tuned_val;
  for (std::size_t i = 0; i < kAllMethods.size(); ++i) {
    const Method m = kAllMethods[i];
    untuned.push_back(std::make_shared<FittedSynthesizer>(
        fit(m, part.train, default_theta(m), derive_seed(seed, "untuned-fit", i))));

    SgoatConfig sc;
    sc.method = m;
    sc.max_iterations = cfg.k_sgoat;
    sc.patience = cfg.patience_sgoat;
    sc.rows = rows;
    sc.seed = derive_seed(seed, "sgoat", i);
    sc.classifier = cfg.classifier;
    const SgoatResult sr = run_sgoat(sc, part);
    tuned.push_back(std::make_shared<FittedSynthesizer>(fit(m, part.train, sr.best_theta, sr.best_fit_seed)));
    tuned_val.push_back(-sr.best_val_loss);
    out.thetas[std::string(to_string(m))] = point_to_json(sr.best_theta);
    out.logs[tag + "_sgoat_" + std::string(to_string(m)) + ".jsonl"] = sr.history.to_jsonl();
  }

  CgoatConfig cc;
  cc.max_iterations = cfg.k_cgoat;
  cc.patience = cfg.patience_cgoat;
  cc.rows = rows;
  cc.resample_final = true;
  cc.classifier = cfg.classifier;

  cc.seed = derive_seed(seed, "cgoat-untuned");
  const CgoatResult cu = run_cgoat(cc, untuned, part);
  cc.seed = derive_seed(seed, "cgoat-tuned");
  cc.individual_auc = tuned_val;
  const CgoatResult ct = run_cgoat(cc, tuned, part);
  out.logs[tag + "_cgoat_untuned.jsonl"] = cu.history.to_jsonl();
  out.logs[tag + "_cgoat_tuned.jsonl"] = ct.history.to_jsonl();
  out.alpha_untuned = cu.best_alpha.alpha;
  out.alpha_tuned = ct.best_alpha.alpha;

  for (int pass = 0; pass < 2; ++pass) {
    const bool is_tuned = pass == 1;
    const GeneratorSet& set = is_tuned ? tuned : untuned;
    for (std::size_t i = 0; i < set.size(); ++i) {
      Entry e = make_entry(is_tuned ? "tuned" : "untuned", std::string(to_string(kAllMethods[i])));
      e.val_auc = is_tuned ? tuned_val[i] : cu.individual_auc[i];
      score_on_test(e, set[i]->sample(rows, derive_seed(seed, is_tuned ? "tuned-test" : "untuned-test", i)), part,
                    cfg.classifier);
      out.entries.push_back(std::move(e));
    }
    const CgoatResult& c = is_tuned ? ct : cu;
    Entry mix = make_entry(is_tuned ? "tuned" : "untuned", std::string(kMixture));
    mix.val_auc = -c.best_val_loss;
    score_on_test(mix, c.best_synthetic, part, cfg.classifier);
    out.entries.push_back(std::move(mix));
  }
  return out;
}

/// Mean of every numeric field per column over the runs where it is present.
Json mean_fidelity(const std::vector<const Json*>& tables) {
  Json out = Json::object();
  if (tables.empty()) return out;
  for (const auto& [column, first] : tables.front()->items()) {
    Json col = Json::object();
    col["test"] = first.at("test");
    for (const auto& [field, value] : first.items()) {
      if (field == "test") continue;
      double sum = 0.0;
      std::size_t count = 0;
      for (const Json* t : tables) {
        const Json& v = t->at(column).at(field);
        if (v.is_number()) {
          sum += v.get<double>();
          ++count;
        }
      }
      col[field] = count ? Json(sum / static_cast<double>(count)) : Json(nullptr);
    }
    out[column] = std::move(col);
  }
  return out;
}

Json weights_object(const std::vector<double>& alpha) {
  Json o = Json::object();
  for (std::size_t i = 0; i < alpha.size(); ++i) o[std::string(to_string(kAllMethods[i]))] = alpha[i];
  return o;
}

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "n/a";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string json_fixed(const Json& v, int digits) {
  if (v.is_number()) return fixed(v.get<double>(), digits);
  if (v.is_string()) return v.get<std::string>();
  return "n/a";
}

}  // namespace

void ExperimentConfig::validate() const {
  if (data.empty()) throw ConfigError("no dataset given");
  if (repeats < 1) throw ConfigError("repeats must be at least 1");
  if (k_sgoat < 1 || k_cgoat < 1) throw ConfigError("iteration budgets must be at least 1");
  if (patience_sgoat < 1 || patience_cgoat < 1) throw ConfigError("patience must be at least 1");
  if (!(smoothing > 0.0)) throw ConfigError("target-encoding smoothing must be positive");
  if (max_rows < 10) throw ConfigError("max_rows must be at least 10");
  if (!(smote_options.target_ratio > 0.0 && smote_options.target_ratio <= 1.0))
    throw ConfigError("SMOTE target ratio must be in (0, 1]");
}

Json ExperimentConfig::to_json() const {
  return Json{{"data", data},
              {"schema", schema},
              {"encode", target_encode ? "target" : "none"},
              {"smoothing", smoothing},
              {"balance", smote ? "smote" : "none"},
              {"smote_k", smote_options.k_neighbors},
              {"smote_ratio", smote_options.target_ratio},
              {"repeats", repeats},
              {"k_sgoat", k_sgoat},
              {"patience_sgoat", patience_sgoat},
              {"k_cgoat", k_cgoat},
              {"patience_cgoat", patience_cgoat},
              {"rows", rows},
              {"max_rows", max_rows},
              {"seed", seed}};
}

std::size_t worker_threads() {
  if (const char* env = std::getenv("GOATMIX_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Dataset prepare_dataset(const ExperimentConfig& cfg) {
  Dataset d;
  if (is_builtin(cfg.data)) {
    d = make_builtin(cfg.data, derive_seed(cfg.seed, "builtin"));
  } else {
    if (cfg.schema.empty()) throw ConfigError("a CSV dataset needs a schema config (--schema)");
    d = load_csv(cfg.data, read_schema_hint(cfg.schema));
  }
  if (d.n_rows() > cfg.max_rows) {
    std::vector<std::size_t> rows(d.n_rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.seed, "subsample"));
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(cfg.max_rows);
    std::sort(rows.begin(), rows.end());
    d = d.select_rows(rows);
  }
  if (cfg.smote) {
    if (d.schema().has_categorical_features())
      throw ConfigError("SMOTE needs all-continuous features; this dataset has categorical columns");
    d = smote_balance(d, cfg.smote_options, derive_seed(cfg.seed, "smote"));
  }
  return d;
}

Partition prepare_partition(const Dataset& d, bool target_encode, double smoothing, std::uint64_t seed) {
  Partition p = split(d, seed);
  if (target_encode) {
    const TargetEncoder enc(p.train, smoothing);
    p.train = enc.apply(p.train);
    p.val = enc.apply(p.val);
    p.test = enc.apply(p.test);
  }
  return p;
}

Json fidelity_table(const Dataset& real, const Dataset& synthetic) {
  Json out = Json::object();
  for (std::size_t c = 0; c < real.n_cols(); ++c) {
    const auto& col = real.schema().column(c);
    const auto x = real.column(c);
    const auto y = synthetic.column(c);
    if (y.empty()) {
      out[col.name] = Json{{"test", col.is_categorical() ? "cs" : "ks"}};
      continue;
    }
    if (!col.is_categorical()) {
      out[col.name] = Json{{"test", "ks"}, {"statistic", ks_statistic(x, y)}};
      continue;
    }
    try {
      const auto cs = cs_statistic(x, y, col.categories.size());
      out[col.name] = Json{{"test", "cs"}, {"chi2", cs.chi2}, {"p", cs.p}};
    } catch (const DataError&) {
      out[col.name] = Json{{"test", "cs"}, {"chi2", nullptr}, {"p", nullptr}};
    }
  }
  return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Dataset data = prepare_dataset(cfg);

  std::vector<RepeatResult> runs(cfg.repeats);
  std::vector<std::exception_ptr> errors(cfg.repeats);
  const std::size_t workers = std::min(cfg.threads ? cfg.threads : worker_threads(), cfg.repeats);
  auto work = [&](std::size_t first) {
    for (std::size_t r = first; r < cfg.repeats; r += workers) {
      try {
        runs[r] = run_repeat(cfg, data, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ExperimentOutput out;
  Json& report = out.report;
  report["format_version"] = kReportVersion;
  report["config"] = cfg.to_json();
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(cfg.classifier.fingerprint()));
  report["classifier_fingerprint"] = fp;

  std::map<std::string, std::size_t> kinds{{"continuous", 0}, {"binary", 0}, {"multiclass", 0}};
  for (std::size_t c : data.schema().feature_indices()) ++kinds[std::string(to_string(data.schema().column(c).kind))];
  const auto shares = class_share_report(data);
  report["dataset"] = Json{{"source", cfg.data},
                           {"rows", data.n_rows()},
                           {"features", data.n_cols() - 1},
                           {"label", data.schema().label()},
                           {"continuous", kinds["continuous"]},
                           {"binary", kinds["binary"]},
                           {"multiclass", kinds["multiclass"]},
                           {"class_shares", Json{{"0", shares.at(0)}, {"1", shares.at(1)}}}};

  const std::size_t n_entries = runs.front().entries.size();
  const std::size_t sc_index = n_entries - 1;  // tuned mixture
  auto test_aucs = [&](std::size_t i) {
    std::vector<double> v;
    for (const auto& run : runs) v.push_back(run.entries[i].test_auc);
    return v;
  };
  const auto sc = test_aucs(sc_index);

  std::ostringstream csv;
  csv << "repeat,setup,method,val_auc,test_auc,degenerate\n";
  for (std::size_t r = 0; r < runs.size(); ++r)
    for (const auto& e : runs[r].entries)
      csv << r << ',' << e.setup << ',' << e.method << ',' << format_double(e.val_auc) << ','
          << format_double(e.test_auc) << ',' << (e.degenerate ? 1 : 0) << '\n';
  out.aucs_csv = csv.str();

  Json results = Json::array();
  Json fidelity = Json::object();
  for (std::size_t i = 0; i < n_entries; ++i) {
    const auto& proto = runs.front().entries[i];
    const auto test = test_aucs(i);
    std::vector<double> val;
    std::vector<const Json*> tables;
    std::size_t degenerate = 0;
    double share = 0.0;
    for (const auto& run : runs) {
      const auto& e = run.entries[i];
      val.push_back(e.val_auc);
      tables.push_back(&e.fidelity);
      degenerate += e.degenerate ? 1 : 0;
      share += e.positive_share / static_cast<double>(runs.size());
    }
    out.degenerate = out.degenerate || degenerate > 0;
    const auto ts = mean_sd(test);
    const auto vs = mean_sd(val);
    Json row{{"setup", proto.setup},
             {"method", i == sc_index ? "sc_goat" : proto.method},
             {"test_auc", Json{{"mean", ts.mean}, {"sd", ts.sd}}},
             {"val_auc", Json{{"mean", vs.mean}, {"sd", vs.sd}}}};
    if (i != sc_index && runs.size() >= 2) {
      const auto tt = paired_t_test(sc, test);
      row["t_vs_sc_goat"] = number(tt.t);
      row["p_vs_sc_goat"] = number(tt.p);
    } else {
      row["t_vs_sc_goat"] = nullptr;
      row["p_vs_sc_goat"] = nullptr;
    }
    row["degenerate_runs"] = degenerate;
    row["positive_share"] = share;
    row["runs"] = test;
    results.push_back(std::move(row));
    fidelity[proto.setup + "/" + (i == sc_index ? std::string("sc_goat") : proto.method)] = mean_fidelity(tables);
  }
  report["results"] = std::move(results);

  Json alpha{{"untuned", Json::array()}, {"tuned", Json::array()}};
  Json thetas = Json::array();
  for (const auto& run : runs) {
    alpha["untuned"].push_back(weights_object(run.alpha_untuned));
    alpha["tuned"].push_back(weights_object(run.alpha_tuned));
    thetas.push_back(run.thetas);
  }
  report["alpha"] = std::move(alpha);
  report["tuned_theta"] = std::move(thetas);
  report["fidelity"] = std::move(fidelity);
  report["degenerate"] = out.degenerate;

  for (const auto& run : runs)
    for (const auto& [name, text] : run.logs) out.trial_logs[name] = text;
  return out;
}

void write_experiment(const ExperimentOutput& out, const std::filesystem::path& dir) {
  write_json(out.report, dir / "report.json");
  write_text(render_report(out.report), dir / "report.txt");
  write_text(out.aucs_csv, dir / "aucs.csv");
  for (const auto& [name, text] : out.trial_logs) write_text(text, dir / "trials" / name);
}

std::string render_report(const Json& report) {
  if (!report.contains("format_version") || report.at("format_version").get<int>() != kReportVersion)
    throw ConfigError("not a report written by this version");
  std::ostringstream os;
  const Json& ds = report.at("dataset");
  os << "dataset " << ds.at("source").get<std::string>() << ": " << ds.at("rows").get<std::size_t>() << " rows, "
     << ds.at("features").get<std::size_t>() << " features, label " << ds.at("label").get<std::string>()
     << " (positive share " << fixed(ds.at("class_shares").at("1").get<double>(), 4) << ")\n";
  os << "repeats " << report.at("config").at("repeats").get<std::size_t>() << ", seed "
     << report.at("config").at("seed").get<std::uint64_t>() << "\n\n";

  char line[256];
  std::snprintf(line, sizeof line, "%-8s %-16s %9s %7s %9s %9s %8s %10s\n", "setup", "method", "test_auc", "sd",
                "t", "p", "val_auc", "degenerate");
  os << line;
  for (const auto& row : report.at("results")) {
    std::snprintf(line, sizeof line, "%-8s %-16s %9s %7s %9s %9s %8s %10zu\n",
                  row.at("setup").get<std::string>().c_str(), row.at("method").get<std::string>().c_str(),
                  fixed(row.at("test_auc").at("mean").get<double>(), 4).c_str(),
                  fixed(row.at("test_auc").at("sd").get<double>(), 4).c_str(),
                  json_fixed(row.at("t_vs_sc_goat"), 3).c_str(), json_fixed(row.at("p_vs_sc_goat"), 4).c_str(),
                  fixed(row.at("val_auc").at("mean").get<double>(), 4).c_str(),
                  row.at("degenerate_runs").get<std::size_t>());
    os << line;
  }

  os << "\nmixture weights (mean over repeats)\n";
  for (const char* setup : {"untuned", "tuned"}) {
    const Json& runs = report.at("alpha").at(setup);
    os << "  " << setup << ":";
    if (!runs.empty()) {
      for (const auto& [name, first] : runs.front().items()) {
        double sum = 0.0;
        for (const auto& r : runs) sum += r.at(name).get<double>();
        os << ' ' << name << '=' << fixed(sum / static_cast<double>(runs.size()), 3);
      }
    }
    os << '\n';
  }
  if (report.at("degenerate").get<bool>()) os << "\nwarning: some synthetic training sets held a single class\n";
  return os.str();
}

}  // namespace goatmix
