// goatmix command-line front end.
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 degenerate run (outputs are still written).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "goatmix/cgoat.hpp"
#include "goatmix/errors.hpp"
#include "goatmix/experiment.hpp"
#include "goatmix/io.hpp"
#include "goatmix/metrics.hpp"
#include "goatmix/sgoat.hpp"
#include "goatmix/stats.hpp"
#include "goatmix/synthesizer.hpp"

namespace fs = std::filesystem;
using namespace goatmix;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDegenerate = 4;

struct CommonOptions {
  std::string data;
  std::string schema;
  std::uint64_t seed = 0;
  std::size_t rows = 0;
  std::string encode = "none";
  std::string balance = "none";
  std::size_t max_rows = 50000;
  std::string out = "goatmix-out";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--data", o.data, "CSV path or builtin:<name>[:<rows>]")->required();
  cmd->add_option("--schema", o.schema, "schema config (JSON)");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--rows", o.rows, "synthetic rows per evaluation (0 = |train|)");
  cmd->add_option("--encode", o.encode, "categorical encoding")->check(CLI::IsMember({"target", "none"}));
  cmd->add_option("--balance", o.balance, "class balancing")->check(CLI::IsMember({"smote", "none"}));
  cmd->add_option("--max-rows", o.max_rows, "seeded subsample cap on the source table");
  cmd->add_option("--out", o.out, "output directory");
}

ExperimentConfig base_config(const CommonOptions& o) {
  ExperimentConfig cfg;
  cfg.data = o.data;
  cfg.schema = o.schema;
  cfg.seed = o.seed;
  cfg.rows = o.rows;
  cfg.target_encode = o.encode == "target";
  cfg.smote = o.balance == "smote";
  cfg.max_rows = o.max_rows;
  return cfg;
}

int run_ingest(const CommonOptions& o) {
  const ExperimentConfig cfg = base_config(o);
  const Dataset d = prepare_dataset(cfg);
  const fs::path dir = o.out;
  write_csv(d, dir / "dataset.csv");
  write_json(schema_to_json(d.schema()), dir / "schema.json");
  const auto shares = class_share_report(d);
  Json summary{{"source", o.data}, {"rows", d.n_rows()}, {"columns", Json::array()},
               {"class_shares", Json{{"0", shares.at(0)}, {"1", shares.at(1)}}}};
  for (const auto& c : d.schema().columns())
    summary["columns"].push_back(Json{{"name", c.name}, {"kind", std::string(to_string(c.kind))}});
  write_json(summary, dir / "summary.json");
  std::cout << d.n_rows() << " rows, " << d.n_cols() << " columns -> " << dir.string() << "\n";
  return 0;
}

int run_sgoat_cmd(const CommonOptions& o, const std::string& method, std::size_t k, std::size_t patience) {
  const ExperimentConfig cfg = base_config(o);
  const Dataset d = prepare_dataset(cfg);
  const Partition part = prepare_partition(d, cfg.target_encode, cfg.smoothing, derive_seed(o.seed, "split"));
  SgoatConfig sc;
  sc.method = parse_method(method);
  sc.max_iterations = k;
  sc.patience = patience;
  sc.rows = o.rows;
  sc.seed = derive_seed(o.seed, "sgoat");
  const SgoatResult r = run_sgoat(sc, part);

  const fs::path dir = o.out;
  const FittedSynthesizer best = fit(sc.method, part.train, r.best_theta, r.best_fit_seed);
  write_json(best.to_json(), dir / "synthesizer.json");
  write_text(r.history.to_jsonl(), dir / "trials.jsonl");
  write_json(Json{{"method", method},
                  {"best_theta", point_to_json(r.best_theta)},
                  {"best_val_auc", -r.best_val_loss},
                  {"best_val_loss", r.best_val_loss},
                  {"iterations_run", r.iterations_run},
                  {"degenerate", r.degenerate}},
             dir / "result.json");
  std::cout << method << ": best validation AUC " << -r.best_val_loss << " after " << r.iterations_run
            << " trials, theta " << to_string(r.best_theta) << "\n";
  return r.degenerate ? kExitDegenerate : 0;
}

int run_cgoat_cmd(const CommonOptions& o, std::size_t k, std::size_t patience) {
  const ExperimentConfig cfg = base_config(o);
  const Dataset d = prepare_dataset(cfg);
  const Partition part = prepare_partition(d, cfg.target_encode, cfg.smoothing, derive_seed(o.seed, "split"));
  GeneratorSet generators;
  for (std::size_t i = 0; i < kAllMethods.size(); ++i) {
    const Method m = kAllMethods[i];
    generators.push_back(
        std::make_shared<FittedSynthesizer>(fit(m, part.train, default_theta(m), derive_seed(o.seed, "fit", i))));
  }
  CgoatConfig cc;
  cc.max_iterations = k;
  cc.patience = patience;
  cc.rows = o.rows;
  cc.seed = derive_seed(o.seed, "cgoat");
  const CgoatResult r = run_cgoat(cc, generators, part);

  const fs::path dir = o.out;
  Json weights = Json::object();
  for (std::size_t i = 0; i < kAllMethods.size(); ++i)
    weights[std::string(to_string(kAllMethods[i]))] = r.best_alpha.alpha[i];
  write_json(Json{{"alpha", weights},
                  {"best_val_auc", -r.best_val_loss},
                  {"individual_val_auc", r.individual_auc},
                  {"iterations_run", r.iterations_run},
                  {"degenerate", r.degenerate}},
             dir / "weights.json");
  write_csv(r.best_synthetic, dir / "synthetic.csv");
  write_text(r.history.to_jsonl(), dir / "trials.jsonl");
  std::cout << "mixture: best validation AUC " << -r.best_val_loss << ", alpha " << weights.dump() << "\n";
  return r.degenerate ? kExitDegenerate : 0;
}

int run_experiment_cmd(ExperimentConfig cfg, const std::string& out) {
  const ExperimentOutput result = run_experiment(cfg);
  write_experiment(result, out);
  std::cout << render_report(result.report);
  return result.degenerate ? kExitDegenerate : 0;
}

int run_report(const std::string& in, const std::string& out) {
  const std::string text = render_report(read_json(in));
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(text, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supervised tuning and mixing of tabular synthetic-data generators"};
  app.require_subcommand(1);

  CommonOptions ingest_opts, sgoat_opts, cgoat_opts, exp_opts;
  std::string method = "gaussian_copula";
  std::size_t k_sgoat = 350, patience_sgoat = 10, k_cgoat = 150, patience_cgoat = 15, repeats = 10;
  std::string report_in, report_out;

  auto* ingest = app.add_subcommand("ingest", "validate a dataset and write a normalized bundle");
  add_common(ingest, ingest_opts);

  auto* sgoat = app.add_subcommand("sgoat", "tune one synthesizer against validation AUC");
  add_common(sgoat, sgoat_opts);
  sgoat->add_option("--method", method, "gaussian_copula | joint_mixture | histogram | kde_perturb");
  sgoat->add_option("--k-sgoat", k_sgoat, "trial budget");
  sgoat->add_option("--patience-sgoat", patience_sgoat, "early-stopping window");

  auto* cgoat = app.add_subcommand("cgoat", "learn mixture weights over the default synthesizers");
  add_common(cgoat, cgoat_opts);
  cgoat->add_option("--k-cgoat", k_cgoat, "trial budget");
  cgoat->add_option("--patience-cgoat", patience_cgoat, "early-stopping window");

  auto* experiment = app.add_subcommand("experiment", "run the full repeated protocol");
  add_common(experiment, exp_opts);
  experiment->add_option("--repeats", repeats, "independent splits");
  experiment->add_option("--k-sgoat", k_sgoat, "S-GOAT trial budget");
  experiment->add_option("--patience-sgoat", patience_sgoat, "S-GOAT early-stopping window");
  experiment->add_option("--k-cgoat", k_cgoat, "C-GOAT trial budget");
  experiment->add_option("--patience-cgoat", patience_cgoat, "C-GOAT early-stopping window");

  auto* report = app.add_subcommand("report", "re-render a saved report.json");
  report->add_option("--in", report_in, "report.json path")->required();
  report->add_option("--out", report_out, "write text here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*ingest) return run_ingest(ingest_opts);
    if (*sgoat) return run_sgoat_cmd(sgoat_opts, method, k_sgoat, patience_sgoat);
    if (*cgoat) return run_cgoat_cmd(cgoat_opts, k_cgoat, patience_cgoat);
    if (*experiment) {
      ExperimentConfig cfg = base_config(exp_opts);
      cfg.repeats = repeats;
      cfg.k_sgoat = k_sgoat;
      cfg.patience_sgoat = patience_sgoat;
      cfg.k_cgoat = k_cgoat;
      cfg.patience_cgoat = patience_cgoat;
      return run_experiment_cmd(cfg, exp_opts.out);
    }
    if (*report) return run_report(report_in, report_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
