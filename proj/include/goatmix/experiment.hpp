#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "goatmix/gbdt.hpp"
#include "goatmix/io.hpp"
#include "goatmix/preprocess.hpp"

namespace goatmix {

struct ExperimentConfig {
  std::string data;    // CSV path or "builtin:<name>[:<rows>]"
  std::string schema;  // schema config path; optional
  bool target_encode = false;
  double smoothing = 10.0;
  bool smote = false;
  SmoteOptions smote_options;
  std::size_t repeats = 10;
  std::size_t k_sgoat = 350;
  std::size_t patience_sgoat = 10;
  std::size_t k_cgoat = 150;
  std::size_t patience_cgoat = 15;
  std::size_t rows = 0;  // synthetic rows; 0 means |train|
  std::size_t max_rows = 50000;
  std::uint64_t seed = 0;
  /// Worker cap; 0 reads GOATMIX_THREADS, falling back to the hardware count.
  std::size_t threads = 0;
  GbdtConfig classifier;

  void validate() const;
  Json to_json() const;
};

/// Loads the source table, subsamples it to max_rows with a seeded draw and
/// applies SMOTE when enabled. SMOTE needs an all-continuous feature set.
Dataset prepare_dataset(const ExperimentConfig& cfg);

/// Splits and, when enabled, target-encodes all three parts with statistics
/// from the training part.
Partition prepare_partition(const Dataset& d, bool target_encode, double smoothing, std::uint64_t seed);

struct ExperimentOutput {
  Json report;
  std::string aucs_csv;
  std::map<std::string, std::string> trial_logs;  // file name -> JSONL
  /// Some reported evaluation trained on single-class synthetic data.
  bool degenerate = false;
};

/// Runs the whole protocol: per repeat a fresh split, the real-data baseline,
/// each synthesizer untuned and tuned, and the mixture over untuned and over
/// tuned synthesizers (the latter being SC-GOAT). Aggregates test AUCs with
/// one-sided paired t-tests against SC-GOAT. Repeats run in parallel and the
/// result depends only on the config.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

/// Writes report.json, report.txt, aucs.csv and trials/*.jsonl under `dir`.
void write_experiment(const ExperimentOutput& out, const std::filesystem::path& dir);

/// Plain-text tables of a report produced by run_experiment.
std::string render_report(const Json& report);

/// Per-column fidelity of `synthetic` against `real`: KS statistic for
/// continuous columns, chi-square statistic and p-value for categorical ones.
Json fidelity_table(const Dataset& real, const Dataset& synthetic);

/// Worker count from GOATMIX_THREADS (invalid or unset means hardware concurrency).
std::size_t worker_threads();

}  // namespace goatmix
