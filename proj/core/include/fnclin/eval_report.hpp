#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fnclin/scenario_data.hpp"
#include "fnclin/system_model.hpp"

namespace fnclin {

struct Metrics {
  double mae_mw = 0.0;
  double mre_pct = 0.0;
  double max_signed_error_pu = 0.0;
  double over_predictions = 0.0;  // count of pred > label; averaged in aggregates
  bool operator==(const Metrics&) const = default;
};

/// MAE in MW, MRE in percent of the true label, max of (pred - label) in pu.
/// Throws ValidationError on length mismatch, empty input or a zero label.
Metrics metrics(std::span<const double> predictions, std::span<const double> labels,
                double s_base_mva);

struct ExperimentConfig {
  std::filesystem::path model;
  std::vector<std::filesystem::path> datasets;
  int trials = 10;
  int segments = 3;
  int hidden = 10;
  std::vector<std::uint64_t> seeds;  // one per trial; empty derives 1..trials
  std::size_t train_count = 0;
  std::uint64_t split_seed = 7;
  int baseline_segments = 40;
  int restarts = 10;
  int max_iters = 50;
  int jobs = 1;

  void validate() const;
};

/// `key = value` lines; `datasets` takes a space-separated list and may be
/// repeated. Relative paths resolve against the config file's directory.
ExperimentConfig read_experiment_config(const std::filesystem::path& path);

struct TrialResult {
  std::uint64_t seed = 0;
  Metrics test;
  double train_max_signed_error_pu = 0.0;
  double train_seconds = 0.0;
};

struct DatasetResult {
  std::string name;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::vector<TrialResult> trials;
  Metrics proposed_mean;
  double proposed_mae_std_mw = 0.0;
  double proposed_train_max_signed_error_pu = 0.0;  // worst over trials
  Metrics baseline;
  double baseline_train_max_signed_error_pu = 0.0;
  double baseline_seconds = 0.0;

  double proposed_mae_cv() const;
};

struct EvalReport {
  std::vector<DatasetResult> datasets;
  int trials = 0;
  int segments = 0;
  int hidden = 0;
  int baseline_segments = 0;
  double s_base_mva = 0.0;

  Metrics proposed_average() const;
  Metrics baseline_average() const;
  double proposed_train_seconds() const;
  double baseline_train_seconds() const;
};

struct NamedDataset {
  std::string name;
  LabeledDataset data;
};

/// Runs the protocol on in-memory datasets: split once per dataset, train and
/// test the proposed model for each trial seed, train the baseline once.
EvalReport run_experiment(const SystemModel& model, std::span<const NamedDataset> datasets,
                          const ExperimentConfig& config);
/// Loads the model and dataset files named in the config.
EvalReport run_experiment(const ExperimentConfig& config);

enum class ReportFormat { Text, Csv };

struct RenderOptions {
  /// Wall-clock columns make the output run-dependent; off by default.
  bool include_timing = false;
};

std::string render_report(const EvalReport& report, ReportFormat format,
                          const RenderOptions& options = {});

/// One row of the CSV rendering.
struct ReportRow {
  std::string dataset;
  std::string method;
  double mae_mw = 0.0;
  double mre_pct = 0.0;
  double max_signed_error_pu = 0.0;
  double train_max_signed_error_pu = 0.0;
  double over_predictions = 0.0;  // mean count per trial
  double mae_std_mw = 0.0;
  double train_seconds = 0.0;  // 0 when timing was not rendered
  bool operator==(const ReportRow&) const = default;
};

std::vector<ReportRow> parse_report_csv(const std::string& csv);

}  // namespace fnclin
