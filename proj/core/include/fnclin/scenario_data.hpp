#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fnclin/elm_features.hpp"
#include "fnclin/margin.hpp"
#include "fnclin/system_model.hpp"

namespace fnclin {

/// Synthetic commitment generator settings. Loads are drawn uniformly in
/// [load_min_frac, load_max_frac] x peak_load_mw; TGs are committed in a
/// randomly perturbed merit order until their capacity covers the net load
/// (load minus RES output) times reserve_factor.
struct LoadProfileOptions {
  double peak_load_mw = 0.0;  // 0 selects the model's S_base
  double load_min_frac = 0.35;
  double load_max_frac = 1.0;
  double reserve_factor = 1.15;
  double merit_noise = 3.0;
  int min_committed = 1;
  /// Fixed load fraction instead of a random draw.
  std::optional<double> fixed_load_frac;
};

std::vector<CommitmentScenario> generate_scenarios(const SystemModel& model, std::size_t count,
                                                   std::uint64_t seed,
                                                   const LoadProfileOptions& options = {});

struct LabeledRecord {
  std::uint64_t id = 0;
  CommitmentScenario scenario;
  double label_pu = 0.0;

  bool operator==(const LabeledRecord&) const = default;
};

struct DatasetProvenance {
  std::uint64_t generator_seed = 0;
  std::uint64_t model_hash = 0;
  MarginSpec margin{};
  std::optional<std::uint64_t> noise_seed;
  double flip_prob = 0.0;
  int n_hidden = 10;
  std::uint64_t elm_seed = 0;
  std::size_t excluded = 0;

  bool operator==(const DatasetProvenance& other) const;
};

/// Labeled records plus the feature matrix (one row per record) computed with
/// ElmWeights(provenance.n_hidden, provenance.elm_seed).
struct LabeledDataset {
  std::vector<LabeledRecord> records;
  DatasetProvenance provenance;
  Eigen::MatrixXd features;

  std::size_t size() const { return records.size(); }
  Eigen::VectorXd labels() const;
  std::vector<CommitmentScenario> scenarios() const;
  bool operator==(const LabeledDataset& other) const;
};

struct LabelingOptions {
  int jobs = 1;
  /// Receives one line per excluded record.
  std::function<void(const std::string&)> log;
};

Eigen::MatrixXd featurize(const ElmWeights& weights, const SystemModel& model,
                          const std::vector<LabeledRecord>& records);

/// Labels every scenario with margin_bisect on the full-order model. Records
/// that come back unbounded or non-monotone are dropped and logged.
LabeledDataset label_dataset(const SystemModel& model,
                             const std::vector<CommitmentScenario>& scenarios,
                             const MarginSpec& spec, const ElmWeights& weights,
                             const LabelingOptions& options = {});

struct PerturbOptions {
  double flip_prob = 0.05;
  double jitter = 0.10;
};

/// Noise replica: flips commitment and participation bits independently,
/// jitters RES output by +-jitter (relative, uniform), re-applies the
/// participation rule and re-labels through the oracle.
LabeledDataset perturb_dataset(const SystemModel& model, const LabeledDataset& dataset,
                               std::uint64_t noise_seed, const PerturbOptions& perturb,
                               const ElmWeights& weights,
                               const LabelingOptions& options = {});

/// Uniform random partition without replacement, deterministic in seed.
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& dataset,
                                                std::size_t train_count, std::uint64_t seed);

/// Text persistence. Features are not stored; read_dataset recomputes them
/// from the provenance's ELM settings and checks the model hash.
void write_dataset(std::ostream& out, const SystemModel& model, const LabeledDataset& dataset);
LabeledDataset read_dataset(std::istream& in, const SystemModel& model);
void save_dataset(const std::filesystem::path& path, const SystemModel& model,
                  const LabeledDataset& dataset);
LabeledDataset load_dataset(const std::filesystem::path& path, const SystemModel& model);

}  // namespace fnclin
