#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "fnclin/elm_features.hpp"
#include "fnclin/pwl.hpp"
#include "fnclin/system_model.hpp"

namespace fnclin {

/// Learned surrogate: random layer plus trained segments. Serialized as
/// [elm], [pwl] and [meta] sections.
struct TrainedModel {
  ElmWeights weights;
  PwlModel pwl;
  std::uint64_t system_hash = 0;
  std::size_t tg_count = 0;
  std::size_t res_count = 0;

  double predict(const SystemModel& model, const CommitmentScenario& scenario) const;
  /// Throws ValidationError if the system does not match the one trained on.
  void check_system(const SystemModel& model) const;
  bool operator==(const TrainedModel&) const = default;
};

void write_trained_model(std::ostream& out, const TrainedModel& trained);
TrainedModel read_trained_model(std::istream& in);
void save_trained_model(const std::filesystem::path& path, const TrainedModel& trained);
TrainedModel load_trained_model(const std::filesystem::path& path);

}  // namespace fnclin
