#pragma once

#include <span>
#include <vector>

#include "fnclin/pwl.hpp"
#include "fnclin/system_model.hpp"

namespace fnclin {

/// Two-step reference method: reduce each scenario to the second-order model,
/// take its analytic margin, then fit a min-of-affine function of the raw
/// decision-scaled parameters to those analytic margins.
struct BaselineModel {
  PwlModel pwl;
  double delta_f_max_pu = 0.01;
};

struct BaselineOptions {
  int segments = 40;
  double delta_f_max_pu = 0.01;
  int max_iters = 50;
  int restarts = 3;
  std::uint64_t seed = 0x5eed;
};

/// Fits to reduced-model margins only; full-order labels enter at evaluation.
BaselineModel train_baseline(const SystemModel& model,
                             std::span<const CommitmentScenario> scenarios,
                             const BaselineOptions& options = {});

double predict_baseline(const BaselineModel& baseline, const SystemModel& model,
                        const CommitmentScenario& scenario);

}  // namespace fnclin
