#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fnclin/errors.hpp"
#include "fnclin/simulation.hpp"
#include "fnclin/system_model.hpp"

namespace fnclin {

/// Labeling configuration. Defaults: 0.5 Hz on a 50 Hz base.
struct MarginSpec {
  double delta_f_max_pu = 0.01;
  double tol_pu = 1e-4;
  double dp_hi = 0.05;
  double cap_pu = 1.0;
  SimulationOptions sim{};

  void validate() const;
};

struct MarginResult {
  double margin_pu = 0.0;
  /// No violation even at cap_pu; margin_pu is the cap.
  bool unbounded = false;
  int simulations = 0;
};

/// Thrown when a larger disturbance produced a shallower nadir during
/// bracketing or bisection.
class MonotonicityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// |nadir| of the full-order model for one disturbance size.
double nadir_magnitude(const SystemModel& model, const CommitmentScenario& scenario,
                       double disturbance_pu, const SimulationOptions& sim = {});

/// Frequency security margin by bracket doubling then bisection. The returned
/// margin m satisfies |nadir(m)| <= limit and |nadir(m + tol)| > limit.
MarginResult margin_bisect(const SystemModel& model, const CommitmentScenario& scenario,
                           const MarginSpec& spec = {});

struct MonotoneReport {
  bool monotone = true;
  std::optional<std::pair<std::size_t, std::size_t>> first_violation;
  std::vector<double> nadir_magnitudes;
};

MonotoneReport verify_monotone(const SystemModel& model, const CommitmentScenario& scenario,
                               std::span<const double> dp_grid,
                               const SimulationOptions& sim = {});

}  // namespace fnclin
