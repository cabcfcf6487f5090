#pragma once

#include <cstddef>
#include <vector>

#include "fnclin/system_model.hpp"

namespace fnclin {

/// Frequency deviation samples (pu) at a fixed step, starting at the
/// disturbance instant.
struct FrequencyTrace {
  double dt = 0.0;
  std::vector<double> samples;
  double disturbance_pu = 0.0;

  double time_at(std::size_t k) const { return dt * static_cast<double>(k); }
};

struct SimulationOptions {
  double dt = 1e-3;
  double horizon_s = 30.0;
  /// Integration stops this long after the first local minimum. A negative
  /// value disables the early stop.
  double stop_after_nadir_s = 2.0;
};

/// Full-order centralized response to a stepwise generation loss.
///
/// Each online TG runs droop -> governor lag -> turbine lag -> reheater
/// lead-lag, with a ramp deadband on the governor input. Each participating
/// RES runs droop through a first-order converter lag. All of them feed a
/// single swing equation whose inertia is the system total (TGs, participating
/// RES virtual inertia, other devices). Classical RK4; steps are internally
/// subdivided when a time constant is shorter than dt so tiny lags stay
/// stable.
///
/// Preconditions: disturbance_pu >= 0, dt in (0, 0.01], horizon_s >= 5.
/// Throws NumericalError naming the step on non-finite state.
FrequencyTrace simulate_response(const SystemModel& model,
                                 const CommitmentScenario& scenario,
                                 double disturbance_pu,
                                 const SimulationOptions& options = {});

struct Nadir {
  double t_s = 0.0;
  double delta_f_pu = 0.0;
  /// True when no local minimum exists inside the trace and the reported
  /// point is the trace's lowest sample (typically the endpoint).
  bool monotone = false;
};

/// First local minimum of the trace. Throws ValidationError on an empty
/// trace.
Nadir find_nadir(const FrequencyTrace& trace);

/// Total system inertia in seconds on S_base, including only online units.
double system_inertia(const SystemModel& model, const CommitmentScenario& scenario);

}  // namespace fnclin
