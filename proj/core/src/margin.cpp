#include "fnclin/margin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fnclin {

namespace {

// Slack for floating-point noise when comparing nadirs of nearby disturbances.
constexpr double kMonotoneSlack = 1e-12;

}  // namespace

void MarginSpec::validate() const {
  if (!(delta_f_max_pu > 0.0)) throw ValidationError("delta_f_max_pu must be > 0");
  if (!(tol_pu > 0.0)) throw ValidationError("tol_pu must be > 0");
  if (!(dp_hi > tol_pu)) throw ValidationError("dp_hi must exceed tol_pu");
  if (!(cap_pu >= dp_hi)) throw ValidationError("cap_pu must be >= dp_hi");
}

double nadir_magnitude(const SystemModel& model, const CommitmentScenario& scenario,
                       double disturbance_pu, const SimulationOptions& sim) {
  return std::abs(find_nadir(simulate_response(model, scenario, disturbance_pu, sim)).delta_f_pu);
}

MarginResult margin_bisect(const SystemModel& model, const CommitmentScenario& scenario,
                           const MarginSpec& spec) {
  spec.validate();
  validate_scenario(model, scenario);
  MarginResult out;
  auto magnitude = [&](double dp) {
    ++out.simulations;
    return nadir_magnitude(model, scenario, dp, spec.sim);
  };
  auto violated = [&](double dp_a, double mag_a, double dp_b, double mag_b) {
    throw MonotonicityError("monotonicity violated: |nadir(" + std::to_string(dp_b) +
                            ")| = " + std::to_string(mag_b) + " < |nadir(" +
                            std::to_string(dp_a) + ")| = " + std::to_string(mag_a));
  };

  const double limit = spec.delta_f_max_pu;
  double lo = 0.0, lo_mag = 0.0;
  double hi = std::min(spec.dp_hi, spec.cap_pu);
  double hi_mag = magnitude(hi);
  while (hi_mag <= limit) {
    if (hi_mag + kMonotoneSlack < lo_mag) violated(lo, lo_mag, hi, hi_mag);
    if (hi >= spec.cap_pu) {
      out.margin_pu = spec.cap_pu;
      out.unbounded = true;
      return out;
    }
    lo = hi;
    lo_mag = hi_mag;
    hi = std::min(2.0 * hi, spec.cap_pu);
    hi_mag = magnitude(hi);
  }
  if (hi_mag + kMonotoneSlack < lo_mag) violated(lo, lo_mag, hi, hi_mag);

  while (hi - lo > spec.tol_pu) {
    const double mid = 0.5 * (lo + hi);
    const double mid_mag = magnitude(mid);
    if (mid_mag + kMonotoneSlack < lo_mag) violated(lo, lo_mag, mid, mid_mag);
    if (mid_mag > hi_mag + kMonotoneSlack) violated(mid, mid_mag, hi, hi_mag);
    if (mid_mag <= limit) {
      lo = mid;
      lo_mag = mid_mag;
    } else {
      hi = mid;
      hi_mag = mid_mag;
    }
  }
  out.margin_pu = lo;
  return out;
}

MonotoneReport verify_monotone(const SystemModel& model, const CommitmentScenario& scenario,
                               std::span<const double> dp_grid, const SimulationOptions& sim) {
  MonotoneReport report;
  report.nadir_magnitudes.reserve(dp_grid.size());
  for (std::size_t k = 0; k < dp_grid.size(); ++k) {
    if (k > 0 && dp_grid[k] < dp_grid[k - 1])
      throw ValidationError("disturbance grid must be ascending");
    report.nadir_magnitudes.push_back(nadir_magnitude(model, scenario, dp_grid[k], sim));
    if (k > 0 && report.monotone &&
        report.nadir_magnitudes[k] + kMonotoneSlack < report.nadir_magnitudes[k - 1]) {
      report.monotone = false;
      report.first_violation = std::make_pair(k - 1, k);
    }
  }
  return report;
}

}  // namespace fnclin
