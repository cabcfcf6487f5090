#pragma once

#include "fnclin/system_model.hpp"

namespace fnclin {

/// Second-order aggregate of a committed system:
///   G(s) = (1 + sT) / (2HT s^2 + (2H + T(D+F)) s + (D+R)).
struct ReducedModel {
  double h = 0.0;
  double d = 0.0;
  double r = 0.0;
  double f = 0.0;
  double t = 0.0;
  double zeta = 0.0;
  double omega_n = 0.0;
  /// No online TG: R and F carry no reheater dynamics, T is a placeholder.
  bool degenerate = false;
};

/// Builds a ReducedModel from its physical parameters, filling zeta and
/// omega_n by matching the characteristic polynomial.
ReducedModel make_reduced_model(double h, double d, double r, double f, double t);

/// Aggregates the online units. Throws NumericalError("undamped system") when
/// D = 0 and nothing regulates, ValidationError on zero inertia.
ReducedModel aggregate(const SystemModel& model, const CommitmentScenario& scenario);

struct AnalyticNadir {
  double t_m = 0.0;
  double delta_f_nadir = 0.0;
};

/// Closed-form nadir of the step response to a loss of disturbance_pu.
/// Requires 0 < zeta < 1; throws NumericalError otherwise.
AnalyticNadir analytic_nadir(const ReducedModel& reduced, double disturbance_pu);

/// Largest step loss that keeps |nadir| <= delta_f_max_pu, by exact inversion
/// of the closed form (it is linear in the disturbance).
double analytic_margin(const ReducedModel& reduced, double delta_f_max_pu);

/// Margin of the reduced model that also covers zeta >= 1 by integrating the
/// second-order response numerically (the closed form is used when it
/// applies).
double reduced_margin(const ReducedModel& reduced, double delta_f_max_pu);

}  // namespace fnclin
