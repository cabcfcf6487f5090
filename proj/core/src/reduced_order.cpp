#include "fnclin/reduced_order.hpp"

#include <algorithm>
#include <cmath>

#include "fnclin/errors.hpp"
#include "fnclin/simulation.hpp"

namespace fnclin {

ReducedModel make_reduced_model(double h, double d, double r, double f, double t) {
  if (!(h > 0.0)) throw ValidationError("reduced model needs H > 0");
  if (!(t > 0.0)) throw ValidationError("reduced model needs T > 0");
  if (d < 0.0 || r < 0.0 || f < 0.0) throw ValidationError("D, R, F must be >= 0");
  if (f > r) throw ValidationError("F must not exceed R");
  if (d + r <= 0.0) throw NumericalError("undamped system");
  ReducedModel m;
  m.h = h;
  m.d = d;
  m.r = r;
  m.f = f;
  m.t = t;
  m.omega_n = std::sqrt((d + r) / (2.0 * h * t));
  m.zeta = (2.0 * h + t * (d + f)) / (2.0 * std::sqrt(2.0 * h * t * (d + r)));
  return m;
}

ReducedModel aggregate(const SystemModel& model, const CommitmentScenario& scenario) {
  validate_scenario(model, scenario);
  const double sb = model.s_base_mva();
  double r = 0.0, f = 0.0, tg_gain = 0.0, weighted_t = 0.0;
  for (std::size_t i = 0; i < model.tg_count(); ++i) {
    if (!scenario.tg_on[i]) continue;
    const TgParams& g = model.tgs()[i];
    const double gain = g.capacity_mva / sb / g.droop;
    r += gain;
    f += gain * g.hp_fraction;
    tg_gain += gain;
    weighted_t += gain * g.t_reheat;
  }
  for (std::size_t j = 0; j < model.res_count(); ++j) {
    if (!scenario.res_participates[j]) continue;
    r += scenario.res_power_mw[j] / sb / model.ress()[j].droop;
  }
  const double h = system_inertia(model, scenario);
  if (!(h > 0.0)) throw ValidationError("system inertia is zero");
  if (model.damping() == 0.0 && r == 0.0) throw NumericalError("undamped system");

  double t = 0.0;
  const bool degenerate = tg_gain == 0.0;
  if (degenerate) {
    for (const auto& g : model.tgs()) t += g.t_reheat;
    t /= static_cast<double>(model.tg_count());
  } else {
    t = weighted_t / tg_gain;
  }
  ReducedModel m = make_reduced_model(h, model.damping(), r, f, t);
  m.degenerate = degenerate;
  return m;
}

AnalyticNadir analytic_nadir(const ReducedModel& m, double disturbance_pu) {
  if (!(m.zeta > 0.0 && m.zeta < 1.0))
    throw NumericalError("overdamped: closed-form nadir inapplicable (zeta = " +
                         std::to_string(m.zeta) + ")");
  if (!(disturbance_pu >= 0.0)) throw ValidationError("disturbance must be >= 0");
  const double wd = m.omega_n * std::sqrt(1.0 - m.zeta * m.zeta);
  // atan2 with a positive first argument lands in (0, pi): the first positive
  // stationary point, no separate branch fix needed.
  const double t_m = std::atan2(wd * m.t, m.zeta * m.omega_n * m.t - 1.0) / wd;
  const double amplification =
      1.0 + std::sqrt(m.t * (m.r - m.f) / (2.0 * m.h)) * std::exp(-m.zeta * m.omega_n * t_m);
  return {t_m, -disturbance_pu / (m.d + m.r) * amplification};
}

double analytic_margin(const ReducedModel& m, double delta_f_max_pu) {
  if (!(delta_f_max_pu > 0.0)) throw ValidationError("frequency limit must be > 0");
  // Unit disturbance gives the nadir per pu of loss.
  const AnalyticNadir unit = analytic_nadir(m, 1.0);
  return delta_f_max_pu / -unit.delta_f_nadir;
}

namespace {

// Nadir per pu of loss for the second-order model, integrated numerically.
double simulated_unit_nadir(const ReducedModel& m) {
  // States: df and q, with mechanical power -F*df + q and
  // T dq/dt = -(R - F) df - q.
  const double dt = 1e-3;
  const double horizon = std::max(60.0, 20.0 * m.t);
  auto deriv = [&](double df, double q, double& ddf, double& dq) {
    const double pm = -m.f * df + q;
    ddf = (pm - m.d * df - 1.0) / (2.0 * m.h);
    dq = (-(m.r - m.f) * df - q) / m.t;
  };
  double df = 0.0, q = 0.0, lowest = 0.0;
  const auto steps = static_cast<long>(horizon / dt);
  for (long k = 0; k < steps; ++k) {
    double a1, b1, a2, b2, a3, b3, a4, b4;
    deriv(df, q, a1, b1);
    deriv(df + 0.5 * dt * a1, q + 0.5 * dt * b1, a2, b2);
    deriv(df + 0.5 * dt * a2, q + 0.5 * dt * b2, a3, b3);
    deriv(df + dt * a3, q + dt * b3, a4, b4);
    df += dt / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
    q += dt / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4);
    lowest = std::min(lowest, df);
  }
  return lowest;
}

}  // namespace

double reduced_margin(const ReducedModel& m, double delta_f_max_pu) {
  if (m.zeta > 0.0 && m.zeta < 1.0) return analytic_margin(m, delta_f_max_pu);
  if (!(delta_f_max_pu > 0.0)) throw ValidationError("frequency limit must be > 0");
  return delta_f_max_pu / -simulated_unit_nadir(m);
}

}  // namespace fnclin
