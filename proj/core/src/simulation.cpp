#include "fnclin/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fnclin/errors.hpp"

namespace fnclin {

namespace {

struct OnlineTg {
  double gain;  // (S_i / S_base) / R_i
  double hp_fraction;
  double t_governor;
  double t_turbine;
  double t_reheat;
  double deadband;
};

struct OnlineRes {
  double gain;  // (P_j / S_base) / R_j
  double t_converter;
};

// State layout: [df, (gov, turb, reheat) per online TG, pv per online RES].
class FrequencyDynamics {
 public:
  FrequencyDynamics(const SystemModel& model, const CommitmentScenario& scenario, double dp)
      : damping_(model.damping()), dp_(dp) {
    const double sb = model.s_base_mva();
    for (std::size_t i = 0; i < model.tg_count(); ++i) {
      if (!scenario.tg_on[i]) continue;
      const TgParams& g = model.tgs()[i];
      tgs_.push_back({g.capacity_mva / sb / g.droop, g.hp_fraction, g.t_governor, g.t_turbine,
                      g.t_reheat, g.deadband});
    }
    for (std::size_t j = 0; j < model.res_count(); ++j) {
      if (!scenario.res_participates[j]) continue;
      const ResParams& r = model.ress()[j];
      res_.push_back({scenario.res_power_mw[j] / sb / r.droop, r.t_converter});
    }
    two_h_ = 2.0 * system_inertia(model, scenario);
    if (!(two_h_ > 0.0)) throw ValidationError("system inertia is zero; swing equation undefined");
  }

  std::size_t size() const { return 1 + 3 * tgs_.size() + res_.size(); }

  // Shortest time constant in the realization, used to pick substeps.
  double fastest_time_constant() const {
    double total_gain = damping_;
    double tau = std::numeric_limits<double>::infinity();
    for (const auto& g : tgs_) {
      tau = std::min({tau, g.t_governor, g.t_turbine, g.t_reheat});
      total_gain += g.gain;
    }
    for (const auto& r : res_) {
      tau = std::min(tau, r.t_converter);
      total_gain += r.gain;
    }
    if (total_gain > 0.0) tau = std::min(tau, two_h_ / total_gain);
    return tau;
  }

  void derivative(const std::vector<double>& x, std::vector<double>& dx) const {
    const double df = x[0];
    double power = -damping_ * df - dp_;
    std::size_t k = 1;
    for (const auto& g : tgs_) {
      const double gov = x[k], turb = x[k + 1], reheat = x[k + 2];
      const double excess = std::abs(df) - g.deadband;
      const double seen = excess > 0.0 ? std::copysign(excess, df) : 0.0;
      dx[k] = (-g.gain * seen - gov) / g.t_governor;
      dx[k + 1] = (gov - turb) / g.t_turbine;
      dx[k + 2] = ((1.0 - g.hp_fraction) * turb - reheat) / g.t_reheat;
      power += g.hp_fraction * turb + reheat;
      k += 3;
    }
    for (const auto& r : res_) {
      dx[k] = (-r.gain * df - x[k]) / r.t_converter;
      power += x[k];
      ++k;
    }
    dx[0] = power / two_h_;
  }

 private:
  std::vector<OnlineTg> tgs_;
  std::vector<OnlineRes> res_;
  double damping_;
  double dp_;
  double two_h_ = 0.0;
};

class Rk4 {
 public:
  explicit Rk4(std::size_t n) : k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n) {}

  void step(const FrequencyDynamics& sys, std::vector<double>& x, double h) {
    const std::size_t n = x.size();
    sys.derivative(x, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * h * k1_[i];
    sys.derivative(tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * h * k2_[i];
    sys.derivative(tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + h * k3_[i];
    sys.derivative(tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i)
      x[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }

 private:
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace

double system_inertia(const SystemModel& model, const CommitmentScenario& scenario) {
  double sum = 0.0;
  for (std::size_t i = 0; i < model.tg_count(); ++i)
    if (scenario.tg_on[i]) sum += model.tgs()[i].inertia * model.tgs()[i].capacity_mva;
  for (std::size_t j = 0; j < model.res_count(); ++j)
    if (scenario.res_participates[j]) sum += model.ress()[j].inertia * scenario.res_power_mw[j];
  for (const auto& e : model.others()) sum += e.inertia * e.capacity_mva;
  return sum / model.s_base_mva();
}

FrequencyTrace simulate_response(const SystemModel& model, const CommitmentScenario& scenario,
                                 double disturbance_pu, const SimulationOptions& options) {
  validate_scenario(model, scenario);
  if (!(disturbance_pu >= 0.0) || !std::isfinite(disturbance_pu))
    throw ValidationError("disturbance must be finite and >= 0");
  if (!(options.dt > 0.0 && options.dt <= 0.01))
    throw ValidationError("dt must lie in (0, 0.01]");
  if (!(options.horizon_s >= 5.0)) throw ValidationError("horizon must be >= 5 s");

  FrequencyDynamics sys(model, scenario, disturbance_pu);
  const double tau = sys.fastest_time_constant();
  const int substeps = std::max(1, static_cast<int>(std::ceil(options.dt / tau - 1e-12)));
  const double h = options.dt / substeps;

  const auto steps = static_cast<std::size_t>(std::llround(options.horizon_s / options.dt));
  FrequencyTrace trace;
  trace.dt = options.dt;
  trace.disturbance_pu = disturbance_pu;
  trace.samples.reserve(std::min<std::size_t>(steps + 1, 20000));
  trace.samples.push_back(0.0);

  std::vector<double> x(sys.size(), 0.0);
  Rk4 rk(x.size());

  std::size_t lowest = 0;
  std::size_t stop_at = steps;
  bool watching = options.stop_after_nadir_s >= 0.0;
  for (std::size_t k = 1; k <= stop_at; ++k) {
    for (int s = 0; s < substeps; ++s) rk.step(sys, x, h);
    for (double v : x)
      if (!std::isfinite(v))
        throw NumericalError("integration blow-up: non-finite state at step " + std::to_string(k));
    trace.samples.push_back(x[0]);
    if (watching) {
      if (x[0] < trace.samples[lowest]) {
        lowest = k;
      } else if (lowest > 0 && x[0] > trace.samples[lowest]) {
        const auto extra =
            static_cast<std::size_t>(std::llround(options.stop_after_nadir_s / options.dt));
        stop_at = std::min(steps, std::max(k, lowest + extra));
        watching = false;
      }
    }
  }
  return trace;
}

Nadir find_nadir(const FrequencyTrace& trace) {
  if (trace.samples.empty()) throw ValidationError("empty trace");
  const auto& f = trace.samples;
  std::size_t lowest = 0;
  for (std::size_t k = 1; k < f.size(); ++k) {
    if (f[k] < f[lowest]) {
      lowest = k;
    } else if (lowest > 0 && f[k] > f[lowest]) {
      return {trace.time_at(lowest), f[lowest], false};
    }
  }
  return {trace.time_at(lowest), f[lowest], lowest > 0};
}

}  // namespace fnclin
