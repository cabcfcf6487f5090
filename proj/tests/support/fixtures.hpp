#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fnclin/system_model.hpp"
#include "fnclin/text_io.hpp"

namespace fnclin::testing {

inline std::filesystem::path example_dir() { return FNCLIN_EXAMPLE_DIR; }

inline SystemModel example_system() {
  return load_system_model(example_dir() / "example_system.sys");
}

inline CommitmentScenario all_on(const SystemModel& m, double res_frac = 0.8) {
  CommitmentScenario s;
  s.tg_on.assign(m.tg_count(), 1);
  s.res_participates.assign(m.res_count(), 1);
  for (const auto& r : m.ress()) s.res_power_mw.push_back(res_frac * r.capacity_mw);
  return s;
}

inline TgParams make_tg(double tr, double tg, double tc, double f, double r, double h, double s,
                        double deadband = 0.0) {
  TgParams g;
  g.t_reheat = tr;
  g.t_governor = tg;
  g.t_turbine = tc;
  g.hp_fraction = f;
  g.droop = r;
  g.inertia = h;
  g.capacity_mva = s;
  g.deadband = deadband;
  return g;
}

inline ResParams make_res(double tv, double r, double h, double cap) {
  ResParams v;
  v.t_converter = tv;
  v.droop = r;
  v.inertia = h;
  v.capacity_mw = cap;
  return v;
}

/// One TG whose governor and turbine lags are `lag` seconds, chosen so the
/// aggregate equals the second-order model (H, D, R, F, T) on a 100 MVA base.
inline SystemModel second_order_system(double h, double d, double r, double f, double t,
                                       double lag = 1e-4, double deadband = 0.0) {
  const double s_base = 100.0;
  const double droop = 0.05;
  const double cap = r * droop * s_base;
  return build_system({make_tg(t, lag, lag, f / r, droop, h * s_base / cap, cap, deadband)}, {},
                      {}, d, s_base);
}

inline CommitmentScenario single_on() {
  CommitmentScenario s;
  s.tg_on = {1};
  return s;
}

}  // namespace fnclin::testing
