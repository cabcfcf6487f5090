#include "fnclin/system_model.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "fnclin/errors.hpp"
#include "fnclin/text_io.hpp"

namespace fnclin {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

std::string unit(const char* kind, std::size_t idx, const char* field) {
  return std::string(kind) + "[" + std::to_string(idx) + "]." + field;
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }
bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

SystemModel build_system(std::vector<TgParams> tgs, std::vector<ResParams> ress,
                         std::vector<OtherInertiaDevice> others, double damping,
                         double s_base_mva, double f_base_hz) {
  require(!tgs.empty(), "system needs at least one TG");
  for (std::size_t i = 0; i < tgs.size(); ++i) {
    const TgParams& g = tgs[i];
    require(finite_positive(g.t_reheat), unit("tg", i, "t_reheat") + " must be > 0");
    require(finite_positive(g.t_governor), unit("tg", i, "t_governor") + " must be > 0");
    require(finite_positive(g.t_turbine), unit("tg", i, "t_turbine") + " must be > 0");
    require(std::isfinite(g.hp_fraction) && g.hp_fraction > 0.0 && g.hp_fraction < 1.0,
            unit("tg", i, "hp_fraction") + " must lie in (0,1)");
    require(finite_positive(g.droop), unit("tg", i, "droop") + " must be > 0");
    require(finite_nonneg(g.inertia), unit("tg", i, "inertia") + " must be >= 0");
    require(finite_positive(g.capacity_mva), unit("tg", i, "capacity_mva") + " must be > 0");
    require(finite_nonneg(g.deadband), unit("tg", i, "deadband") + " must be >= 0");
  }
  for (std::size_t j = 0; j < ress.size(); ++j) {
    const ResParams& r = ress[j];
    require(finite_positive(r.t_converter), unit("res", j, "t_converter") + " must be > 0");
    require(finite_positive(r.droop), unit("res", j, "droop") + " must be > 0");
    require(finite_nonneg(r.inertia), unit("res", j, "inertia") + " must be >= 0");
    require(finite_positive(r.capacity_mw), unit("res", j, "capacity_mw") + " must be > 0");
  }
  for (std::size_t e = 0; e < others.size(); ++e) {
    require(finite_positive(others[e].capacity_mva),
            unit("other", e, "capacity_mva") + " must be > 0");
    require(finite_nonneg(others[e].inertia), unit("other", e, "inertia") + " must be >= 0");
  }
  require(finite_nonneg(damping), "damping must be >= 0");
  require(finite_positive(s_base_mva), "s_base_mva must be > 0");
  require(finite_positive(f_base_hz), "f_base_hz must be > 0");

  SystemModel m;
  m.tgs_ = std::move(tgs);
  m.ress_ = std::move(ress);
  m.others_ = std::move(others);
  m.damping_ = damping;
  m.s_base_mva_ = s_base_mva;
  m.f_base_hz_ = f_base_hz;
  return m;
}

std::uint64_t SystemModel::hash() const {
  std::ostringstream os;
  write_system_model(os, *this);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void validate_scenario(const SystemModel& model, const CommitmentScenario& s) {
  require(s.tg_on.size() == model.tg_count(),
          "scenario has " + std::to_string(s.tg_on.size()) + " TG flags, model has " +
              std::to_string(model.tg_count()) + " TGs");
  require(s.res_participates.size() == model.res_count() &&
              s.res_power_mw.size() == model.res_count(),
          "scenario RES vectors do not match the model's " + std::to_string(model.res_count()) +
              " RESs");
  for (std::size_t i = 0; i < s.tg_on.size(); ++i)
    require(s.tg_on[i] <= 1, "tg_on[" + std::to_string(i) + "] must be 0 or 1");
  for (std::size_t j = 0; j < s.res_power_mw.size(); ++j) {
    const double p = s.res_power_mw[j];
    const double cap = model.ress()[j].capacity_mw;
    require(s.res_participates[j] <= 1,
            "res_participates[" + std::to_string(j) + "] must be 0 or 1");
    require(std::isfinite(p) && p >= 0.0 && p <= cap,
            "res_power_mw[" + std::to_string(j) + "] outside [0, capacity]");
    require(!(s.res_participates[j] && p < kParticipationThreshold * cap),
            "res[" + std::to_string(j) + "] participates below 0.3 of capacity");
  }
}

void enforce_participation_rule(const SystemModel& model, CommitmentScenario& s) {
  for (std::size_t j = 0; j < s.res_participates.size() && j < model.res_count(); ++j) {
    if (s.res_power_mw[j] < kParticipationThreshold * model.ress()[j].capacity_mw)
      s.res_participates[j] = 0;
  }
}

}  // namespace fnclin
