#pragma once

#include <cstdint>
#include <vector>

namespace fnclin {

/// Traditional (synchronous) generator. Time constants in seconds, droop and
/// deadband in pu, inertia in seconds on the machine base.
struct TgParams {
  double t_reheat = 0.0;
  double t_governor = 0.0;
  double t_turbine = 0.0;
  double hp_fraction = 0.0;
  double droop = 0.0;
  double inertia = 0.0;
  double capacity_mva = 0.0;
  double deadband = 0.0;

  bool operator==(const TgParams&) const = default;
};

/// Converter-interfaced renewable source with droop and virtual inertia.
struct ResParams {
  double t_converter = 0.0;
  double droop = 0.0;
  double inertia = 0.0;
  double capacity_mw = 0.0;

  bool operator==(const ResParams&) const = default;
};

/// Motors, synchronous condensers and similar devices that add inertia but
/// carry no regulation.
struct OtherInertiaDevice {
  double capacity_mva = 0.0;
  double inertia = 0.0;

  bool operator==(const OtherInertiaDevice&) const = default;
};

/// Immutable plant description. Only constructible through build_system(),
/// so every instance satisfies the parameter invariants.
class SystemModel {
 public:
  const std::vector<TgParams>& tgs() const { return tgs_; }
  const std::vector<ResParams>& ress() const { return ress_; }
  const std::vector<OtherInertiaDevice>& others() const { return others_; }
  double damping() const { return damping_; }
  double s_base_mva() const { return s_base_mva_; }
  double f_base_hz() const { return f_base_hz_; }

  std::size_t tg_count() const { return tgs_.size(); }
  std::size_t res_count() const { return ress_.size(); }

  /// FNV-1a over the canonical text serialization.
  std::uint64_t hash() const;

  bool operator==(const SystemModel&) const = default;

 private:
  friend SystemModel build_system(std::vector<TgParams>, std::vector<ResParams>,
                                  std::vector<OtherInertiaDevice>, double, double,
                                  double);
  SystemModel() = default;

  std::vector<TgParams> tgs_;
  std::vector<ResParams> ress_;
  std::vector<OtherInertiaDevice> others_;
  double damping_ = 0.0;
  double s_base_mva_ = 0.0;
  double f_base_hz_ = 0.0;
};

/// Validating constructor. Throws ValidationError naming the offending unit
/// and field.
SystemModel build_system(std::vector<TgParams> tgs, std::vector<ResParams> ress,
                         std::vector<OtherInertiaDevice> others, double damping,
                         double s_base_mva, double f_base_hz = 50.0);

/// RES output below this fraction of installed capacity excludes the unit
/// from frequency regulation and inertia provision.
inline constexpr double kParticipationThreshold = 0.3;

/// Snapshot of the unit-commitment decision variables.
struct CommitmentScenario {
  std::vector<std::uint8_t> tg_on;
  std::vector<std::uint8_t> res_participates;
  std::vector<double> res_power_mw;

  bool operator==(const CommitmentScenario&) const = default;
};

/// Throws ValidationError if the scenario does not fit the model or breaks
/// the participation rule.
void validate_scenario(const SystemModel& model, const CommitmentScenario& scenario);

/// Sets res_participates to 0 wherever output is below the threshold.
void enforce_participation_rule(const SystemModel& model, CommitmentScenario& scenario);

}  // namespace fnclin
