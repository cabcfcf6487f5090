#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "fnclin/errors.hpp"
#include "fnclin/margin.hpp"
#include "fnclin/reduced_order.hpp"
#include "fnclin/simulation.hpp"

namespace fnclin {
namespace {

using testing::make_tg;

SystemModel single_tg(double deadband) {
  return build_system({make_tg(8, 0.2, 0.3, 0.3, 0.05, 4, 100, deadband)}, {}, {}, 1.0, 100.0);
}

SimulationOptions full_horizon(double horizon) {
  SimulationOptions o;
  o.horizon_s = horizon;
  o.stop_after_nadir_s = -1.0;
  return o;
}

TEST(Simulate, ZeroDisturbanceStaysAtEquilibrium) {
  const SystemModel m = testing::example_system();
  const auto trace = simulate_response(m, testing::all_on(m), 0.0, full_horizon(10.0));
  ASSERT_EQ(trace.samples.size(), 10001u);
  for (double v : trace.samples) EXPECT_EQ(v, 0.0);
}

TEST(Simulate, FinalValueMatchesClosedLoopGain) {
  // Final-value theorem: the steady state is -dP / (D + K) with K = (S/S_base)/R.
  const SystemModel m = single_tg(0.0);
  const double dp = 0.05;
  const auto trace = simulate_response(m, testing::single_on(), dp, full_horizon(200.0));
  const double expected = -dp / (1.0 + 1.0 / 0.05);
  EXPECT_NEAR(trace.samples.back(), expected, 1e-7);
}

TEST(Simulate, DeadbandWeakensQuasiSteadyRegulation) {
  const double dp = 0.05;
  const auto base = simulate_response(single_tg(0.0), testing::single_on(), dp, full_horizon(200.0));
  const auto db = simulate_response(single_tg(5e-4), testing::single_on(), dp, full_horizon(200.0));
  EXPECT_GT(std::abs(db.samples.back()), std::abs(base.samples.back()));
  // With a ramp deadband the governor sees |df| - db, so the steady state
  // shifts by K * db / (D + K).
  EXPECT_NEAR(db.samples.back(), -(dp + 20.0 * 5e-4) / 21.0, 1e-7);
}

TEST(Simulate, RejectsBadOptions) {
  const SystemModel m = single_tg(0.0);
  SimulationOptions o;
  o.dt = 0.02;
  EXPECT_THROW(simulate_response(m, testing::single_on(), 0.05, o), ValidationError);
  o = {};
  o.horizon_s = 4.0;
  EXPECT_THROW(simulate_response(m, testing::single_on(), 0.05, o), ValidationError);
  EXPECT_THROW(simulate_response(m, testing::single_on(), -0.1), ValidationError);
}

TEST(Simulate, EarlyStopKeepsTheNadir) {
  const SystemModel m = testing::example_system();
  const auto s = testing::all_on(m);
  const auto early = simulate_response(m, s, 0.05);
  const auto full = simulate_response(m, s, 0.05, full_horizon(30.0));
  EXPECT_LT(early.samples.size(), full.samples.size());
  const Nadir a = find_nadir(early);
  const Nadir b = find_nadir(full);
  EXPECT_EQ(a.delta_f_pu, b.delta_f_pu);
  EXPECT_EQ(a.t_s, b.t_s);
}

TEST(Simulate, HalvingDtMovesNadirLessThanMicroPu) {
  const SystemModel m = testing::example_system();
  const auto s = testing::all_on(m);
  SimulationOptions coarse;
  SimulationOptions fine;
  fine.dt = coarse.dt / 2.0;
  const double a = find_nadir(simulate_response(m, s, 0.05, coarse)).delta_f_pu;
  const double b = find_nadir(simulate_response(m, s, 0.05, fine)).delta_f_pu;
  EXPECT_LT(std::abs(a - b), 1e-6);
}

TEST(Simulate, TinyLagsReproduceSecondOrderNadir) {
  const SystemModel m = testing::second_order_system(4, 1, 20, 6, 8, 1e-4);
  const auto trace = simulate_response(m, testing::single_on(), 0.05);
  const Nadir n = find_nadir(trace);
  const AnalyticNadir a = analytic_nadir(aggregate(m, testing::single_on()), 0.05);
  EXPECT_NEAR(n.delta_f_pu, a.delta_f_nadir, 1e-4);
  EXPECT_NEAR(n.t_s, a.t_m, 2 * trace.dt);
}

TEST(Simulate, NadirMagnitudeGrowsWithDisturbance) {
  const SystemModel m = testing::example_system();
  const std::vector<double> grid = {0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.4};
  const MonotoneReport r = verify_monotone(m, testing::all_on(m, 0.5), grid);
  EXPECT_TRUE(r.monotone);
  EXPECT_FALSE(r.first_violation.has_value());
}

TEST(Inertia, SumsOnlineUnitsParticipatingResAndOthers) {
  const SystemModel m = testing::example_system();
  CommitmentScenario s = testing::all_on(m, 0.5);
  double expected = 0.0;
  for (const auto& g : m.tgs()) expected += g.inertia * g.capacity_mva;
  for (std::size_t j = 0; j < m.res_count(); ++j)
    expected += m.ress()[j].inertia * s.res_power_mw[j];
  for (const auto& e : m.others()) expected += e.inertia * e.capacity_mva;
  EXPECT_NEAR(system_inertia(m, s), expected / m.s_base_mva(), 1e-12);
  s.tg_on.assign(m.tg_count(), 0);
  s.res_participates.assign(m.res_count(), 0);
  EXPECT_NEAR(system_inertia(m, s), 100.0 * 2.0 / m.s_base_mva(), 1e-12);
}

TEST(FindNadir, ZeroTrace) {
  FrequencyTrace t{0.001, std::vector<double>(100, 0.0), 0.0};
  const Nadir n = find_nadir(t);
  EXPECT_EQ(n.t_s, 0.0);
  EXPECT_EQ(n.delta_f_pu, 0.0);
}

TEST(FindNadir, StrictlyDecreasingReturnsEndpointWithFlag) {
  FrequencyTrace t{0.5, {0.0, -1.0, -2.0, -3.0}, 1.0};
  const Nadir n = find_nadir(t);
  EXPECT_TRUE(n.monotone);
  EXPECT_EQ(n.delta_f_pu, -3.0);
  EXPECT_EQ(n.t_s, 1.5);
}

TEST(FindNadir, FirstLocalMinimumWins) {
  FrequencyTrace t{1.0, {0.0, -1.0, -2.0, -1.5, -3.0, 0.0}, 1.0};
  const Nadir n = find_nadir(t);
  EXPECT_FALSE(n.monotone);
  EXPECT_EQ(n.delta_f_pu, -2.0);
  EXPECT_EQ(n.t_s, 2.0);
}

TEST(FindNadir, EmptyTraceIsAnError) {
  EXPECT_THROW(find_nadir(FrequencyTrace{}), ValidationError);
}

TEST(FindNadir, SampledSecondOrderResponseHitsAnalyticTime) {
  // Closed-form step response of 2H T s^2 + (2H + T(D+F)) s + (D+R) with the
  // lead (1 + sT) numerator, sampled at 1 ms.
  const double h = 4, d = 1, r = 20, f = 6, t = 8, dp = 0.05;
  const ReducedModel red = make_reduced_model(h, d, r, f, t);
  const double wn = red.omega_n, z = red.zeta, wd = wn * std::sqrt(1 - z * z);
  FrequencyTrace tr;
  tr.dt = 1e-3;
  for (int k = 0; k <= 20000; ++k) {
    const double time = k * tr.dt;
    // Step response of (1 + sT) / (2HT (s^2 + 2 z wn s + wn^2)).
    const double a = 1.0 / (2 * h * t * wn * wn);
    const double step = a * (1 - std::exp(-z * wn * time) *
                                     (std::cos(wd * time) + z * wn / wd * std::sin(wd * time)));
    const double impulse = 1.0 / (2 * h * t * wd) * std::exp(-z * wn * time) * std::sin(wd * time);
    tr.samples.push_back(-dp * (step + t * impulse));
  }
  const Nadir n = find_nadir(tr);
  const AnalyticNadir a = analytic_nadir(red, dp);
  EXPECT_NEAR(n.t_s, a.t_m, 2 * tr.dt);
  EXPECT_NEAR(n.delta_f_pu, a.delta_f_nadir, 1e-9);
}

}  // namespace
}  // namespace fnclin
