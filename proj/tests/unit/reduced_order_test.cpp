#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "fnclin/errors.hpp"
#include "fnclin/margin.hpp"
#include "fnclin/reduced_order.hpp"
#include "fnclin/simulation.hpp"

namespace fnclin {
namespace {

// Independent integration of 2HT f'' + (2H + T(D+F)) f' + (D+R) f = -dP (1 + T d/dt)
// written as the state pair (f, q) with mechanical power -F f + q.
double integrated_nadir(const ReducedModel& m, double dp, double dt = 1e-4) {
  double f = 0.0, q = 0.0, lowest = 0.0;
  for (int k = 0; k < static_cast<int>(40.0 / dt); ++k) {
    const double df = (-m.f * f + q - m.d * f - dp) / (2 * m.h);
    const double dq = (-(m.r - m.f) * f - q) / m.t;
    // Semi-implicit midpoint is plenty at this step for a 1e-7 oracle.
    const double fm = f + 0.5 * dt * df, qm = q + 0.5 * dt * dq;
    f += dt * (-m.f * fm + qm - m.d * fm - dp) / (2 * m.h);
    q += dt * (-(m.r - m.f) * fm - qm) / m.t;
    lowest = std::min(lowest, f);
  }
  return lowest;
}

TEST(Aggregate, ReferenceCaseDampingAndFrequency) {
  const ReducedModel m = make_reduced_model(4, 1, 20, 6, 8);
  EXPECT_NEAR(m.omega_n, 0.57282, 5e-6);
  EXPECT_NEAR(m.zeta, 0.87287, 5e-6);
}

TEST(Aggregate, DenominatorIdentity) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    const double h = 1 + 9 * u(rng), d = 2 * u(rng), r = 1 + 40 * u(rng), f = r * u(rng),
                 t = 2 + 10 * u(rng);
    const ReducedModel m = make_reduced_model(h, d, r, f, t);
    const double a1 = (2 * h + t * (d + f)) / (2 * h * t);
    const double a0 = (d + r) / (2 * h * t);
    EXPECT_NEAR(2 * m.zeta * m.omega_n, a1, 1e-12 * std::max(1.0, a1));
    EXPECT_NEAR(m.omega_n * m.omega_n, a0, 1e-12 * std::max(1.0, a0));
  }
}

TEST(Aggregate, SingleUnitAtBaseGivesInverseDroop) {
  const SystemModel s = build_system({testing::make_tg(8, 0.2, 0.3, 0.3, 0.05, 4, 100)}, {}, {},
                                     1.0, 100.0);
  const ReducedModel m = aggregate(s, testing::single_on());
  EXPECT_DOUBLE_EQ(m.r, 20.0);
  EXPECT_DOUBLE_EQ(m.f, 6.0);
  EXPECT_DOUBLE_EQ(m.h, 4.0);
  EXPECT_DOUBLE_EQ(m.t, 8.0);
}

TEST(Aggregate, SumsRegulationOverOnlineUnits) {
  const SystemModel s = testing::example_system();
  const CommitmentScenario sc = testing::all_on(s, 0.5);
  double r = 0, f = 0, wt = 0, tg = 0;
  for (const auto& g : s.tgs()) {
    const double k = g.capacity_mva / s.s_base_mva() / g.droop;
    r += k;
    f += k * g.hp_fraction;
    wt += k * g.t_reheat;
    tg += k;
  }
  for (std::size_t j = 0; j < s.res_count(); ++j)
    r += sc.res_power_mw[j] / s.s_base_mva() / s.ress()[j].droop;
  const ReducedModel m = aggregate(s, sc);
  EXPECT_NEAR(m.r, r, 1e-12);
  EXPECT_NEAR(m.f, f, 1e-12);
  EXPECT_NEAR(m.t, wt / tg, 1e-12);
  EXPECT_NEAR(m.h, system_inertia(s, sc), 1e-12);
  EXPECT_FALSE(m.degenerate);
}

TEST(Aggregate, EmptyCommitmentIsDegenerate) {
  const SystemModel s = testing::example_system();
  CommitmentScenario sc = testing::all_on(s);
  sc.tg_on.assign(s.tg_count(), 0);
  sc.res_participates.assign(s.res_count(), 0);
  const ReducedModel m = aggregate(s, sc);
  EXPECT_TRUE(m.degenerate);
  EXPECT_EQ(m.r, 0.0);
  EXPECT_EQ(m.f, 0.0);
}

TEST(Aggregate, UndampedSystemIsAnError) {
  const SystemModel s = build_system({testing::make_tg(8, 0.2, 0.3, 0.3, 0.05, 4, 100)}, {},
                                     {{100.0, 3.0}}, 0.0, 100.0);
  EXPECT_THROW(aggregate(s, CommitmentScenario{{0}, {}, {}}), NumericalError);
}

TEST(AnalyticNadir, ZeroDisturbanceAndProportionality) {
  const ReducedModel m = make_reduced_model(4, 1, 20, 6, 8);
  EXPECT_EQ(analytic_nadir(m, 0.0).delta_f_nadir, 0.0);
  const double a = analytic_nadir(m, 0.05).delta_f_nadir;
  const double b = analytic_nadir(m, 0.10).delta_f_nadir;
  EXPECT_LT(a, 0.0);
  EXPECT_NEAR(b, 2 * a, 1e-15);
}

TEST(AnalyticNadir, MatchesIndependentIntegration) {
  const ReducedModel m = make_reduced_model(4, 1, 20, 6, 8);
  EXPECT_NEAR(analytic_nadir(m, 0.05).delta_f_nadir, integrated_nadir(m, 0.05), 1e-7);
}

TEST(AnalyticNadir, MatchesFullOrderSimulationOfEquivalentSystem) {
  const SystemModel s = testing::second_order_system(4, 1, 20, 6, 8);
  const auto trace = simulate_response(s, testing::single_on(), 0.05);
  const AnalyticNadir a = analytic_nadir(aggregate(s, testing::single_on()), 0.05);
  EXPECT_NEAR(find_nadir(trace).delta_f_pu, a.delta_f_nadir, 1e-4);
}

TEST(AnalyticNadir, OverdampedIsRejected) {
  const ReducedModel m = make_reduced_model(10, 2, 2, 1.5, 2);
  ASSERT_GE(m.zeta, 1.0);
  EXPECT_THROW(analytic_nadir(m, 0.05), NumericalError);
}

TEST(AnalyticMargin, RoundTripAndLinearity) {
  const ReducedModel m = make_reduced_model(4, 1, 20, 6, 8);
  const double margin = analytic_margin(m, 0.01);
  EXPECT_NEAR(std::abs(analytic_nadir(m, margin).delta_f_nadir), 0.01, 1e-12);
  EXPECT_NEAR(analytic_margin(m, 0.02), 2 * margin, 1e-12);
  EXPECT_THROW(analytic_margin(m, 0.0), ValidationError);
}

TEST(AnalyticMargin, AgreesWithBisectionOnTheClosedForm) {
  const ReducedModel m = make_reduced_model(4, 1, 20, 6, 8);
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::abs(analytic_nadir(m, mid).delta_f_nadir) <= 0.01 ? lo : hi) = mid;
  }
  EXPECT_NEAR(analytic_margin(m, 0.01), lo, 1e-9);
}

TEST(AnalyticMargin, IncreasesWithInertiaAndRegulation) {
  for (double r : {10.0, 20.0, 30.0}) {
    double prev = 0.0;
    for (double h = 2.0; h <= 8.0; h += 0.5) {
      const ReducedModel m = make_reduced_model(h, 1, r, 0.3 * r, 8);
      if (m.zeta >= 1.0) continue;
      const double v = analytic_margin(m, 0.01);
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
  for (double h : {3.0, 5.0}) {
    double prev = 0.0;
    for (double r = 8.0; r <= 40.0; r += 2.0) {
      const ReducedModel m = make_reduced_model(h, 1, r, 0.3 * r, 8);
      if (m.zeta >= 1.0) continue;
      const double v = analytic_margin(m, 0.01);
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
}

TEST(ReducedMargin, OverdampedFallbackMatchesSimulatedEquivalent) {
  const double h = 10, d = 2, r = 2, f = 1.5, t = 2;
  const ReducedModel m = make_reduced_model(h, d, r, f, t);
  ASSERT_GE(m.zeta, 1.0);
  const double fallback = reduced_margin(m, 0.01);
  const SystemModel s = testing::second_order_system(h, d, r, f, t);
  MarginSpec spec;
  spec.tol_pu = 1e-6;
  spec.sim.horizon_s = 60.0;
  const double bisected = margin_bisect(s, testing::single_on(), spec).margin_pu;
  EXPECT_NEAR(fallback, bisected, 1e-3 * bisected);
}

}  // namespace
}  // namespace fnclin
