#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "fnclin/errors.hpp"
#include "fnclin/margin.hpp"
#include "fnclin/reduced_order.hpp"
#include "fnclin/simulation.hpp"

namespace fnclin {
namespace {

void expect_certificate(const SystemModel& m, const CommitmentScenario& s, const MarginSpec& spec,
                        double margin) {
  const double below = std::max(margin - spec.tol_pu, 0.0);
  EXPECT_LE(nadir_magnitude(m, s, below, spec.sim), spec.delta_f_max_pu);
  EXPECT_GT(nadir_magnitude(m, s, margin + spec.tol_pu, spec.sim), spec.delta_f_max_pu);
}

TEST(MarginSpec, Validation) {
  MarginSpec s;
  EXPECT_NO_THROW(s.validate());
  s.tol_pu = 0.0;
  EXPECT_THROW(s.validate(), ValidationError);
  s = {};
  s.dp_hi = s.tol_pu;
  EXPECT_THROW(s.validate(), ValidationError);
  s = {};
  s.delta_f_max_pu = -0.01;
  EXPECT_THROW(s.validate(), ValidationError);
}

TEST(MarginBisect, BracketingCertificateOnExampleScenarios) {
  const SystemModel m = testing::example_system();
  const MarginSpec spec;
  CommitmentScenario s = testing::all_on(m, 0.6);
  for (std::size_t off = 0; off < 4; ++off) {
    s.tg_on[off] = 0;
    const MarginResult r = margin_bisect(m, s, spec);
    EXPECT_FALSE(r.unbounded);
    expect_certificate(m, s, spec, r.margin_pu);
  }
}

TEST(MarginBisect, CapReturnsUnboundedFlag) {
  const SystemModel m = testing::example_system();
  MarginSpec spec;
  spec.dp_hi = 0.01;
  spec.cap_pu = 0.02;
  const MarginResult r = margin_bisect(m, testing::all_on(m), spec);
  EXPECT_TRUE(r.unbounded);
  EXPECT_EQ(r.margin_pu, 0.02);
}

TEST(MarginBisect, NearSecondOrderMatchesAnalyticMargin) {
  const SystemModel m = testing::second_order_system(4, 1, 20, 6, 8);
  MarginSpec spec;
  const double bisected = margin_bisect(m, testing::single_on(), spec).margin_pu;
  const double analytic = analytic_margin(aggregate(m, testing::single_on()), spec.delta_f_max_pu);
  EXPECT_NEAR(bisected, analytic, std::max(spec.tol_pu, 1e-3));
}

TEST(MarginBisect, DeadbandShrinksMargin) {
  const SystemModel plain = testing::second_order_system(4, 1, 20, 6, 8, 0.2, 0.0);
  const SystemModel db = testing::second_order_system(4, 1, 20, 6, 8, 0.2, 5e-4);
  MarginSpec spec;
  EXPECT_LT(margin_bisect(db, testing::single_on(), spec).margin_pu,
            margin_bisect(plain, testing::single_on(), spec).margin_pu);
}

TEST(MarginBisect, SwitchingOffAnyUnitNeverRaisesMargin) {
  const SystemModel m = testing::example_system();
  const CommitmentScenario base = testing::all_on(m, 0.6);
  const MarginSpec spec;
  const double full = margin_bisect(m, base, spec).margin_pu;
  for (std::size_t i = 0; i < m.tg_count(); ++i) {
    CommitmentScenario s = base;
    s.tg_on[i] = 0;
    EXPECT_LE(margin_bisect(m, s, spec).margin_pu, full) << "unit " << i;
  }
}

TEST(MarginBisect, Deterministic) {
  const SystemModel m = testing::example_system();
  const auto s = testing::all_on(m, 0.4);
  const MarginResult a = margin_bisect(m, s);
  const MarginResult b = margin_bisect(m, s);
  EXPECT_EQ(a.margin_pu, b.margin_pu);
  EXPECT_EQ(a.simulations, b.simulations);
}

TEST(VerifyMonotone, ExampleGridIsMonotone) {
  const SystemModel m = testing::example_system();
  const std::vector<double> grid = {0.0, 0.02, 0.05, 0.1};
  const MonotoneReport r = verify_monotone(m, testing::all_on(m), grid);
  EXPECT_TRUE(r.monotone);
  EXPECT_EQ(r.nadir_magnitudes.size(), 4u);
  EXPECT_EQ(r.nadir_magnitudes[0], 0.0);
}

TEST(VerifyMonotone, TrivialGrids) {
  const SystemModel m = testing::example_system();
  EXPECT_TRUE(verify_monotone(m, testing::all_on(m), {}).monotone);
  const std::vector<double> one = {0.05};
  EXPECT_TRUE(verify_monotone(m, testing::all_on(m), one).monotone);
}

TEST(VerifyMonotone, DescendingGridIsRejected) {
  const SystemModel m = testing::example_system();
  const std::vector<double> grid = {0.1, 0.05};
  EXPECT_THROW(verify_monotone(m, testing::all_on(m), grid), ValidationError);
}

}  // namespace
}  // namespace fnclin
