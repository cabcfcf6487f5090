#include <gtest/gtest.h>

#include "fnclin/baseline.hpp"
#include "fnclin/elm_features.hpp"
#include "fnclin/errors.hpp"
#include "fnclin/margin.hpp"
#include "fnclin/reduced_order.hpp"
#include "fnclin/scenario_data.hpp"
#include "fixtures.hpp"

namespace fnclin {
namespace {

TEST(Baseline, SingleSegmentIsTheL1AffineFit) {
  const SystemModel m = testing::example_system();
  const auto scenarios = generate_scenarios(m, 60, 3);
  BaselineOptions o;
  o.segments = 1;
  const BaselineModel b = train_baseline(m, scenarios, o);
  ASSERT_EQ(b.pwl.segments.size(), 1u);

  Eigen::MatrixXd z(60, raw_feature_vector(m, scenarios[0]).size());
  Eigen::VectorXd y(60);
  for (int k = 0; k < 60; ++k) {
    z.row(k) = raw_feature_vector(m, scenarios[k]).transpose();
    y(k) = reduced_margin(aggregate(m, scenarios[k]), o.delta_f_max_pu);
  }
  const SegmentFit direct = fit_segment_l1(z, y);
  const Eigen::VectorXd pred = eval_pwl_rows(b.pwl, z);
  const double fitted = (pred - y).cwiseAbs().sum();
  EXPECT_NEAR(fitted, direct.objective, 1e-9 * std::max(1.0, direct.objective));
}

TEST(Baseline, ErrorMatchesFitErrorWhenReductionIsExact) {
  // With negligible governor lags and a shared reheat constant the reduced
  // model is the full model, so the baseline's error against simulated
  // labels is only its fit error.
  std::vector<TgParams> tgs;
  for (int i = 0; i < 4; ++i)
    tgs.push_back(testing::make_tg(7.0, 1e-4, 1e-4, 0.3, 0.05, 4.0 + 0.5 * i, 100.0 + 20 * i));
  const SystemModel m = build_system(tgs, {}, {}, 1.0, 400.0);

  std::vector<CommitmentScenario> scenarios;
  for (int mask = 1; mask < 16; ++mask) {
    CommitmentScenario s;
    for (int i = 0; i < 4; ++i) s.tg_on.push_back((mask >> i) & 1);
    scenarios.push_back(s);
  }
  BaselineOptions o;
  o.segments = 1;
  const BaselineModel b = train_baseline(m, scenarios, o);

  MarginSpec spec;
  spec.tol_pu = 1e-7;
  spec.sim.dt = 1e-3;
  for (const auto& s : scenarios) {
    const double analytic = reduced_margin(aggregate(m, s), o.delta_f_max_pu);
    const double simulated = margin_bisect(m, s, spec).margin_pu;
    const double pred = predict_baseline(b, m, s);
    EXPECT_NEAR(simulated, analytic, 2e-3 * analytic);
    EXPECT_NEAR(std::abs(pred - simulated), std::abs(pred - analytic), 2e-3 * analytic);
  }
}

TEST(Baseline, Deterministic) {
  const SystemModel m = testing::example_system();
  const auto scenarios = generate_scenarios(m, 80, 5);
  BaselineOptions o;
  o.segments = 4;
  EXPECT_EQ(train_baseline(m, scenarios, o).pwl, train_baseline(m, scenarios, o).pwl);
}

TEST(Baseline, RejectsEmptyInput) {
  const SystemModel m = testing::example_system();
  EXPECT_THROW(train_baseline(m, std::vector<CommitmentScenario>{}), ValidationError);
}

}  // namespace
}  // namespace fnclin
