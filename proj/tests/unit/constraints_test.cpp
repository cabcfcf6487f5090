#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "fnclin/constraints.hpp"
#include "fnclin/errors.hpp"
#include "fnclin/scenario_data.hpp"
#include "fixtures.hpp"

namespace fnclin {
namespace {

// A random model is enough here: emission is exact for any segments.
PwlModel random_pwl(std::size_t dim, int segments, unsigned seed) {
  std::srand(seed);
  PwlModel m;
  for (int l = 0; l < segments; ++l)
    m.segments.push_back({Eigen::VectorXd::Random(static_cast<Eigen::Index>(dim)) * 0.01,
                          0.05 + 0.01 * l});
  return m;
}

double block_min(const LinearConstraintBlock& b, const CommitmentScenario& s) {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& row : b.rows) v = std::min(v, row.evaluate(s));
  return v;
}

class Constraints : public ::testing::Test {
 protected:
  SystemModel model = testing::example_system();
  ElmWeights weights = init_weights(10, 3, model);
  std::size_t dim = feature_layout(weights, model).dim();
};

TEST_F(Constraints, OneBlockPerTgAndOneRowPerSegment) {
  const auto blocks = emit_constraints(random_pwl(dim, 3, 1), weights, model);
  ASSERT_EQ(blocks.size(), model.tg_count());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    EXPECT_EQ(blocks[i].contingency_tg, i);
    EXPECT_EQ(blocks[i].rows.size(), 3u);
    for (const auto& row : blocks[i].rows) {
      EXPECT_EQ(row.tg_coef[i], 0.0);
      EXPECT_EQ(row.tg_coef.size(), model.tg_count());
      EXPECT_EQ(row.res_coef.size(), model.res_count());
    }
  }
}

TEST_F(Constraints, SingleSegmentGivesSingleRow) {
  const auto blocks = emit_constraints(random_pwl(dim, 1, 2), weights, model);
  for (const auto& b : blocks) EXPECT_EQ(b.rows.size(), 1u);
}

TEST_F(Constraints, RowsReproducePostContingencyPrediction) {
  const PwlModel pwl = random_pwl(dim, 4, 3);
  const auto blocks = emit_constraints(pwl, weights, model);
  const auto scenarios = generate_scenarios(model, 50, 12);
  for (const auto& s : scenarios) {
    for (std::size_t i = 0; i < model.tg_count(); ++i) {
      if (!s.tg_on[i]) continue;
      CommitmentScenario tripped = s;
      tripped.tg_on[i] = 0;
      const double direct = model.s_base_mva() * eval_pwl(pwl, feature_vector(weights, model, tripped));
      EXPECT_NEAR(block_min(blocks[i], s), direct, 1e-9 * std::max(1.0, std::abs(direct)));
      // The row value ignores x_i, so it is the same whether or not i is on.
      EXPECT_EQ(block_min(blocks[i], s), block_min(blocks[i], tripped));
    }
  }
}

TEST_F(Constraints, DimensionMismatchIsAnError) {
  EXPECT_THROW(emit_constraints(random_pwl(dim + 1, 2, 4), weights, model), ValidationError);
}

TEST_F(Constraints, SatisfiedNeedsEveryRow) {
  LinearConstraintBlock b;
  LinearRow r1, r2;
  r1.tg_coef = {10.0};
  r1.constant = 5.0;
  r2.tg_coef = {0.0};
  r2.constant = 12.0;
  b.rows = {r1, r2};
  CommitmentScenario s;
  s.tg_on = {1};
  EXPECT_TRUE(b.satisfied(s, 12.0));
  EXPECT_FALSE(b.satisfied(s, 12.5));
  s.tg_on = {0};
  EXPECT_FALSE(b.satisfied(s, 6.0));
  EXPECT_TRUE(b.satisfied(s, 5.0));
}

TEST_F(Constraints, TextListsEveryContingency) {
  const auto blocks = emit_constraints(random_pwl(dim, 2, 5), weights, model);
  std::ostringstream os;
  write_constraints_text(os, blocks, model);
  const std::string text = os.str();
  for (std::size_t i = 0; i < model.tg_count(); ++i) {
    const std::string tag = "[contingency g" + std::to_string(i) + "]";
    EXPECT_NE(text.find(tag), std::string::npos) << tag;
    EXPECT_NE(text.find(">= P_g" + std::to_string(i)), std::string::npos);
  }
  EXPECT_NE(text.find("p_r3"), std::string::npos);
}

TEST_F(Constraints, CsvHasOneLinePerCoefficient) {
  const auto blocks = emit_constraints(random_pwl(dim, 2, 6), weights, model);
  std::ostringstream os;
  write_constraints_csv(os, blocks);
  const std::string csv = os.str();
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  const auto per_row = model.tg_count() + model.res_count() + 1;
  EXPECT_EQ(static_cast<std::size_t>(lines), 1 + model.tg_count() * 2 * per_row);
  EXPECT_EQ(csv.rfind("contingency,row,variable,coefficient\n", 0), 0u);
}

TEST_F(Constraints, AuditExtremes) {
  const auto blocks = emit_constraints(random_pwl(dim, 2, 7), weights, model);
  std::vector<AuditCase> cases;
  for (const auto& s : generate_scenarios(model, 4, 13)) {
    AuditCase c;
    c.scenario = s;
    c.dispatch_mw.assign(model.tg_count(), 0.0);
    cases.push_back(c);
  }
  const AuditReport zero = audit_constraints(blocks, model, cases, MarginSpec{});
  EXPECT_GT(zero.checks, 0u);
  EXPECT_EQ(zero.false_safe, 0u);

  for (auto& c : cases) c.dispatch_mw.assign(model.tg_count(), 1e9);
  const AuditReport huge = audit_constraints(blocks, model, cases, MarginSpec{}, 2);
  EXPECT_EQ(huge.false_safe, 0u);
  EXPECT_EQ(huge.conservative, 0u);
  EXPECT_EQ(huge.agree, huge.checks);
  EXPECT_EQ(huge.false_safe_rate(), 0.0);
}

TEST_F(Constraints, AuditRejectsWrongDispatchLength) {
  const auto blocks = emit_constraints(random_pwl(dim, 1, 8), weights, model);
  AuditCase c;
  c.scenario = testing::all_on(model);
  c.dispatch_mw = {1.0};
  EXPECT_THROW(audit_constraints(blocks, model, {c}, MarginSpec{}), ValidationError);
}

}  // namespace
}  // namespace fnclin
