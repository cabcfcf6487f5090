#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "fnclin/errors.hpp"
#include "fnclin/scenario_data.hpp"
#include "fixtures.hpp"

namespace fnclin {
namespace {

class ScenarioData : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    model_ = new SystemModel(testing::example_system());
    weights_ = new ElmWeights(init_weights(10, 11, *model_));
    data_ = new LabeledDataset(label_dataset(*model_, generate_scenarios(*model_, 40, 21),
                                             MarginSpec{}, *weights_));
    data_->provenance.generator_seed = 21;
  }
  static void TearDownTestSuite() {
    delete data_;
    delete weights_;
    delete model_;
  }
  static SystemModel* model_;
  static ElmWeights* weights_;
  static LabeledDataset* data_;
};

SystemModel* ScenarioData::model_ = nullptr;
ElmWeights* ScenarioData::weights_ = nullptr;
LabeledDataset* ScenarioData::data_ = nullptr;

TEST_F(ScenarioData, GeneratorIsDeterministic) {
  EXPECT_EQ(generate_scenarios(*model_, 30, 4), generate_scenarios(*model_, 30, 4));
  EXPECT_NE(generate_scenarios(*model_, 30, 4), generate_scenarios(*model_, 30, 5));
}

TEST_F(ScenarioData, GeneratedScenariosAreValid) {
  for (const auto& s : generate_scenarios(*model_, 200, 8)) {
    EXPECT_NO_THROW(validate_scenario(*model_, s));
    int on = 0;
    for (auto b : s.tg_on) on += b;
    EXPECT_GE(on, 1);
    for (std::size_t j = 0; j < s.res_power_mw.size(); ++j) {
      const double cap = model_->ress()[j].capacity_mw;
      EXPECT_EQ(s.res_participates[j], s.res_power_mw[j] >= kParticipationThreshold * cap ? 1 : 0);
    }
  }
}

TEST_F(ScenarioData, CommitmentFollowsLoad) {
  LoadProfileOptions light, heavy;
  light.fixed_load_frac = 0.3;
  heavy.fixed_load_frac = 1.0;
  auto committed = [&](const LoadProfileOptions& o) {
    double total = 0;
    for (const auto& s : generate_scenarios(*model_, 50, 2, o))
      for (std::size_t i = 0; i < s.tg_on.size(); ++i) total += s.tg_on[i] * model_->tgs()[i].capacity_mva;
    return total;
  };
  EXPECT_LT(committed(light), committed(heavy));
}

TEST_F(ScenarioData, LabelsSatisfyTheCertificate) {
  const auto& spec = data_->provenance.margin;
  for (const auto& r : data_->records) {
    EXPECT_LE(nadir_magnitude(*model_, r.scenario, r.label_pu, spec.sim), spec.delta_f_max_pu);
    EXPECT_GT(nadir_magnitude(*model_, r.scenario, r.label_pu + spec.tol_pu, spec.sim),
              spec.delta_f_max_pu);
  }
}

TEST_F(ScenarioData, FeatureRowsMatchRecords) {
  ASSERT_EQ(data_->features.rows(), static_cast<Eigen::Index>(data_->size()));
  for (std::size_t k = 0; k < data_->size(); ++k)
    EXPECT_EQ(Eigen::VectorXd(data_->features.row(static_cast<Eigen::Index>(k)).transpose()),
              feature_vector(*weights_, *model_, data_->records[k].scenario));
}

TEST_F(ScenarioData, SplitPartitionsTheRecords) {
  const auto [train, test] = split(*data_, 30, 9);
  EXPECT_EQ(train.size(), 30u);
  EXPECT_EQ(test.size(), 10u);
  std::set<std::uint64_t> ids;
  for (const auto& r : train.records) ids.insert(r.id);
  for (const auto& r : test.records) EXPECT_EQ(ids.count(r.id), 0u);
  for (const auto& r : test.records) ids.insert(r.id);
  EXPECT_EQ(ids.size(), data_->size());
  for (std::size_t k = 0; k < train.size(); ++k)
    EXPECT_EQ(Eigen::VectorXd(train.features.row(static_cast<Eigen::Index>(k)).transpose()),
              feature_vector(*weights_, *model_, train.records[k].scenario));
}

TEST_F(ScenarioData, SplitIsDeterministicInSeed) {
  EXPECT_EQ(split(*data_, 25, 3).first, split(*data_, 25, 3).first);
  EXPECT_NE(split(*data_, 25, 3).first, split(*data_, 25, 4).first);
}

TEST_F(ScenarioData, SplitBounds) {
  EXPECT_EQ(split(*data_, data_->size() - 1, 1).second.size(), 1u);
  EXPECT_THROW(split(*data_, 0, 1), ValidationError);
  EXPECT_THROW(split(*data_, data_->size(), 1), ValidationError);
}

TEST_F(ScenarioData, TextRoundTrip) {
  std::stringstream io;
  write_dataset(io, *model_, *data_);
  const LabeledDataset back = read_dataset(io, *model_);
  EXPECT_EQ(back, *data_);
}

TEST_F(ScenarioData, HashMismatchIsRejected) {
  std::stringstream io;
  write_dataset(io, *model_, *data_);
  auto tgs = model_->tgs();
  tgs[0].inertia += 0.5;
  const SystemModel other = build_system(tgs, model_->ress(), model_->others(), model_->damping(),
                                         model_->s_base_mva());
  EXPECT_THROW(read_dataset(io, other), ValidationError);
}

TEST_F(ScenarioData, MalformedRecordIsRejected) {
  std::stringstream io;
  write_dataset(io, *model_, *data_);
  std::string text = io.str();
  text += "999; 12; 1:3; 0.1\n";
  std::istringstream in(text);
  EXPECT_THROW(read_dataset(in, *model_), ValidationError);
}

TEST_F(ScenarioData, ZeroNoiseKeepsEverything) {
  PerturbOptions p;
  p.flip_prob = 0.0;
  p.jitter = 0.0;
  const LabeledDataset same = perturb_dataset(*model_, *data_, 77, p, *weights_);
  EXPECT_EQ(same.records, data_->records);
  EXPECT_EQ(same.provenance.noise_seed, std::optional<std::uint64_t>(77));
}

TEST_F(ScenarioData, CertainFlipTogglesEveryBit) {
  const SystemModel single = build_system(
      {testing::make_tg(7, 0.2, 0.3, 0.3, 0.05, 5, 100), testing::make_tg(7, 0.2, 0.3, 0.3, 0.05, 5, 100)},
      {}, {}, 1.0, 200.0);
  const ElmWeights w = init_weights(4, 1, single);
  CommitmentScenario s;
  s.tg_on = {1, 0};
  const LabeledDataset d = label_dataset(single, {s}, MarginSpec{}, w);
  PerturbOptions p;
  p.flip_prob = 1.0;
  p.jitter = 0.0;
  const LabeledDataset flipped = perturb_dataset(single, d, 5, p, w);
  ASSERT_EQ(flipped.size(), 1u);
  EXPECT_EQ(flipped.records[0].scenario.tg_on, (std::vector<std::uint8_t>{0, 1}));
}

TEST_F(ScenarioData, FlipRateIsBinomial) {
  // Count flipped TG bits over many records; 3 sigma band around n p.
  const auto scenarios = generate_scenarios(*model_, 400, 31);
  LabeledDataset d;
  for (std::size_t k = 0; k < scenarios.size(); ++k) d.records.push_back({k, scenarios[k], 0.1});
  d.provenance.margin = MarginSpec{};
  PerturbOptions p;
  p.flip_prob = 0.05;
  p.jitter = 0.0;
  LabelingOptions lo;
  lo.jobs = 2;
  const LabeledDataset noisy = perturb_dataset(*model_, d, 3, p, *weights_, lo);
  std::size_t flips = 0, bits = 0;
  for (const auto& r : noisy.records) {
    const auto& orig = scenarios[r.id].tg_on;
    for (std::size_t i = 0; i < orig.size(); ++i) flips += orig[i] != r.scenario.tg_on[i];
    bits += orig.size();
  }
  const double n = static_cast<double>(bits);
  EXPECT_NEAR(static_cast<double>(flips), n * 0.05, 3.0 * std::sqrt(n * 0.05 * 0.95));
}

TEST_F(ScenarioData, PerturbRejectsBadProbability) {
  PerturbOptions p;
  p.flip_prob = 1.5;
  EXPECT_THROW(perturb_dataset(*model_, *data_, 1, p, *weights_), ValidationError);
}

TEST_F(ScenarioData, ParallelLabelingMatchesSerial) {
  const auto scenarios = generate_scenarios(*model_, 12, 40);
  LabelingOptions par;
  par.jobs = 4;
  EXPECT_EQ(label_dataset(*model_, scenarios, MarginSpec{}, *weights_),
            label_dataset(*model_, scenarios, MarginSpec{}, *weights_, par));
}

}  // namespace
}  // namespace fnclin
