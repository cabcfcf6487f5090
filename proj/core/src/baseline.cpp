#include "fnclin/baseline.hpp"

#include "fnclin/elm_features.hpp"
#include "fnclin/errors.hpp"
#include "fnclin/reduced_order.hpp"

namespace fnclin {

BaselineModel train_baseline(const SystemModel& model,
                             std::span<const CommitmentScenario> scenarios,
                             const BaselineOptions& options) {
  if (scenarios.empty()) throw ValidationError("baseline needs at least one scenario");
  if (options.segments < 1) throw ValidationError("baseline segment count must be >= 1");

  const auto n = static_cast<Eigen::Index>(scenarios.size());
  Eigen::MatrixXd features;
  Eigen::VectorXd targets(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const CommitmentScenario& s = scenarios[static_cast<std::size_t>(k)];
    // Step 1: reduced-model margin; this is where the reduction error enters.
    targets(k) = reduced_margin(aggregate(model, s), options.delta_f_max_pu);
    const Eigen::VectorXd z = raw_feature_vector(model, s);
    if (k == 0) features.resize(n, z.size());
    features.row(k) = z.transpose();
  }

  // Step 2: piecewise-linear fit of the analytic margins.
  TrainOptions fit;
  fit.segments = std::min<int>(options.segments, static_cast<int>(n));
  fit.seed = options.seed;
  fit.max_iters = options.max_iters;
  fit.restarts = options.restarts;
  BaselineModel out;
  out.pwl = train_min_affine_l1(features, targets, fit);
  out.delta_f_max_pu = options.delta_f_max_pu;
  return out;
}

double predict_baseline(const BaselineModel& baseline, const SystemModel& model,
                        const CommitmentScenario& scenario) {
  return eval_pwl(baseline.pwl, raw_feature_vector(model, scenario));
}

}  // namespace fnclin
