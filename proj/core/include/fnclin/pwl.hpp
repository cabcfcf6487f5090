#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace fnclin {

struct AffineSegment {
  Eigen::VectorXd c;
  double h = 0.0;

  double value(const Eigen::Ref<const Eigen::VectorXd>& z) const { return c.dot(z) + h; }
  bool operator==(const AffineSegment& other) const {
    return h == other.h && c.size() == other.c.size() && c == other.c;
  }
};

struct TrainingMeta {
  std::uint64_t seed = 0;
  int segments = 0;
  int iterations = 0;
  int restarts = 0;
  /// Sum over training samples of the prediction (larger is tighter).
  double objective = 0.0;
  /// Best score seen so far after each iteration, across all restarts. Not
  /// persisted.
  std::vector<double> objective_history;

  bool operator==(const TrainingMeta& o) const {
    return seed == o.seed && segments == o.segments && iterations == o.iterations &&
           restarts == o.restarts && objective == o.objective;
  }
};

/// Concave piecewise-linear predictor min_l (c_l . z + h_l).
struct PwlModel {
  std::vector<AffineSegment> segments;
  TrainingMeta meta;

  std::size_t feature_dim() const { return segments.empty() ? 0 : segments.front().c.size(); }
  void validate() const;
  bool operator==(const PwlModel&) const = default;
};

/// Throws ValidationError on dimension mismatch.
double eval_pwl(const PwlModel& model, const Eigen::Ref<const Eigen::VectorXd>& z);
std::size_t active_segment(const PwlModel& model, const Eigen::Ref<const Eigen::VectorXd>& z);
Eigen::VectorXd eval_pwl_rows(const PwlModel& model, const Eigen::MatrixXd& samples);

struct SegmentFit {
  Eigen::VectorXd c;
  double h = 0.0;
  /// Dimension of the span of sample differences; c is confined to it.
  int rank = 0;
  bool rank_deficient = false;
  int active_constraints = 0;
  /// Sum of predictions (one-sided fit) or of absolute residuals (L1 fit).
  double objective = 0.0;
};

/// Highest affine underestimator of the samples:
///   maximize sum_k (c . z_k + h)  s.t.  c . z_k + h <= y_k.
/// Solved through its dual with the dense simplex. c is restricted to the span
/// of the sample differences, which keeps the problem bounded and picks the
/// minimum-norm representative when the samples are rank deficient.
/// Rows of `samples` are the z_k.
SegmentFit fit_segment_lp(const Eigen::MatrixXd& samples, const Eigen::VectorXd& labels);

/// Least-absolute-error affine fit (no sign constraint), same span restriction.
SegmentFit fit_segment_l1(const Eigen::MatrixXd& samples, const Eigen::VectorXd& labels);

struct TrainOptions {
  int segments = 3;
  std::uint64_t seed = 0;
  int max_iters = 50;
  int restarts = 10;
};

/// One-sided min-of-affine training by alternating partition: assign every
/// sample to its active segment, refit each segment's underestimator LP on its
/// own samples, repeat. Each restart runs this from its random partition and
/// again from the partition a least-absolute pass settles on. Every iterate
/// underestimates every training label, so the returned model satisfies
/// eval_pwl(z_k) <= y_k for all k. The best iterate over all passes is kept.
PwlModel train_elm_pwl(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                       const TrainOptions& options = {});

/// Unconstrained least-absolute-error min-of-affine fit with the same
/// alternating scheme.
PwlModel train_min_affine_l1(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                             const TrainOptions& options);

}  // namespace fnclin
