#include "fnclin/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/SVD>

#include "fnclin/errors.hpp"
#include "fnclin/random.hpp"
#include "fnclin/simplex.hpp"

namespace fnclin {

void PwlModel::validate() const {
  if (segments.empty()) throw ValidationError("piecewise-linear model needs at least one segment");
  const auto d = segments.front().c.size();
  for (const auto& s : segments) {
    if (s.c.size() != d) throw ValidationError("segments disagree on feature dimension");
    if (!s.c.allFinite() || !std::isfinite(s.h)) throw ValidationError("segment is not finite");
  }
}

std::size_t active_segment(const PwlModel& model, const Eigen::Ref<const Eigen::VectorXd>& z) {
  if (model.segments.empty()) throw ValidationError("empty piecewise-linear model");
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < model.segments.size(); ++l) {
    const auto& seg = model.segments[l];
    if (seg.c.size() != z.size())
      throw ValidationError("feature dimension " + std::to_string(z.size()) +
                            " does not match model dimension " + std::to_string(seg.c.size()));
    const double v = seg.value(z);
    if (v < best_value) {
      best_value = v;
      best = l;
    }
  }
  return best;
}

double eval_pwl(const PwlModel& model, const Eigen::Ref<const Eigen::VectorXd>& z) {
  return model.segments[active_segment(model, z)].value(z);
}

Eigen::VectorXd eval_pwl_rows(const PwlModel& model, const Eigen::MatrixXd& samples) {
  Eigen::VectorXd out(samples.rows());
  for (Eigen::Index k = 0; k < samples.rows(); ++k) out(k) = eval_pwl(model, samples.row(k).transpose());
  return out;
}

namespace {

// Affine hull of a sample set: z = mean + Q u for z in the hull.
struct SampleSpan {
  Eigen::VectorXd mean;
  Eigen::MatrixXd basis;  // d x r, orthonormal columns
  Eigen::MatrixXd coords;  // n x r
};

SampleSpan sample_span(const Eigen::MatrixXd& z) {
  SampleSpan s;
  s.mean = z.colwise().mean().transpose();
  const Eigen::MatrixXd centred = z.rowwise() - s.mean.transpose();
  Eigen::Index rank = 0;
  if (z.rows() > 1 && z.cols() > 0) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centred, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double scale = std::max(sv.size() > 0 ? sv(0) : 0.0, 1e-300);
    const double cutoff = std::max(1e-9 * scale, 1e-12);
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    s.basis = svd.matrixV().leftCols(rank);
  } else {
    s.basis.resize(z.cols(), 0);
  }
  s.coords = centred * s.basis;
  return s;
}

double max_violation(const Eigen::VectorXd& c, double h, const Eigen::MatrixXd& z,
                     const Eigen::VectorXd& y) {
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < z.rows(); ++k)
    worst = std::max(worst, c.dot(z.row(k).transpose()) + h - y(k));
  return worst;
}

SegmentFit finish_fit(const SampleSpan& span, const Eigen::VectorXd& w, double g,
                      const Eigen::MatrixXd& z) {
  SegmentFit fit;
  fit.c = span.basis * w;
  fit.h = g - fit.c.dot(span.mean);
  fit.rank = static_cast<int>(span.basis.cols());
  fit.rank_deficient = fit.rank < std::min<Eigen::Index>(z.rows() - 1, z.cols());
  return fit;
}

void summarize(SegmentFit& fit, const Eigen::MatrixXd& z, const Eigen::VectorXd& y) {
  const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  fit.objective = 0.0;
  fit.active_constraints = 0;
  for (Eigen::Index k = 0; k < z.rows(); ++k) {
    const double v = fit.c.dot(z.row(k).transpose()) + fit.h;
    fit.objective += v;
    if (std::abs(v - y(k)) <= 1e-9 * scale) ++fit.active_constraints;
  }
}

void check_inputs(const Eigen::MatrixXd& z, const Eigen::VectorXd& y) {
  if (z.rows() == 0) throw ValidationError("segment fit needs at least one sample");
  if (z.rows() != y.size()) throw ValidationError("sample and label counts differ");
  if (!z.allFinite() || !y.allFinite()) throw ValidationError("samples and labels must be finite");
}

}  // namespace

SegmentFit fit_segment_lp(const Eigen::MatrixXd& z, const Eigen::VectorXd& y) {
  check_inputs(z, y);
  const SampleSpan span = sample_span(z);
  const Eigen::Index n = z.rows();
  const Eigen::Index r = span.basis.cols();

  // Dual: min y^T lambda  s.t.  sum_k lambda_k (u_k, 1) = sum_k (u_k, 1),
  // lambda >= 0. Its multipliers are the primal (w, g).
  Eigen::MatrixXd a(r + 1, n);
  a.topRows(r) = span.coords.transpose();
  a.row(r).setOnes();
  const Eigen::VectorXd b = a.rowwise().sum();
  const lp::LpResult res = lp::solve_standard_form(a, b, y);
  if (res.status != lp::LpStatus::Optimal)
    throw NumericalError(std::string("segment LP failed: ") + lp::to_string(res.status));

  SegmentFit fit = finish_fit(span, res.duals.head(r), res.duals(r), z);
  // Round-off can leave a constraint violated by a few ulps; pull h down so
  // the underestimate holds in the same arithmetic eval_pwl uses.
  for (int pass = 0; pass < 8; ++pass) {
    const double viol = max_violation(fit.c, fit.h, z, y);
    if (viol <= 0.0) break;
    fit.h -= viol + std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(fit.h));
  }
  summarize(fit, z, y);
  return fit;
}

SegmentFit fit_segment_l1(const Eigen::MatrixXd& z, const Eigen::VectorXd& y) {
  check_inputs(z, y);
  const SampleSpan span = sample_span(z);
  const Eigen::Index n = z.rows();
  const Eigen::Index r = span.basis.cols();

  // Dual of min sum_k |y_k - w . u_k - g|: max y^T lambda subject to
  // sum_k lambda_k (u_k, 1) = 0, -1 <= lambda <= 1. With mu = lambda + 1 it
  // is a box-bounded standard form whose multipliers are -(w, g).
  Eigen::MatrixXd a(r + 1, n);
  a.topRows(r) = span.coords.transpose();
  a.row(r).setOnes();
  const Eigen::VectorXd b = a.rowwise().sum();
  const lp::LpResult res =
      lp::solve_bounded(a, b, -y, Eigen::VectorXd::Constant(n, 2.0));
  if (res.status != lp::LpStatus::Optimal)
    throw NumericalError(std::string("L1 segment LP failed: ") + lp::to_string(res.status));

  const Eigen::VectorXd w = -res.duals.head(r);
  const double g = -res.duals(r);
  SegmentFit fit = finish_fit(span, w, g, z);
  summarize(fit, z, y);
  fit.objective = (z * fit.c + Eigen::VectorXd::Constant(n, fit.h) - y).cwiseAbs().sum();
  return fit;
}

namespace {

enum class FitKind { OneSided, LeastAbsolute };

struct Segment {
  Eigen::VectorXd w;
  double g = 0.0;
};

// Alternating-partition fit in the reduced coordinates u (rows of `u`).
class AlternatingFit {
 public:
  AlternatingFit(const Eigen::MatrixXd& u, const Eigen::VectorXd& y, FitKind kind)
      : u_(u), y_(y), kind_(kind) {}

  struct Outcome {
    std::vector<Segment> segments;
    double score = -std::numeric_limits<double>::infinity();  // larger is better
    int iterations = 0;
    std::vector<double> scores;  // per iteration
  };

  Outcome run(int segments, int max_iters, std::uint64_t seed) const {
    SplitMix64 rng(seed);
    std::vector<std::size_t> assign = initial_partition(segments, rng);
    std::vector<Segment> segs(static_cast<std::size_t>(segments));
    for (auto& s : segs) s.w = Eigen::VectorXd::Zero(u_.cols());

    Outcome best;
    if (kind_ == FitKind::OneSided) {
      // One-sided refits of a mixed partition are dragged down by its lowest
      // samples and the partition can lock in, so a second pass starts from
      // the partition a least-absolute pass settles on.
      std::vector<std::size_t> warm_assign = assign;
      alternate(kind_, assign, segs, max_iters, best);
      Outcome warm;
      alternate(FitKind::LeastAbsolute, warm_assign, segs, max_iters, warm);
      alternate(kind_, warm_assign, segs, max_iters, best);
    } else {
      alternate(kind_, assign, segs, max_iters, best);
    }
    return best;
  }

 private:
  void alternate(FitKind kind, std::vector<std::size_t>& assign, std::vector<Segment>& segs,
                 int max_iters, Outcome& best) const {
    const std::size_t k_count = assign.size();
    for (int it = 1; it <= max_iters; ++it) {
      refit(kind, segs, assign);
      Eigen::VectorXd pred(static_cast<Eigen::Index>(k_count));
      std::vector<std::size_t> next(k_count);
      for (std::size_t k = 0; k < k_count; ++k) {
        double v = std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < segs.size(); ++l) {
          const double s = value(segs[l], static_cast<Eigen::Index>(k));
          if (s < v) {
            v = s;
            next[k] = l;
          }
        }
        pred(static_cast<Eigen::Index>(k)) = v;
      }
      const double score = kind == FitKind::OneSided ? pred.sum() : -(pred - y_).cwiseAbs().sum();
      best.scores.push_back(score);
      if (score > best.score) {
        best.score = score;
        best.segments = segs;
        best.iterations = it;
      }
      reseed_empty(kind, next, segs.size(), pred);
      if (next == assign) break;
      assign = std::move(next);
    }
  }

  double value(const Segment& s, Eigen::Index k) const { return u_.row(k).dot(s.w) + s.g; }

  // Nearest of `segments` randomly chosen centres.
  std::vector<std::size_t> initial_partition(int segments, SplitMix64& rng) const {
    const std::size_t k_count = static_cast<std::size_t>(u_.rows());
    std::vector<std::size_t> order(k_count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < static_cast<std::size_t>(segments); ++i)
      std::swap(order[i], order[i + rng.below(k_count - i)]);
    std::vector<std::size_t> assign(k_count, 0);
    for (std::size_t k = 0; k < k_count; ++k) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < static_cast<std::size_t>(segments); ++l) {
        const double d = (u_.row(static_cast<Eigen::Index>(k)) -
                          u_.row(static_cast<Eigen::Index>(order[l])))
                             .squaredNorm();
        if (d < best) {
          best = d;
          assign[k] = l;
        }
      }
    }
    for (std::size_t l = 0; l < static_cast<std::size_t>(segments); ++l) assign[order[l]] = l;
    return assign;
  }

  // Segments left without samples take over the worst-fitted ones.
  void reseed_empty(FitKind kind, std::vector<std::size_t>& assign, std::size_t segments,
                    const Eigen::VectorXd& pred) const {
    std::vector<std::size_t> counts(segments, 0);
    for (auto a : assign) ++counts[a];
    std::vector<std::size_t> empty;
    for (std::size_t l = 0; l < segments; ++l)
      if (counts[l] == 0) empty.push_back(l);
    if (empty.empty()) return;
    const std::size_t k_count = assign.size();
    std::vector<std::size_t> order(k_count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto badness = [&](std::size_t k) {
      const double res = y_(static_cast<Eigen::Index>(k)) - pred(static_cast<Eigen::Index>(k));
      return kind == FitKind::OneSided ? res : std::abs(res);
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return badness(a) > badness(b); });
    const std::size_t take = std::max<std::size_t>(1, k_count / (2 * segments));
    std::size_t cursor = 0;
    for (std::size_t l : empty) {
      for (std::size_t n = 0; n < take && cursor < k_count; ++cursor) {
        const std::size_t k = order[cursor];
        if (counts[assign[k]] <= 1) continue;
        --counts[assign[k]];
        assign[k] = l;
        ++counts[l];
        ++n;
      }
    }
  }

  void refit(FitKind kind, std::vector<Segment>& segs,
             const std::vector<std::size_t>& assign) const {
    for (std::size_t l = 0; l < segs.size(); ++l) {
      std::vector<Eigen::Index> members;
      for (std::size_t k = 0; k < assign.size(); ++k)
        if (assign[k] == l) members.push_back(static_cast<Eigen::Index>(k));
      if (members.empty()) continue;
      Eigen::MatrixXd z(static_cast<Eigen::Index>(members.size()), u_.cols());
      Eigen::VectorXd y(static_cast<Eigen::Index>(members.size()));
      for (std::size_t m = 0; m < members.size(); ++m) {
        z.row(static_cast<Eigen::Index>(m)) = u_.row(members[m]);
        y(static_cast<Eigen::Index>(m)) = y_(members[m]);
      }
      const SegmentFit fit =
          kind == FitKind::OneSided ? fit_segment_lp(z, y) : fit_segment_l1(z, y);
      segs[l].w = fit.c;
      segs[l].g = fit.h;
    }
  }

  const Eigen::MatrixXd& u_;
  const Eigen::VectorXd& y_;
  FitKind kind_;
};

PwlModel train_alternating(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                           const TrainOptions& opt, FitKind kind) {
  if (opt.segments < 1) throw ValidationError("segment count must be >= 1");
  if (opt.restarts < 1 || opt.max_iters < 1)
    throw ValidationError("restarts and max_iters must be >= 1");
  if (features.rows() != labels.size()) throw ValidationError("feature and label counts differ");
  if (features.rows() < opt.segments)
    throw ValidationError("need at least as many samples as segments");
  if (!features.allFinite() || !labels.allFinite())
    throw ValidationError("features and labels must be finite");

  // All work happens in coordinates of the data's affine hull; segments are
  // mapped back to feature space at the end.
  const SampleSpan span = sample_span(features);
  const AlternatingFit fitter(span.coords, labels, kind);

  AlternatingFit::Outcome best;
  std::vector<double> history;
  double running = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < opt.restarts; ++r) {
    auto outcome = fitter.run(opt.segments, opt.max_iters,
                              derive_seed(opt.seed, static_cast<std::uint64_t>(r)));
    for (double s : outcome.scores) history.push_back(running = std::max(running, s));
    if (outcome.score > best.score) best = std::move(outcome);
  }

  PwlModel model;
  for (const auto& s : best.segments) {
    AffineSegment seg;
    seg.c = span.basis * s.w;
    seg.h = s.g - seg.c.dot(span.mean);
    model.segments.push_back(std::move(seg));
  }

  if (kind == FitKind::OneSided) {
    // Enforce the underestimate in feature-space arithmetic.
    for (int pass = 0; pass < 8; ++pass) {
      std::vector<double> shift(model.segments.size(), 0.0);
      bool any = false;
      for (Eigen::Index k = 0; k < features.rows(); ++k) {
        const Eigen::VectorXd z = features.row(k).transpose();
        const std::size_t l = active_segment(model, z);
        const double viol = model.segments[l].value(z) - labels(k);
        if (viol > 0.0) {
          shift[l] = std::max(shift[l], viol);
          any = true;
        }
      }
      if (!any) break;
      for (std::size_t l = 0; l < shift.size(); ++l)
        if (shift[l] > 0.0)
          model.segments[l].h -=
              shift[l] + std::numeric_limits<double>::epsilon() *
                             std::max(1.0, std::abs(model.segments[l].h));
    }
  }

  model.meta.seed = opt.seed;
  model.meta.segments = opt.segments;
  model.meta.iterations = best.iterations;
  model.meta.restarts = opt.restarts;
  model.meta.objective = eval_pwl_rows(model, features).sum();
  model.meta.objective_history = std::move(history);
  return model;
}

}  // namespace

PwlModel train_elm_pwl(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                       const TrainOptions& options) {
  return train_alternating(features, labels, options, FitKind::OneSided);
}

PwlModel train_min_affine_l1(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                             const TrainOptions& options) {
  return train_alternating(features, labels, options, FitKind::LeastAbsolute);
}

}  // namespace fnclin
