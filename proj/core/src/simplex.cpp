#include "fnclin/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fnclin/errors.hpp"

namespace fnclin::lp {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration limit";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Tableau {
 public:
  Tableau(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  double& at(Eigen::Index r, Eigen::Index c) { return data_[r * cols_ + c]; }
  double at(Eigen::Index r, Eigen::Index c) const { return data_[r * cols_ + c]; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }

  void pivot(Eigen::Index pr, Eigen::Index pc) {
    double* prow = &data_[pr * cols_];
    const double inv = 1.0 / prow[pc];
    for (Eigen::Index c = 0; c < cols_; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (Eigen::Index r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      double* row = &data_[r * cols_];
      const double factor = row[pc];
      if (factor == 0.0) continue;
      for (Eigen::Index c = 0; c < cols_; ++c) row[c] -= factor * prow[c];
      row[pc] = 0.0;
    }
  }

 private:
  Eigen::Index rows_, cols_;
  std::vector<double> data_;
};

// Variables sitting at their upper bound are replaced by u - x, so every
// nonbasic variable of the transformed problem is at zero.
struct BoundState {
  std::vector<double> upper;
  std::vector<bool> flipped;

  void flip(Tableau& t, Eigen::Index j) {
    const Eigen::Index rhs = t.cols() - 1;
    const double u = upper[j];
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      const double a = t.at(i, j);
      if (a == 0.0) continue;
      t.at(i, rhs) -= u * a;
      t.at(i, j) = -a;
    }
    flipped[j] = !flipped[j];
  }
};

struct PhaseOutcome {
  LpStatus status;
  int iterations;
};

// Runs simplex iterations on the tableau whose last row holds reduced costs.
// Columns at or beyond `enter_limit` never enter the basis; the artificial
// block [enter_limit, rhs) holds B^-1 and drives the lexicographic tie-break.
PhaseOutcome iterate(Tableau& t, std::vector<int>& basis, BoundState& bounds,
                     Eigen::Index enter_limit, const LpOptions& opt, int budget) {
  const Eigen::Index m = t.rows() - 1;
  const Eigen::Index rhs = t.cols() - 1;
  // Slack below the tolerance counts as exactly zero so degenerate rows tie.
  auto slack = [&](double v) { return v <= opt.tolerance ? 0.0 : v; };
  // Lexicographic order of the rows of B^-1 scaled by the pivot column; it
  // is what a vanishing perturbation of b would decide, so ties never cycle.
  auto lex_less = [&](Eigen::Index i, double ai, Eigen::Index l, double al) {
    for (Eigen::Index k = enter_limit; k < rhs; ++k) {
      const double ki = t.at(i, k) / ai, kl = t.at(l, k) / al;
      if (std::abs(ki - kl) > 1e-12 * std::max({1.0, std::abs(ki), std::abs(kl)})) return ki < kl;
    }
    return basis[i] < basis[l];
  };

  for (int it = 0; it < budget; ++it) {
    Eigen::Index enter = -1;
    double best = -opt.tolerance;
    for (Eigen::Index j = 0; j < enter_limit; ++j) {
      const double d = t.at(m, j);
      if (d < best) {
        enter = j;
        best = d;
      }
    }
    if (enter < 0) return {LpStatus::Optimal, it};

    Eigen::Index leave = -1;
    bool leave_at_upper = false;
    double best_ratio = kInf;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = t.at(i, enter);
      double ratio;
      bool to_upper = false;
      if (a > opt.tolerance) {
        ratio = slack(t.at(i, rhs)) / a;
      } else if (a < -opt.tolerance && std::isfinite(bounds.upper[basis[i]])) {
        ratio = slack(bounds.upper[basis[i]] - t.at(i, rhs)) / -a;
        to_upper = true;
      } else {
        continue;
      }
      const double tie = 1e-12 * std::max(1.0, best_ratio);
      if (leave < 0 || ratio < best_ratio - tie ||
          (ratio <= best_ratio + tie && lex_less(i, a, leave, t.at(leave, enter)))) {
        best_ratio = leave < 0 ? ratio : std::min(best_ratio, ratio);
        leave = i;
        leave_at_upper = to_upper;
      }
    }
    const double own = bounds.upper[enter];
    if (own <= best_ratio) {
      // The entering variable hits its own bound first: no basis change.
      if (!std::isfinite(own)) return {LpStatus::Unbounded, it};
      bounds.flip(t, enter);
      continue;
    }
    const int leaving = basis[leave];
    t.pivot(leave, enter);
    basis[leave] = static_cast<int>(enter);
    if (leave_at_upper) bounds.flip(t, leaving);
  }
  return {LpStatus::IterationLimit, budget};
}

}  // namespace

LpResult solve_bounded(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& c, const Eigen::VectorXd& upper,
                       const LpOptions& opt) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m || c.size() != n || upper.size() != n)
    throw ValidationError("LP dimensions are inconsistent");
  if (!a.allFinite() || !b.allFinite() || !c.allFinite())
    throw ValidationError("LP data must be finite");
  for (Eigen::Index j = 0; j < n; ++j)
    if (std::isnan(upper(j)) || upper(j) < 0.0)
      throw ValidationError("upper bounds must be non-negative");

  // Columns: n structural, m artificial, 1 right-hand side.
  Tableau t(m + 1, n + m + 1);
  const Eigen::Index rhs = n + m;
  std::vector<double> sign(static_cast<std::size_t>(m), 1.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    sign[i] = b(i) < 0.0 ? -1.0 : 1.0;
    for (Eigen::Index j = 0; j < n; ++j) t.at(i, j) = sign[i] * a(i, j);
    t.at(i, n + i) = 1.0;
    t.at(i, rhs) = sign[i] * b(i);
  }
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = static_cast<int>(n + i);
  BoundState bounds;
  bounds.upper.assign(static_cast<std::size_t>(n + m), kInf);
  for (Eigen::Index j = 0; j < n; ++j) bounds.upper[j] = upper(j);
  bounds.flipped.assign(static_cast<std::size_t>(n + m), false);

  // Phase one: minimise the sum of artificials.
  for (Eigen::Index j = 0; j < n; ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) s += t.at(i, j);
    t.at(m, j) = -s;
  }
  double bsum = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) bsum += t.at(i, rhs);
  t.at(m, rhs) = -bsum;

  LpResult result;
  auto phase1 = iterate(t, basis, bounds, n, opt, opt.max_iterations);
  result.iterations = phase1.iterations;
  if (phase1.status == LpStatus::IterationLimit) {
    result.status = LpStatus::IterationLimit;
    return result;
  }
  double infeasibility = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis[i] >= n) infeasibility += std::max(t.at(i, rhs), 0.0);
  if (infeasibility > 1e-9 * std::max(1.0, bsum)) {
    result.status = LpStatus::Infeasible;
    return result;
  }

  // Drive zero-level artificials out where a structural column can replace
  // them; rows where none can are redundant and stay inert.
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    Eigen::Index best = -1;
    double mag = 1e-9;
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(t.at(i, j)) > mag) {
        mag = std::abs(t.at(i, j));
        best = j;
      }
    if (best >= 0) {
      t.pivot(i, best);
      basis[i] = static_cast<int>(best);
    }
  }

  // Phase two: reduced costs of the true objective (artificials cost 0),
  // with the cost of flipped columns negated.
  auto cost = [&](Eigen::Index j) {
    if (j >= n) return 0.0;
    return bounds.flipped[j] ? -c(j) : c(j);
  };
  for (Eigen::Index j = 0; j <= rhs; ++j) {
    double s = j < n ? cost(j) : 0.0;
    for (Eigen::Index i = 0; i < m; ++i) s -= cost(basis[i]) * t.at(i, j);
    t.at(m, j) = s;
  }
  auto phase2 = iterate(t, basis, bounds, n, opt, opt.max_iterations - result.iterations);
  result.iterations += phase2.iterations;
  result.status = phase2.status;
  if (phase2.status != LpStatus::Optimal) return result;

  result.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis[i] < n) result.x(basis[i]) = std::max(t.at(i, rhs), 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!bounds.flipped[j]) continue;
    result.x(j) = std::max(upper(j) - result.x(j), 0.0);
  }
  result.objective = c.dot(result.x);
  result.duals.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) result.duals(i) = -t.at(m, n + i) * sign[i];
  result.basis = std::move(basis);
  return result;
}

LpResult solve_standard_form(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                             const Eigen::VectorXd& c, const LpOptions& opt) {
  return solve_bounded(a, b, c, Eigen::VectorXd::Constant(a.cols(), kInf), opt);
}

}  // namespace fnclin::lp
