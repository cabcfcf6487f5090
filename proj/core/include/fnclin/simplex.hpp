#pragma once

#include <vector>

#include <Eigen/Dense>

namespace fnclin::lp {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  /// Optimal multipliers y of the equality rows (A^T y <= c for columns at
  /// their lower bound). Rows found redundant in phase one get 0.
  Eigen::VectorXd duals;
  double objective = 0.0;
  std::vector<int> basis;
  int iterations = 0;
};

struct LpOptions {
  double tolerance = 1e-10;
  int max_iterations = 50000;
};

/// Dense two-phase tableau simplex for
///   minimize c^T x  subject to  A x = b,  x >= 0.
/// Dantzig pricing with a lexicographic ratio test against cycling.
LpResult solve_standard_form(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                             const Eigen::VectorXd& c, const LpOptions& options = {});

/// Same with box constraints 0 <= x <= upper (entries may be +infinity).
/// Nonbasic variables rest at either bound; duals keep the meaning above
/// for the equality rows.
LpResult solve_bounded(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& c, const Eigen::VectorXd& upper,
                       const LpOptions& options = {});

}  // namespace fnclin::lp
