#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "fnclin/elm_features.hpp"
#include "fnclin/margin.hpp"
#include "fnclin/pwl.hpp"
#include "fnclin/system_model.hpp"

namespace fnclin {

/// One affine piece of the post-contingency margin, in MW:
///   sum_i tg_coef[i] * x_i + sum_j res_coef[j] * (x_j * P_j) + constant.
struct LinearRow {
  std::vector<double> tg_coef;   // MW per committed unit
  std::vector<double> res_coef;  // MW per MW of participating RES output
  double constant = 0.0;

  double evaluate(const CommitmentScenario& scenario) const;
};

/// All rows must be >= the scheduled output P_i of the tripped unit.
struct LinearConstraintBlock {
  std::size_t contingency_tg = 0;
  std::vector<LinearRow> rows;

  bool satisfied(const CommitmentScenario& scenario, double p_i_mw) const;
};

/// One block per TG with x_i = 0 substituted into the affine feature map.
std::vector<LinearConstraintBlock> emit_constraints(const PwlModel& pwl,
                                                    const ElmWeights& weights,
                                                    const SystemModel& model);

/// Human-readable rows `coef*x_g3 + coef*p_r1 + const >= P_g0`.
void write_constraints_text(std::ostream& out, const std::vector<LinearConstraintBlock>& blocks,
                            const SystemModel& model);
/// Delimiter-separated companion: contingency,row,variable,coefficient.
void write_constraints_csv(std::ostream& out, const std::vector<LinearConstraintBlock>& blocks);

struct AuditCase {
  CommitmentScenario scenario;
  std::vector<double> dispatch_mw;  // scheduled output per TG
};

struct AuditReport {
  std::size_t checks = 0;
  std::size_t false_safe = 0;    // constraint satisfied, simulation violates
  std::size_t conservative = 0;  // constraint violated, simulation safe
  std::size_t agree = 0;

  double false_safe_rate() const;
  double conservatism_rate() const;
};

/// For every case and every online TG i, compares block i against the
/// simulated margin of the scenario with unit i forced off.
AuditReport audit_constraints(const std::vector<LinearConstraintBlock>& blocks,
                              const SystemModel& model, const std::vector<AuditCase>& cases,
                              const MarginSpec& spec, int jobs = 1);

}  // namespace fnclin
