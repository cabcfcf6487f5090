#include "fnclin/constraints.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "fnclin/errors.hpp"
#include "fnclin/parallel.hpp"
#include "fnclin/text_io.hpp"

namespace fnclin {

double LinearRow::evaluate(const CommitmentScenario& s) const {
  double v = constant;
  for (std::size_t i = 0; i < tg_coef.size(); ++i)
    if (s.tg_on[i]) v += tg_coef[i];
  for (std::size_t j = 0; j < res_coef.size(); ++j)
    if (s.res_participates[j]) v += res_coef[j] * s.res_power_mw[j];
  return v;
}

bool LinearConstraintBlock::satisfied(const CommitmentScenario& scenario, double p_i_mw) const {
  for (const auto& row : rows)
    if (row.evaluate(scenario) < p_i_mw) return false;
  return true;
}

std::vector<LinearConstraintBlock> emit_constraints(const PwlModel& pwl, const ElmWeights& weights,
                                                    const SystemModel& model) {
  pwl.validate();
  const AffineFeatureMap map = affine_feature_map(weights, model);
  if (static_cast<Eigen::Index>(pwl.feature_dim()) != map.base.size())
    throw ValidationError("model has " + std::to_string(pwl.feature_dim()) +
                          " features, system layout has " + std::to_string(map.base.size()));
  const double sb = model.s_base_mva();

  // Per-segment coefficients are shared by every contingency; only the
  // tripped unit's own term is removed.
  std::vector<LinearRow> shared;
  for (const auto& seg : pwl.segments) {
    LinearRow row;
    for (const auto& dir : map.tg_dir) row.tg_coef.push_back(sb * seg.c.dot(dir));
    for (const auto& dir : map.res_dir) row.res_coef.push_back(sb * seg.c.dot(dir));
    row.constant = sb * (seg.c.dot(map.base) + seg.h);
    shared.push_back(std::move(row));
  }

  std::vector<LinearConstraintBlock> blocks;
  for (std::size_t i = 0; i < model.tg_count(); ++i) {
    LinearConstraintBlock block;
    block.contingency_tg = i;
    block.rows = shared;
    for (auto& row : block.rows) row.tg_coef[i] = 0.0;
    blocks.push_back(std::move(block));
  }
  return blocks;
}

namespace {

void write_term(std::ostream& out, double coef, const std::string& var, bool& first) {
  if (coef == 0.0) return;
  if (first)
    out << (coef < 0.0 ? "-" : "");
  else
    out << (coef < 0.0 ? " - " : " + ");
  out << format_double(std::abs(coef)) << '*' << var;
  first = false;
}

}  // namespace

void write_constraints_text(std::ostream& out, const std::vector<LinearConstraintBlock>& blocks,
                            const SystemModel& model) {
  out << "# Frequency nadir constraints, one block per TG contingency, in MW.\n"
      << "# x_gI: commitment of TG I (0/1).  p_rJ: output of RES J in MW when it\n"
      << "# participates in frequency control, else 0.  P_gI: scheduled output of TG I.\n"
      << "# Each block substitutes x_gI = 0 for the tripped unit, including its share\n"
      << "# of system inertia. Every row of a block must hold.\n"
      << "# system: " << model.tg_count() << " TGs, " << model.res_count()
      << " RESs, S_base = " << format_double(model.s_base_mva()) << " MVA\n";
  for (const auto& block : blocks) {
    out << "\n[contingency g" << block.contingency_tg << "]\n";
    for (const auto& row : block.rows) {
      bool first = true;
      for (std::size_t i = 0; i < row.tg_coef.size(); ++i)
        write_term(out, row.tg_coef[i], "x_g" + std::to_string(i), first);
      for (std::size_t j = 0; j < row.res_coef.size(); ++j)
        write_term(out, row.res_coef[j], "p_r" + std::to_string(j), first);
      if (first)
        out << format_double(row.constant);
      else
        out << (row.constant < 0.0 ? " - " : " + ") << format_double(std::abs(row.constant));
      out << " >= P_g" << block.contingency_tg << '\n';
    }
  }
}

void write_constraints_csv(std::ostream& out, const std::vector<LinearConstraintBlock>& blocks) {
  out << "contingency,row,variable,coefficient\n";
  for (const auto& block : blocks) {
    for (std::size_t r = 0; r < block.rows.size(); ++r) {
      const auto& row = block.rows[r];
      const std::string prefix = "g" + std::to_string(block.contingency_tg) + "," + std::to_string(r) + ",";
      for (std::size_t i = 0; i < row.tg_coef.size(); ++i)
        out << prefix << "x_g" << i << ',' << format_double(row.tg_coef[i]) << '\n';
      for (std::size_t j = 0; j < row.res_coef.size(); ++j)
        out << prefix << "p_r" << j << ',' << format_double(row.res_coef[j]) << '\n';
      out << prefix << "const," << format_double(row.constant) << '\n';
    }
  }
}

double AuditReport::false_safe_rate() const {
  return checks == 0 ? 0.0 : static_cast<double>(false_safe) / static_cast<double>(checks);
}

double AuditReport::conservatism_rate() const {
  return checks == 0 ? 0.0 : static_cast<double>(conservative) / static_cast<double>(checks);
}

AuditReport audit_constraints(const std::vector<LinearConstraintBlock>& blocks,
                              const SystemModel& model, const std::vector<AuditCase>& cases,
                              const MarginSpec& spec, int jobs) {
  if (blocks.size() != model.tg_count())
    throw ValidationError("expected one constraint block per TG");
  struct Check {
    std::size_t case_index;
    std::size_t tg;
  };
  std::vector<Check> checks;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    validate_scenario(model, cases[c].scenario);
    if (cases[c].dispatch_mw.size() != model.tg_count())
      throw ValidationError("audit case " + std::to_string(c) + " needs one dispatch per TG");
    for (std::size_t i = 0; i < model.tg_count(); ++i)
      if (cases[c].scenario.tg_on[i]) checks.push_back({c, i});
  }

  enum class Verdict { Agree, FalseSafe, Conservative };
  std::vector<Verdict> verdicts(checks.size(), Verdict::Agree);
  parallel_for(checks.size(), jobs, [&](std::size_t k) {
    const AuditCase& ac = cases[checks[k].case_index];
    const std::size_t i = checks[k].tg;
    const double p_i = ac.dispatch_mw[i];
    CommitmentScenario tripped = ac.scenario;
    tripped.tg_on[i] = 0;
    const MarginResult truth = margin_bisect(model, tripped, spec);
    const bool truth_safe = truth.margin_pu * model.s_base_mva() >= p_i;
    const bool predicted_safe = blocks[i].satisfied(ac.scenario, p_i);
    if (predicted_safe && !truth_safe)
      verdicts[k] = Verdict::FalseSafe;
    else if (!predicted_safe && truth_safe)
      verdicts[k] = Verdict::Conservative;
  });

  AuditReport report;
  report.checks = checks.size();
  for (auto v : verdicts) {
    if (v == Verdict::FalseSafe)
      ++report.false_safe;
    else if (v == Verdict::Conservative)
      ++report.conservative;
    else
      ++report.agree;
  }
  return report;
}

}  // namespace fnclin
