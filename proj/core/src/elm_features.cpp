#include "fnclin/elm_features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fnclin/errors.hpp"
#include "fnclin/random.hpp"
#include "fnclin/simulation.hpp"

namespace fnclin {

std::array<double, kTgParamCount> tg_phi(const TgParams& g) {
  return {g.t_reheat, g.t_governor, g.t_turbine, g.hp_fraction, g.droop, g.inertia};
}

std::array<double, kResParamCount> res_phi(const ResParams& r) {
  return {r.t_converter, r.droop, r.inertia};
}

ColumnScaler ColumnScaler::fit(const std::vector<std::vector<double>>& rows, std::size_t columns) {
  ColumnScaler s;
  s.lo.assign(columns, std::numeric_limits<double>::infinity());
  s.hi.assign(columns, -std::numeric_limits<double>::infinity());
  for (const auto& row : rows)
    for (std::size_t c = 0; c < columns; ++c) {
      s.lo[c] = std::min(s.lo[c], row[c]);
      s.hi[c] = std::max(s.hi[c], row[c]);
    }
  for (std::size_t c = 0; c < columns; ++c) {
    if (rows.empty()) {
      s.lo[c] = 0.0;
      s.hi[c] = 1.0;
      continue;
    }
    // Identical values across all units: centre them at 0.5.
    if (!(s.hi[c] - s.lo[c] > 1e-12 * std::max(1.0, std::abs(s.lo[c])))) {
      const double half = 0.5 * std::max(1.0, std::abs(s.lo[c]));
      s.lo[c] -= half;
      s.hi[c] += half;
    }
  }
  return s;
}

double ColumnScaler::scale(std::size_t column, double value) const {
  return (value - lo[column]) / (hi[column] - lo[column]);
}

void ElmWeights::validate() const {
  const auto n = b_g.size();
  if (n < 1) throw ValidationError("ELM needs at least one hidden neuron");
  if (a_g.rows() != n || a_g.cols() != kTgParamCount || a_v.rows() != n ||
      a_v.cols() != kResParamCount || b_v.size() != n)
    throw ValidationError("ELM weight dimensions are inconsistent");
  if (!a_g.allFinite() || !b_g.allFinite() || !a_v.allFinite() || !b_v.allFinite())
    throw ValidationError("ELM weights must be finite");
  if (tg_scaler.lo.size() != kTgParamCount || tg_scaler.hi.size() != kTgParamCount ||
      res_scaler.lo.size() != kResParamCount || res_scaler.hi.size() != kResParamCount)
    throw ValidationError("ELM scaler dimensions are inconsistent");
  for (std::size_t c = 0; c < tg_scaler.lo.size(); ++c)
    if (!(tg_scaler.lo[c] < tg_scaler.hi[c])) throw ValidationError("TG scaler needs lo < hi");
  for (std::size_t c = 0; c < res_scaler.lo.size(); ++c)
    if (!(res_scaler.lo[c] < res_scaler.hi[c])) throw ValidationError("RES scaler needs lo < hi");
}

bool ElmWeights::operator==(const ElmWeights& o) const {
  return seed == o.seed && a_g.rows() == o.a_g.rows() && a_g.cols() == o.a_g.cols() &&
         a_v.rows() == o.a_v.rows() && a_v.cols() == o.a_v.cols() && b_g.size() == o.b_g.size() &&
         b_v.size() == o.b_v.size() && a_g == o.a_g && b_g == o.b_g && a_v == o.a_v &&
         b_v == o.b_v && tg_scaler == o.tg_scaler && res_scaler == o.res_scaler;
}

ElmWeights init_weights(int n_hidden, std::uint64_t seed, const SystemModel& model) {
  if (n_hidden < 1) throw ValidationError("n_hidden must be >= 1");
  ElmWeights w;
  w.seed = seed;
  SplitMix64 rng(seed);
  w.a_g.resize(n_hidden, kTgParamCount);
  w.b_g.resize(n_hidden);
  w.a_v.resize(n_hidden, kResParamCount);
  w.b_v.resize(n_hidden);
  for (int r = 0; r < n_hidden; ++r)
    for (int c = 0; c < kTgParamCount; ++c) w.a_g(r, c) = rng.symmetric_unit();
  for (int r = 0; r < n_hidden; ++r) w.b_g(r) = rng.symmetric_unit();
  for (int r = 0; r < n_hidden; ++r)
    for (int c = 0; c < kResParamCount; ++c) w.a_v(r, c) = rng.symmetric_unit();
  for (int r = 0; r < n_hidden; ++r) w.b_v(r) = rng.symmetric_unit();

  std::vector<std::vector<double>> tg_rows, res_rows;
  for (const auto& g : model.tgs()) {
    const auto phi = tg_phi(g);
    tg_rows.emplace_back(phi.begin(), phi.end());
  }
  for (const auto& r : model.ress()) {
    const auto phi = res_phi(r);
    res_rows.emplace_back(phi.begin(), phi.end());
  }
  w.tg_scaler = ColumnScaler::fit(tg_rows, kTgParamCount);
  w.res_scaler = ColumnScaler::fit(res_rows, kResParamCount);
  return w;
}

Eigen::VectorXd embed_unit(const ElmWeights& w, std::span<const double> phi, UnitKind kind) {
  const bool tg = kind == UnitKind::Tg;
  const Eigen::MatrixXd& a = tg ? w.a_g : w.a_v;
  const Eigen::VectorXd& b = tg ? w.b_g : w.b_v;
  const ColumnScaler& scaler = tg ? w.tg_scaler : w.res_scaler;
  if (phi.size() != static_cast<std::size_t>(a.cols()))
    throw ValidationError("unit parameter vector has the wrong length");
  Eigen::VectorXd scaled(a.cols());
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    if (!std::isfinite(phi[c])) throw ValidationError("unit parameters must be finite");
    scaled(c) = scaler.scale(static_cast<std::size_t>(c), phi[c]);
  }
  const Eigen::VectorXd z = a * scaled + b;
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

FeatureLayout feature_layout(const ElmWeights& w, const SystemModel& model) {
  return {model.tg_count(), model.res_count(), static_cast<std::size_t>(w.n_hidden())};
}

Eigen::VectorXd feature_vector(const ElmWeights& w, const SystemModel& model,
                               const CommitmentScenario& scenario) {
  validate_scenario(model, scenario);
  const FeatureLayout layout = feature_layout(w, model);
  const auto n = static_cast<Eigen::Index>(layout.n_hidden);
  const double sb = model.s_base_mva();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.dim()));
  for (std::size_t i = 0; i < model.tg_count(); ++i) {
    if (!scenario.tg_on[i]) continue;
    const auto phi = tg_phi(model.tgs()[i]);
    const double scale = scenario.tg_on[i] * (model.tgs()[i].capacity_mva / sb);
    const auto off = static_cast<Eigen::Index>(layout.tg_offset(i));
    z.segment(off, n) = scale * embed_unit(w, phi, UnitKind::Tg);
    for (int c = 0; c < kTgParamCount; ++c) z(off + n + c) = scale * phi[c];
  }
  for (std::size_t j = 0; j < model.res_count(); ++j) {
    if (!scenario.res_participates[j]) continue;
    const auto phi = res_phi(model.ress()[j]);
    const double scale = scenario.res_participates[j] * (scenario.res_power_mw[j] / sb);
    const auto off = static_cast<Eigen::Index>(layout.res_offset(j));
    z.segment(off, n) = scale * embed_unit(w, phi, UnitKind::Res);
    for (int c = 0; c < kResParamCount; ++c) z(off + n + c) = scale * phi[c];
  }
  z(static_cast<Eigen::Index>(layout.inertia_index())) = system_inertia(model, scenario);
  return z;
}

Eigen::VectorXd raw_feature_vector(const SystemModel& model, const CommitmentScenario& scenario) {
  validate_scenario(model, scenario);
  const double sb = model.s_base_mva();
  const auto dim = model.tg_count() * kTgParamCount + model.res_count() * kResParamCount + 1;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < model.tg_count(); ++i) {
    const double scale = scenario.tg_on[i] * (model.tgs()[i].capacity_mva / sb);
    for (double p : tg_phi(model.tgs()[i])) z(k++) = scale * p;
  }
  for (std::size_t j = 0; j < model.res_count(); ++j) {
    const double scale = scenario.res_participates[j] * (scenario.res_power_mw[j] / sb);
    for (double p : res_phi(model.ress()[j])) z(k++) = scale * p;
  }
  z(k) = system_inertia(model, scenario);
  return z;
}

Eigen::VectorXd AffineFeatureMap::apply(const CommitmentScenario& s) const {
  Eigen::VectorXd z = base;
  for (std::size_t i = 0; i < tg_dir.size(); ++i)
    if (s.tg_on[i]) z += tg_dir[i];
  for (std::size_t j = 0; j < res_dir.size(); ++j)
    if (s.res_participates[j]) z += s.res_power_mw[j] * res_dir[j];
  return z;
}

AffineFeatureMap affine_feature_map(const ElmWeights& w, const SystemModel& model) {
  const FeatureLayout layout = feature_layout(w, model);
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  const auto n = static_cast<Eigen::Index>(layout.n_hidden);
  const auto h_idx = static_cast<Eigen::Index>(layout.inertia_index());
  const double sb = model.s_base_mva();

  AffineFeatureMap map;
  map.base = Eigen::VectorXd::Zero(dim);
  double other_inertia = 0.0;
  for (const auto& e : model.others()) other_inertia += e.inertia * e.capacity_mva;
  map.base(h_idx) = other_inertia / sb;

  for (std::size_t i = 0; i < model.tg_count(); ++i) {
    const TgParams& g = model.tgs()[i];
    const auto phi = tg_phi(g);
    const double scale = g.capacity_mva / sb;
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(dim);
    const auto off = static_cast<Eigen::Index>(layout.tg_offset(i));
    dir.segment(off, n) = scale * embed_unit(w, phi, UnitKind::Tg);
    for (int c = 0; c < kTgParamCount; ++c) dir(off + n + c) = scale * phi[c];
    dir(h_idx) = g.inertia * g.capacity_mva / sb;
    map.tg_dir.push_back(std::move(dir));
  }
  for (std::size_t j = 0; j < model.res_count(); ++j) {
    const ResParams& r = model.ress()[j];
    const auto phi = res_phi(r);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(dim);
    const auto off = static_cast<Eigen::Index>(layout.res_offset(j));
    dir.segment(off, n) = embed_unit(w, phi, UnitKind::Res) / sb;
    for (int c = 0; c < kResParamCount; ++c) dir(off + n + c) = phi[c] / sb;
    dir(h_idx) = r.inertia / sb;
    map.res_dir.push_back(std::move(dir));
  }
  return map;
}

}  // namespace fnclin
