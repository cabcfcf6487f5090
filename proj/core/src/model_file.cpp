#include "fnclin/model_file.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "fnclin/errors.hpp"
#include "fnclin/text_io.hpp"

namespace fnclin {

namespace {

constexpr const char* kTgOrder = "t_reheat t_governor t_turbine hp_fraction droop inertia";
constexpr const char* kResOrder = "t_converter droop inertia";

template <typename Vec>
void write_values(std::ostream& out, const char* key, const Vec& values) {
  out << key << " =";
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(values.size()); ++i)
    out << ' ' << format_double(values[i]);
  out << '\n';
}

void write_matrix(std::ostream& out, const char* key, const Eigen::MatrixXd& m) {
  out << key << " =";
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << ' ' << format_double(m(r, c));
  out << '\n';
}

Eigen::MatrixXd read_matrix(const TextSection& sec, const char* key, Eigen::Index rows,
                            Eigen::Index cols) {
  const auto v = sec.require_doubles(key);
  if (static_cast<Eigen::Index>(v.size()) != rows * cols)
    throw ValidationError(std::string("model file: '") + key + "' has " +
                          std::to_string(v.size()) + " values, expected " +
                          std::to_string(rows * cols));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v[static_cast<std::size_t>(r * cols + c)];
  return m;
}

std::uint64_t parse_u64(const std::string& text) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used, 0);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("not an unsigned integer: '" + text + "'");
}

const TextSection& section(const std::vector<TextSection>& all, const char* name) {
  for (const auto& s : all)
    if (s.name == name) return s;
  throw ValidationError(std::string("model file: missing [") + name + "] section");
}

}  // namespace

double TrainedModel::predict(const SystemModel& model, const CommitmentScenario& scenario) const {
  check_system(model);
  return eval_pwl(pwl, feature_vector(weights, model, scenario));
}

void TrainedModel::check_system(const SystemModel& model) const {
  if (model.tg_count() != tg_count || model.res_count() != res_count)
    throw ValidationError("trained model expects " + std::to_string(tg_count) + " TGs and " +
                          std::to_string(res_count) + " RESs");
  if (system_hash != 0 && model.hash() != system_hash)
    throw ValidationError("trained model was fitted on a different system model (hash mismatch)");
}

void write_trained_model(std::ostream& out, const TrainedModel& t) {
  const ElmWeights& w = t.weights;
  out << "# fnclin frequency security margin surrogate\n[elm]\n"
      << "seed = " << w.seed << '\n'
      << "n_hidden = " << w.n_hidden() << '\n'
      << "phi_tg_order = " << kTgOrder << '\n'
      << "phi_res_order = " << kResOrder << '\n';
  write_matrix(out, "a_g", w.a_g);
  write_values(out, "b_g", w.b_g);
  write_matrix(out, "a_v", w.a_v);
  write_values(out, "b_v", w.b_v);
  write_values(out, "tg_scaler_lo", w.tg_scaler.lo);
  write_values(out, "tg_scaler_hi", w.tg_scaler.hi);
  write_values(out, "res_scaler_lo", w.res_scaler.lo);
  write_values(out, "res_scaler_hi", w.res_scaler.hi);

  out << "\n[pwl]\nsegments = " << t.pwl.segments.size() << '\n'
      << "feature_dim = " << t.pwl.feature_dim() << '\n';
  for (std::size_t l = 0; l < t.pwl.segments.size(); ++l) {
    out << "h_" << l << " = " << format_double(t.pwl.segments[l].h) << '\n';
    write_values(out, ("c_" + std::to_string(l)).c_str(), t.pwl.segments[l].c);
  }

  const TrainingMeta& m = t.pwl.meta;
  out << "\n[meta]\n"
      << "system_hash = 0x" << std::hex << t.system_hash << std::dec << '\n'
      << "tg_count = " << t.tg_count << '\n'
      << "res_count = " << t.res_count << '\n'
      << "train_seed = " << m.seed << '\n'
      << "train_segments = " << m.segments << '\n'
      << "iterations = " << m.iterations << '\n'
      << "restarts = " << m.restarts << '\n'
      << "objective = " << format_double(m.objective) << '\n';
}

TrainedModel read_trained_model(std::istream& in) {
  const auto all = parse_sections(in);
  const TextSection& elm = section(all, "elm");
  const TextSection& pwl = section(all, "pwl");
  const TextSection& meta = section(all, "meta");

  if (elm.require("phi_tg_order") != kTgOrder || elm.require("phi_res_order") != kResOrder)
    throw ValidationError("model file: unit parameter ordering does not match this build");

  TrainedModel t;
  ElmWeights& w = t.weights;
  w.seed = parse_u64(elm.require("seed"));
  const auto n = static_cast<Eigen::Index>(parse_integer(elm.require("n_hidden")));
  if (n < 1) throw ValidationError("model file: n_hidden must be >= 1");
  w.a_g = read_matrix(elm, "a_g", n, kTgParamCount);
  w.b_g = read_matrix(elm, "b_g", n, 1);
  w.a_v = read_matrix(elm, "a_v", n, kResParamCount);
  w.b_v = read_matrix(elm, "b_v", n, 1);
  w.tg_scaler.lo = elm.require_doubles("tg_scaler_lo");
  w.tg_scaler.hi = elm.require_doubles("tg_scaler_hi");
  w.res_scaler.lo = elm.require_doubles("res_scaler_lo");
  w.res_scaler.hi = elm.require_doubles("res_scaler_hi");
  w.validate();

  const auto segments = parse_integer(pwl.require("segments"));
  const auto dim = static_cast<Eigen::Index>(parse_integer(pwl.require("feature_dim")));
  if (segments < 1) throw ValidationError("model file: need at least one segment");
  for (long long l = 0; l < segments; ++l) {
    AffineSegment seg;
    seg.h = pwl.require_double("h_" + std::to_string(l));
    seg.c = read_matrix(pwl, ("c_" + std::to_string(l)).c_str(), dim, 1);
    t.pwl.segments.push_back(std::move(seg));
  }
  t.pwl.validate();

  t.system_hash = parse_u64(meta.require("system_hash"));
  t.tg_count = static_cast<std::size_t>(parse_integer(meta.require("tg_count")));
  t.res_count = static_cast<std::size_t>(parse_integer(meta.require("res_count")));
  const std::size_t expected = t.tg_count * (static_cast<std::size_t>(n) + kTgParamCount) +
                               t.res_count * (static_cast<std::size_t>(n) + kResParamCount) + 1;
  if (static_cast<std::size_t>(dim) != expected)
    throw ValidationError("model file: feature_dim inconsistent with unit counts");
  t.pwl.meta.seed = parse_u64(meta.require("train_seed"));
  t.pwl.meta.segments = static_cast<int>(parse_integer(meta.require("train_segments")));
  t.pwl.meta.iterations = static_cast<int>(parse_integer(meta.require("iterations")));
  t.pwl.meta.restarts = static_cast<int>(parse_integer(meta.require("restarts")));
  t.pwl.meta.objective = meta.require_double("objective");
  return t;
}

void save_trained_model(const std::filesystem::path& path, const TrainedModel& trained) {
  auto out = open_output(path);
  write_trained_model(out, trained);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

TrainedModel load_trained_model(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_trained_model(in);
}

}  // namespace fnclin
