#include "fnclin/scenario_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "fnclin/errors.hpp"
#include "fnclin/parallel.hpp"
#include "fnclin/random.hpp"
#include "fnclin/text_io.hpp"

namespace fnclin {

std::vector<CommitmentScenario> generate_scenarios(const SystemModel& model, std::size_t count,
                                                   std::uint64_t seed,
                                                   const LoadProfileOptions& opt) {
  if (count < 1) throw ValidationError("scenario count must be >= 1");
  if (!(opt.load_min_frac >= 0.0 && opt.load_min_frac <= opt.load_max_frac))
    throw ValidationError("load fractions must satisfy 0 <= min <= max");
  if (!(opt.reserve_factor >= 1.0)) throw ValidationError("reserve factor must be >= 1");
  if (opt.min_committed < 0 || static_cast<std::size_t>(opt.min_committed) > model.tg_count())
    throw ValidationError("min_committed out of range");
  const double peak = opt.peak_load_mw > 0.0 ? opt.peak_load_mw : model.s_base_mva();

  double total_capacity = 0.0;
  for (const auto& g : model.tgs()) total_capacity += g.capacity_mva;
  for (const auto& r : model.ress()) total_capacity += r.capacity_mw;

  SplitMix64 rng(seed);
  std::vector<CommitmentScenario> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const double frac = opt.fixed_load_frac ? *opt.fixed_load_frac
                                            : rng.uniform(opt.load_min_frac, opt.load_max_frac);
    const double load = frac * peak;
    if (load > total_capacity)
      throw ValidationError("load " + format_double(load) + " MW exceeds total capacity " +
                            format_double(total_capacity) + " MW");

    CommitmentScenario s;
    s.tg_on.assign(model.tg_count(), 0);
    s.res_participates.assign(model.res_count(), 0);
    s.res_power_mw.assign(model.res_count(), 0.0);
    double res_total = 0.0;
    for (std::size_t j = 0; j < model.res_count(); ++j) {
      const double cap = model.ress()[j].capacity_mw;
      s.res_power_mw[j] = rng.uniform() * cap;
      res_total += s.res_power_mw[j];
      s.res_participates[j] = s.res_power_mw[j] >= kParticipationThreshold * cap ? 1 : 0;
    }

    std::vector<double> key(model.tg_count());
    for (std::size_t i = 0; i < key.size(); ++i)
      key[i] = static_cast<double>(i) + opt.merit_noise * rng.uniform();
    std::vector<std::size_t> order(model.tg_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });

    const double need = std::max(load - res_total, 0.0) * opt.reserve_factor;
    double committed = 0.0;
    int units = 0;
    for (std::size_t i : order) {
      if (committed >= need && units >= opt.min_committed) break;
      s.tg_on[i] = 1;
      committed += model.tgs()[i].capacity_mva;
      ++units;
    }
    out.push_back(std::move(s));
  }
  return out;
}

bool DatasetProvenance::operator==(const DatasetProvenance& o) const {
  return generator_seed == o.generator_seed && model_hash == o.model_hash &&
         margin.delta_f_max_pu == o.margin.delta_f_max_pu && margin.tol_pu == o.margin.tol_pu &&
         margin.dp_hi == o.margin.dp_hi && margin.cap_pu == o.margin.cap_pu &&
         margin.sim.dt == o.margin.sim.dt && margin.sim.horizon_s == o.margin.sim.horizon_s &&
         margin.sim.stop_after_nadir_s == o.margin.sim.stop_after_nadir_s &&
         noise_seed == o.noise_seed && flip_prob == o.flip_prob && n_hidden == o.n_hidden &&
         elm_seed == o.elm_seed && excluded == o.excluded;
}

Eigen::VectorXd LabeledDataset::labels() const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(records.size()));
  for (std::size_t k = 0; k < records.size(); ++k) y(static_cast<Eigen::Index>(k)) = records[k].label_pu;
  return y;
}

std::vector<CommitmentScenario> LabeledDataset::scenarios() const {
  std::vector<CommitmentScenario> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.scenario);
  return out;
}

bool LabeledDataset::operator==(const LabeledDataset& o) const {
  return records == o.records && provenance == o.provenance &&
         features.rows() == o.features.rows() && features.cols() == o.features.cols() &&
         features == o.features;
}

Eigen::MatrixXd featurize(const ElmWeights& weights, const SystemModel& model,
                          const std::vector<LabeledRecord>& records) {
  const auto dim = static_cast<Eigen::Index>(feature_layout(weights, model).dim());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(records.size()), dim);
  for (std::size_t k = 0; k < records.size(); ++k)
    out.row(static_cast<Eigen::Index>(k)) =
        feature_vector(weights, model, records[k].scenario).transpose();
  return out;
}

namespace {

struct PendingRecord {
  std::uint64_t id;
  CommitmentScenario scenario;
};

LabeledDataset label_pending(const SystemModel& model, std::vector<PendingRecord> pending,
                             const MarginSpec& spec, const ElmWeights& weights,
                             const LabelingOptions& options) {
  if (pending.empty()) throw ValidationError("no scenarios to label");
  spec.validate();
  for (const auto& p : pending) validate_scenario(model, p.scenario);

  struct Outcome {
    double label = 0.0;
    std::string rejection;
  };
  std::vector<Outcome> outcomes(pending.size());
  parallel_for(pending.size(), options.jobs, [&](std::size_t k) {
    try {
      const MarginResult res = margin_bisect(model, pending[k].scenario, spec);
      if (res.unbounded)
        outcomes[k].rejection = "unbounded: no violation at cap " + format_double(spec.cap_pu);
      else
        outcomes[k].label = res.margin_pu;
    } catch (const MonotonicityError& e) {
      outcomes[k].rejection = e.what();
    }
  });

  LabeledDataset ds;
  for (std::size_t k = 0; k < pending.size(); ++k) {
    if (!outcomes[k].rejection.empty()) {
      ++ds.provenance.excluded;
      if (options.log)
        options.log("record " + std::to_string(pending[k].id) + " excluded: " +
                    outcomes[k].rejection);
      continue;
    }
    ds.records.push_back({pending[k].id, std::move(pending[k].scenario), outcomes[k].label});
  }
  if (ds.records.empty()) throw NumericalError("every record was excluded during labeling");
  ds.provenance.model_hash = model.hash();
  ds.provenance.margin = spec;
  ds.provenance.n_hidden = weights.n_hidden();
  ds.provenance.elm_seed = weights.seed;
  ds.features = featurize(weights, model, ds.records);
  return ds;
}

}  // namespace

LabeledDataset label_dataset(const SystemModel& model,
                             const std::vector<CommitmentScenario>& scenarios,
                             const MarginSpec& spec, const ElmWeights& weights,
                             const LabelingOptions& options) {
  std::vector<PendingRecord> pending;
  pending.reserve(scenarios.size());
  for (std::size_t k = 0; k < scenarios.size(); ++k) pending.push_back({k, scenarios[k]});
  return label_pending(model, std::move(pending), spec, weights, options);
}

LabeledDataset perturb_dataset(const SystemModel& model, const LabeledDataset& dataset,
                               std::uint64_t noise_seed, const PerturbOptions& perturb,
                               const ElmWeights& weights, const LabelingOptions& options) {
  if (!(perturb.flip_prob >= 0.0 && perturb.flip_prob <= 1.0))
    throw ValidationError("flip probability must lie in [0, 1]");
  if (!(perturb.jitter >= 0.0 && perturb.jitter <= 1.0))
    throw ValidationError("jitter must lie in [0, 1]");

  SplitMix64 rng(noise_seed);
  std::vector<PendingRecord> pending;
  pending.reserve(dataset.records.size());
  for (const auto& rec : dataset.records) {
    CommitmentScenario s = rec.scenario;
    for (auto& on : s.tg_on)
      if (rng.uniform() < perturb.flip_prob) on ^= 1;
    for (std::size_t j = 0; j < s.res_power_mw.size(); ++j) {
      const double cap = model.ress()[j].capacity_mw;
      const double factor = 1.0 + perturb.jitter * rng.symmetric_unit();
      s.res_power_mw[j] = std::clamp(s.res_power_mw[j] * factor, 0.0, cap);
      if (rng.uniform() < perturb.flip_prob) s.res_participates[j] ^= 1;
    }
    enforce_participation_rule(model, s);
    pending.push_back({rec.id, std::move(s)});
  }
  LabeledDataset out = label_pending(model, std::move(pending), dataset.provenance.margin, weights,
                                     options);
  out.provenance.generator_seed = dataset.provenance.generator_seed;
  out.provenance.noise_seed = noise_seed;
  out.provenance.flip_prob = perturb.flip_prob;
  out.provenance.excluded += dataset.provenance.excluded;
  return out;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& dataset,
                                                std::size_t train_count, std::uint64_t seed) {
  const std::size_t n = dataset.records.size();
  if (!(train_count > 0 && train_count < n))
    throw ValidationError("train count must lie strictly between 0 and " + std::to_string(n));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i + 1 < n; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(train_count));
  std::vector<std::size_t> test_idx(idx.begin() + static_cast<std::ptrdiff_t>(train_count), idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  auto take = [&](const std::vector<std::size_t>& rows) {
    LabeledDataset part;
    part.provenance = dataset.provenance;
    part.features.resize(static_cast<Eigen::Index>(rows.size()), dataset.features.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      part.records.push_back(dataset.records[rows[k]]);
      if (dataset.features.rows() == static_cast<Eigen::Index>(n))
        part.features.row(static_cast<Eigen::Index>(k)) =
            dataset.features.row(static_cast<Eigen::Index>(rows[k]));
    }
    return part;
  };
  return {take(train_idx), take(test_idx)};
}

namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

std::uint64_t parse_u64(const std::string& text) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(text, &used, 0);
    if (used != text.size()) throw ValidationError("");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("not an unsigned integer: '" + text + "'");
  }
}

std::string trim_copy(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(trim_copy(cur));
  return parts;
}

}  // namespace

void write_dataset(std::ostream& out, const SystemModel& model, const LabeledDataset& ds) {
  const auto& p = ds.provenance;
  out << "# fnclin labeled dataset\n[provenance]\n"
      << "generator_seed = " << p.generator_seed << '\n'
      << "model_hash = " << hex(p.model_hash) << '\n'
      << "tg_count = " << model.tg_count() << '\n'
      << "res_count = " << model.res_count() << '\n'
      << "delta_f_max_pu = " << format_double(p.margin.delta_f_max_pu) << '\n'
      << "tol_pu = " << format_double(p.margin.tol_pu) << '\n'
      << "dp_hi = " << format_double(p.margin.dp_hi) << '\n'
      << "cap_pu = " << format_double(p.margin.cap_pu) << '\n'
      << "dt = " << format_double(p.margin.sim.dt) << '\n'
      << "horizon_s = " << format_double(p.margin.sim.horizon_s) << '\n'
      << "stop_after_nadir_s = " << format_double(p.margin.sim.stop_after_nadir_s) << '\n';
  if (p.noise_seed) out << "noise_seed = " << *p.noise_seed << '\n';
  out << "flip_prob = " << format_double(p.flip_prob) << '\n'
      << "n_hidden = " << p.n_hidden << '\n'
      << "elm_seed = " << p.elm_seed << '\n'
      << "excluded = " << p.excluded << '\n'
      << "records = " << ds.records.size() << '\n'
      << "\n[records]\n# id; tg bits; res bit:power_mw ...; label_pu\n";
  for (const auto& r : ds.records) {
    out << r.id << "; ";
    for (auto b : r.scenario.tg_on) out << int(b);
    out << ';';
    for (std::size_t j = 0; j < r.scenario.res_power_mw.size(); ++j)
      out << ' ' << int(r.scenario.res_participates[j]) << ':'
          << format_double(r.scenario.res_power_mw[j]);
    out << "; " << format_double(r.label_pu) << '\n';
  }
}

LabeledDataset read_dataset(std::istream& in, const SystemModel& model) {
  std::string header, line;
  bool in_records = false;
  LabeledDataset ds;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!in_records) {
      if (trim_copy(line) == "[records]") {
        in_records = true;
        continue;
      }
      header += line + '\n';
      continue;
    }
    const auto hash = line.find('#');
    const std::string body = trim_copy(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto fields = split_on(body, ';');
    if (fields.size() != 4)
      throw ValidationError("dataset line " + std::to_string(line_no) + ": expected 4 fields");
    LabeledRecord rec;
    rec.id = parse_u64(fields[0]);
    for (char ch : fields[1]) {
      if (ch != '0' && ch != '1')
        throw ValidationError("dataset line " + std::to_string(line_no) + ": bad TG bit string");
      rec.scenario.tg_on.push_back(ch == '1' ? 1 : 0);
    }
    std::istringstream res(fields[2]);
    std::string item;
    while (res >> item) {
      const auto colon = item.find(':');
      if (colon != 1 || (item[0] != '0' && item[0] != '1'))
        throw ValidationError("dataset line " + std::to_string(line_no) + ": bad RES entry '" +
                              item + "'");
      rec.scenario.res_participates.push_back(item[0] == '1' ? 1 : 0);
      rec.scenario.res_power_mw.push_back(parse_double(item.substr(2)));
    }
    rec.label_pu = parse_double(fields[3]);
    if (!(std::isfinite(rec.label_pu) && rec.label_pu >= 0.0))
      throw ValidationError("dataset line " + std::to_string(line_no) + ": label must be >= 0");
    validate_scenario(model, rec.scenario);
    ds.records.push_back(std::move(rec));
  }
  if (!in_records) throw ValidationError("dataset has no [records] section");
  if (ds.records.empty()) throw ValidationError("dataset has no records");

  std::istringstream hs(header);
  const auto sections = parse_sections(hs);
  const TextSection* prov = nullptr;
  for (const auto& s : sections)
    if (s.name == "provenance") prov = &s;
  if (!prov) throw ValidationError("dataset has no [provenance] section");
  auto& p = ds.provenance;
  p.generator_seed = parse_u64(prov->require("generator_seed"));
  p.model_hash = parse_u64(prov->require("model_hash"));
  if (p.model_hash != model.hash())
    throw ValidationError("dataset was labeled on a different system model (hash mismatch)");
  p.margin.delta_f_max_pu = prov->require_double("delta_f_max_pu");
  p.margin.tol_pu = prov->require_double("tol_pu");
  p.margin.dp_hi = prov->require_double("dp_hi");
  p.margin.cap_pu = prov->require_double("cap_pu");
  p.margin.sim.dt = prov->require_double("dt");
  p.margin.sim.horizon_s = prov->require_double("horizon_s");
  p.margin.sim.stop_after_nadir_s = prov->require_double("stop_after_nadir_s");
  if (auto ns = prov->find("noise_seed")) p.noise_seed = parse_u64(*ns);
  p.flip_prob = prov->require_double("flip_prob");
  p.n_hidden = static_cast<int>(parse_integer(prov->require("n_hidden")));
  p.elm_seed = parse_u64(prov->require("elm_seed"));
  p.excluded = static_cast<std::size_t>(parse_u64(prov->require("excluded")));

  ds.features = featurize(init_weights(p.n_hidden, p.elm_seed, model), model, ds.records);
  return ds;
}

void save_dataset(const std::filesystem::path& path, const SystemModel& model,
                  const LabeledDataset& dataset) {
  auto out = open_output(path);
  write_dataset(out, model, dataset);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

LabeledDataset load_dataset(const std::filesystem::path& path, const SystemModel& model) {
  auto in = open_input(path);
  return read_dataset(in, model);
}

}  // namespace fnclin
