#include "fnclin/eval_report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fnclin/baseline.hpp"
#include "fnclin/elm_features.hpp"
#include "fnclin/errors.hpp"
#include "fnclin/parallel.hpp"
#include "fnclin/pwl.hpp"
#include "fnclin/text_io.hpp"

namespace fnclin {

Metrics metrics(std::span<const double> predictions, std::span<const double> labels,
                double s_base_mva) {
  if (predictions.size() != labels.size())
    throw ValidationError("predictions and labels differ in length");
  if (labels.empty()) throw ValidationError("metrics need at least one sample");
  Metrics m;
  m.max_signed_error_pu = -std::numeric_limits<double>::infinity();
  double abs_sum = 0.0;
  double rel_sum = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] == 0.0) throw ValidationError("zero label at index " + std::to_string(k));
    const double err = predictions[k] - labels[k];
    abs_sum += std::abs(err);
    rel_sum += std::abs(err) / std::abs(labels[k]);
    m.max_signed_error_pu = std::max(m.max_signed_error_pu, err);
    if (err > 0.0) m.over_predictions += 1.0;
  }
  const double n = static_cast<double>(labels.size());
  m.mae_mw = abs_sum / n * s_base_mva;
  m.mre_pct = rel_sum / n * 100.0;
  return m;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (segments < 1) throw ValidationError("L must be >= 1");
  if (hidden < 1) throw ValidationError("hidden must be >= 1");
  if (baseline_segments < 1) throw ValidationError("baseline_segments must be >= 1");
  if (restarts < 1) throw ValidationError("restarts must be >= 1");
  if (max_iters < 1) throw ValidationError("max_iters must be >= 1");
  if (jobs < 1) throw ValidationError("jobs must be >= 1");
  if (!seeds.empty() && seeds.size() != static_cast<std::size_t>(trials))
    throw ValidationError("seeds lists " + std::to_string(seeds.size()) + " values for " +
                          std::to_string(trials) + " trials");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

int parse_int(const std::string& key, const std::string& value) {
  const long long v = parse_integer(value);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ValidationError(key + " out of range");
  return static_cast<int>(v);
}

std::vector<std::string> words(const std::string& value) {
  std::istringstream in(value);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

ExperimentConfig read_experiment_config(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  const std::filesystem::path dir = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path q(p);
    return q.is_absolute() ? q : dir / q;
  };
  ExperimentConfig cfg;
  bool have_model = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    try {
      if (key == "model") {
        cfg.model = resolve(value);
        have_model = true;
      } else if (key == "datasets" || key == "dataset") {
        for (const auto& w : words(value)) cfg.datasets.push_back(resolve(w));
      } else if (key == "trials") {
        cfg.trials = parse_int(key, value);
      } else if (key == "L" || key == "segments") {
        cfg.segments = parse_int(key, value);
      } else if (key == "hidden") {
        cfg.hidden = parse_int(key, value);
      } else if (key == "seeds") {
        cfg.seeds.clear();
        for (const auto& w : words(value)) {
          const long long s = parse_integer(w);
          if (s < 0) throw ValidationError("seeds must be non-negative");
          cfg.seeds.push_back(static_cast<std::uint64_t>(s));
        }
      } else if (key == "train_count") {
        const long long n = parse_integer(value);
        if (n <= 0) throw ValidationError("train_count must be positive");
        cfg.train_count = static_cast<std::size_t>(n);
      } else if (key == "split_seed") {
        const long long s = parse_integer(value);
        if (s < 0) throw ValidationError("split_seed must be non-negative");
        cfg.split_seed = static_cast<std::uint64_t>(s);
      } else if (key == "baseline_segments") {
        cfg.baseline_segments = parse_int(key, value);
      } else if (key == "restarts") {
        cfg.restarts = parse_int(key, value);
      } else if (key == "max_iters") {
        cfg.max_iters = parse_int(key, value);
      } else if (key == "jobs") {
        cfg.jobs = parse_int(key, value);
      } else {
        throw ValidationError("unknown key '" + key + "'");
      }
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_model) throw ValidationError(path.string() + ": missing 'model'");
  if (cfg.datasets.empty()) throw ValidationError(path.string() + ": missing 'datasets'");
  if (cfg.train_count == 0) throw ValidationError(path.string() + ": missing 'train_count'");
  cfg.validate();
  return cfg;
}

double DatasetResult::proposed_mae_cv() const {
  if (proposed_mean.mae_mw == 0.0) return 0.0;
  return proposed_mae_std_mw / proposed_mean.mae_mw;
}

namespace {

Metrics average(const std::vector<Metrics>& ms) {
  Metrics out;
  if (ms.empty()) return out;
  out.max_signed_error_pu = -std::numeric_limits<double>::infinity();
  for (const auto& m : ms) {
    out.mae_mw += m.mae_mw;
    out.mre_pct += m.mre_pct;
    out.over_predictions += m.over_predictions;
    out.max_signed_error_pu = std::max(out.max_signed_error_pu, m.max_signed_error_pu);
  }
  const double n = static_cast<double>(ms.size());
  out.mae_mw /= n;
  out.mre_pct /= n;
  out.over_predictions /= n;
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Metrics EvalReport::proposed_average() const {
  std::vector<Metrics> ms;
  for (const auto& d : datasets) ms.push_back(d.proposed_mean);
  return average(ms);
}

Metrics EvalReport::baseline_average() const {
  std::vector<Metrics> ms;
  for (const auto& d : datasets) ms.push_back(d.baseline);
  return average(ms);
}

double EvalReport::proposed_train_seconds() const {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& d : datasets)
    for (const auto& t : d.trials) {
      total += t.train_seconds;
      ++n;
    }
  return n == 0 ? 0.0 : total / static_cast<double>(n);
}

double EvalReport::baseline_train_seconds() const {
  double total = 0.0;
  for (const auto& d : datasets) total += d.baseline_seconds;
  return datasets.empty() ? 0.0 : total / static_cast<double>(datasets.size());
}

EvalReport run_experiment(const SystemModel& model, std::span<const NamedDataset> datasets,
                          const ExperimentConfig& config) {
  config.validate();
  if (datasets.empty()) throw ValidationError("no datasets");
  std::vector<std::uint64_t> seeds = config.seeds;
  if (seeds.empty())
    for (int t = 1; t <= config.trials; ++t) seeds.push_back(static_cast<std::uint64_t>(t));

  EvalReport report;
  report.trials = config.trials;
  report.segments = config.segments;
  report.hidden = config.hidden;
  report.baseline_segments = config.baseline_segments;
  report.s_base_mva = model.s_base_mva();

  for (const auto& named : datasets) {
    const LabeledDataset& data = named.data;
    if (data.provenance.model_hash != model.hash())
      throw ValidationError("dataset '" + named.name + "' was labeled on a different system");
    if (config.train_count >= data.size())
      throw ValidationError("dataset '" + named.name + "' has " + std::to_string(data.size()) +
                            " records; train_count must be smaller");
    auto [train, test] = split(data, config.train_count, config.split_seed);
    const Eigen::VectorXd y_train = train.labels();
    const Eigen::VectorXd y_test = test.labels();

    DatasetResult result;
    result.name = named.name;
    result.train_size = train.size();
    result.test_size = test.size();
    result.trials.resize(seeds.size());

    parallel_for(seeds.size(), config.jobs, [&](std::size_t t) {
      const ElmWeights w = init_weights(config.hidden, seeds[t], model);
      const Eigen::MatrixXd z_train = featurize(w, model, train.records);
      const Eigen::MatrixXd z_test = featurize(w, model, test.records);
      TrainOptions opts;
      opts.segments = config.segments;
      opts.seed = seeds[t];
      opts.max_iters = config.max_iters;
      opts.restarts = config.restarts;
      const auto t0 = std::chrono::steady_clock::now();
      const PwlModel pwl = train_elm_pwl(z_train, y_train, opts);
      const double elapsed = seconds_since(t0);

      TrialResult& tr = result.trials[t];
      tr.seed = seeds[t];
      tr.train_seconds = elapsed;
      const Eigen::VectorXd p_test = eval_pwl_rows(pwl, z_test);
      tr.test = metrics(std::span<const double>(p_test.data(), p_test.size()),
                        std::span<const double>(y_test.data(), y_test.size()), model.s_base_mva());
      const Eigen::VectorXd p_train = eval_pwl_rows(pwl, z_train);
      tr.train_max_signed_error_pu = (p_train - y_train).maxCoeff();
    });

    std::vector<Metrics> per_trial;
    result.proposed_train_max_signed_error_pu = -std::numeric_limits<double>::infinity();
    for (const auto& tr : result.trials) {
      per_trial.push_back(tr.test);
      result.proposed_train_max_signed_error_pu =
          std::max(result.proposed_train_max_signed_error_pu, tr.train_max_signed_error_pu);
    }
    result.proposed_mean = average(per_trial);
    double var = 0.0;
    for (const auto& m : per_trial) {
      const double d = m.mae_mw - result.proposed_mean.mae_mw;
      var += d * d;
    }
    result.proposed_mae_std_mw = std::sqrt(var / static_cast<double>(per_trial.size()));

    BaselineOptions bopts;
    bopts.segments = config.baseline_segments;
    bopts.delta_f_max_pu = data.provenance.margin.delta_f_max_pu;
    const std::vector<CommitmentScenario> train_s = train.scenarios();
    const auto t0 = std::chrono::steady_clock::now();
    const BaselineModel baseline = train_baseline(model, train_s, bopts);
    result.baseline_seconds = seconds_since(t0);
    std::vector<double> pb_test;
    for (const auto& r : test.records) pb_test.push_back(predict_baseline(baseline, model, r.scenario));
    result.baseline = metrics(pb_test, std::span<const double>(y_test.data(), y_test.size()),
                              model.s_base_mva());
    result.baseline_train_max_signed_error_pu = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < train.size(); ++k)
      result.baseline_train_max_signed_error_pu =
          std::max(result.baseline_train_max_signed_error_pu,
                   predict_baseline(baseline, model, train.records[k].scenario) - y_train[k]);

    report.datasets.push_back(std::move(result));
  }
  return report;
}

EvalReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const SystemModel model = load_system_model(config.model);
  std::vector<NamedDataset> data;
  for (const auto& path : config.datasets)
    data.push_back({path.filename().string(), load_dataset(path, model)});
  return run_experiment(model, data, config);
}

namespace {

constexpr double kStabilityGate = 0.25;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

struct Row {
  std::string dataset;
  std::string method;
  Metrics m;
  double train_max = 0.0;
  double mae_std = 0.0;
  double seconds = 0.0;
};

std::vector<Row> collect_rows(const EvalReport& report) {
  std::vector<Row> rows;
  for (const auto& d : report.datasets) {
    rows.push_back({d.name, "proposed", d.proposed_mean, d.proposed_train_max_signed_error_pu,
                    d.proposed_mae_std_mw, 0.0});
    double secs = 0.0;
    for (const auto& t : d.trials) secs += t.train_seconds;
    rows.back().seconds = d.trials.empty() ? 0.0 : secs / static_cast<double>(d.trials.size());
    rows.push_back({d.name, "baseline", d.baseline, d.baseline_train_max_signed_error_pu, 0.0,
                    d.baseline_seconds});
  }
  double p_train = -std::numeric_limits<double>::infinity();
  double b_train = -std::numeric_limits<double>::infinity();
  double p_std = 0.0;
  for (const auto& d : report.datasets) {
    p_train = std::max(p_train, d.proposed_train_max_signed_error_pu);
    b_train = std::max(b_train, d.baseline_train_max_signed_error_pu);
    p_std += d.proposed_mae_std_mw;
  }
  if (!report.datasets.empty()) p_std /= static_cast<double>(report.datasets.size());
  rows.push_back({"average", "proposed", report.proposed_average(), p_train, p_std,
                  report.proposed_train_seconds()});
  rows.push_back({"average", "baseline", report.baseline_average(), b_train, 0.0,
                  report.baseline_train_seconds()});
  return rows;
}

std::string render_text(const EvalReport& report, const RenderOptions& options) {
  std::ostringstream out;
  out << "Frequency nadir margin prediction, desk-scale evaluation\n"
      << "proposed: ELM features, " << report.hidden << " hidden neurons, L = " << report.segments
      << ", one-sided training, " << report.trials << " trial(s) per dataset\n"
      << "baseline: reduced second-order model, " << report.baseline_segments
      << "-segment min-of-affine fit\n"
      << "MRE denominator: true (simulated) margin. S_base = " << format_double(report.s_base_mva)
      << " MVA.\n"
      << "Noise replicas perturb scenario inputs (commitment/participation flips, RES jitter) "
         "and are re-labeled by simulation.\n\n";
  std::vector<std::string> header = {"dataset", "method", "MAE [MW]", "MRE [%]",
                                     "max err [pu]", "train max err [pu]", "over/test",
                                     "MAE std [MW]"};
  if (options.include_timing) header.push_back("train time [s]");
  const std::vector<std::size_t> width = {14, 9, 10, 9, 13, 19, 10, 13, 15};
  for (std::size_t c = 0; c < header.size(); ++c) out << pad(header[c], width[c]);
  out << '\n';
  for (const auto& r : collect_rows(report)) {
    std::vector<std::string> cells = {r.dataset,
                                      r.method,
                                      fixed(r.m.mae_mw, 4),
                                      fixed(r.m.mre_pct, 3),
                                      sci(r.m.max_signed_error_pu),
                                      sci(r.train_max),
                                      fixed(r.m.over_predictions, 1),
                                      fixed(r.mae_std, 4)};
    if (options.include_timing) cells.push_back(fixed(r.seconds, 3));
    for (std::size_t c = 0; c < cells.size(); ++c) out << pad(cells[c], width[c]);
    out << '\n';
  }
  out << '\n';
  const Metrics p = report.proposed_average();
  const Metrics b = report.baseline_average();
  if (b.mre_pct > 0.0)
    out << "MRE ratio proposed/baseline: " << fixed(p.mre_pct / b.mre_pct, 3) << '\n';
  for (const auto& d : report.datasets) {
    const double cv = d.proposed_mae_cv();
    out << "stability " << d.name << ": MAE coefficient of variation " << fixed(100.0 * cv, 1)
        << "% (" << (cv < kStabilityGate ? "within" : "above") << " 25%)\n";
  }
  return out.str();
}

std::string render_csv(const EvalReport& report, const RenderOptions& options) {
  std::ostringstream out;
  out << "dataset,method,mae_mw,mre_pct,max_signed_error_pu,train_max_signed_error_pu,"
         "over_predictions,mae_std_mw";
  if (options.include_timing) out << ",train_seconds";
  out << '\n';
  for (const auto& r : collect_rows(report)) {
    out << r.dataset << ',' << r.method << ',' << format_double(r.m.mae_mw) << ','
        << format_double(r.m.mre_pct) << ',' << format_double(r.m.max_signed_error_pu) << ','
        << format_double(r.train_max) << ',' << format_double(r.m.over_predictions) << ','
        << format_double(r.mae_std);
    if (options.include_timing) out << ',' << format_double(r.seconds);
    out << '\n';
  }
  return out.str();
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string render_report(const EvalReport& report, ReportFormat format,
                          const RenderOptions& options) {
  if (report.datasets.empty()) throw ValidationError("report has no datasets");
  return format == ReportFormat::Csv ? render_csv(report, options) : render_text(report, options);
}

std::vector<ReportRow> parse_report_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty report");
  const auto header = split_commas(trim(line));
  const std::vector<std::string> expected = {"dataset", "method", "mae_mw", "mre_pct",
                                             "max_signed_error_pu", "train_max_signed_error_pu",
                                             "over_predictions", "mae_std_mw"};
  const bool timing = header.size() == expected.size() + 1 && header.back() == "train_seconds";
  if (!std::equal(expected.begin(), expected.end(), header.begin(),
                  header.begin() + static_cast<std::ptrdiff_t>(std::min(header.size(), expected.size()))) ||
      (header.size() != expected.size() && !timing))
    throw ValidationError("unexpected report header: " + line);
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto cells = split_commas(t);
    if (cells.size() != header.size()) throw ValidationError("malformed report row: " + t);
    ReportRow r;
    r.dataset = cells[0];
    r.method = cells[1];
    r.mae_mw = parse_double(cells[2]);
    r.mre_pct = parse_double(cells[3]);
    r.max_signed_error_pu = parse_double(cells[4]);
    r.train_max_signed_error_pu = parse_double(cells[5]);
    r.over_predictions = parse_double(cells[6]);
    r.mae_std_mw = parse_double(cells[7]);
    if (timing) r.train_seconds = parse_double(cells[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace fnclin
