#include "fnclin/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "fnclin/baseline.hpp"
#include "fnclin/constraints.hpp"
#include "fnclin/elm_features.hpp"
#include "fnclin/errors.hpp"
#include "fnclin/eval_report.hpp"
#include "fnclin/margin.hpp"
#include "fnclin/model_file.hpp"
#include "fnclin/pwl.hpp"
#include "fnclin/reduced_order.hpp"
#include "fnclin/scenario_data.hpp"
#include "fnclin/simulation.hpp"
#include "fnclin/text_io.hpp"

namespace fnclin::cli {
namespace {

constexpr const char* kSeedEnv = "FNCLIN_SEED";
constexpr std::uint64_t kDefaultSeed = 1;

/// Flag wins over the environment, which wins over the built-in default.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
    const long long v = parse_integer(env);
    if (v < 0) throw ValidationError(std::string(kSeedEnv) + " must be non-negative");
    return static_cast<std::uint64_t>(v);
  }
  return kDefaultSeed;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool verbose = false;

  void log(const std::string& line) const {
    if (verbose) err << line << '\n';
  }
};

/// Writes to `path`, or to the context's stdout when the path is empty.
template <class Fn>
void emit(const Context& ctx, const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(ctx.out);
    return;
  }
  std::ofstream file = open_output(path);
  write(file);
  if (!file) throw IoError("failed writing " + path);
}

struct Common {
  std::string system;
  std::string scenario;
  double fmax = 0.01;
  double tol = 1e-4;
  double dt = 1e-3;
  double horizon = 30.0;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out;
};

MarginSpec margin_spec(const Common& c) {
  MarginSpec spec;
  spec.delta_f_max_pu = c.fmax;
  spec.tol_pu = c.tol;
  spec.sim.dt = c.dt;
  spec.sim.horizon_s = c.horizon;
  spec.validate();
  return spec;
}

void add_margin_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--fmax", c.fmax, "Nadir limit in pu")->capture_default_str();
  cmd->add_option("--tol", c.tol, "Bisection tolerance in pu")->capture_default_str();
  cmd->add_option("--dt", c.dt, "Simulation step in s")->capture_default_str();
  cmd->add_option("--horizon", c.horizon, "Simulation horizon in s")->capture_default_str();
}

void add_jobs(CLI::App* cmd, Common& c) {
  cmd->add_option("--jobs", c.jobs, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_seed(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, std::string("Random seed (default: $") + kSeedEnv + " or 1)");
}

LabelingOptions labeling(const Context& ctx, int jobs) {
  LabelingOptions opts;
  opts.jobs = jobs;
  opts.log = [&ctx](const std::string& line) { ctx.log(line); };
  return opts;
}

void report_dataset(const Context& ctx, const LabeledDataset& data, const std::string& path) {
  ctx.out << "records: " << data.size() << "  excluded: " << data.provenance.excluded;
  if (!path.empty()) ctx.out << "  -> " << path;
  ctx.out << '\n';
}

int run(const std::vector<std::string>& args, Context& ctx) {
  CLI::App app{"Learned frequency nadir constraints for unit commitment", "fnclin"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", ctx.verbose, "Log progress to stderr");

  Common c;

  // simulate
  double dp = 0.0;
  auto* simulate = app.add_subcommand("simulate", "Full-order frequency response to a step loss");
  simulate->add_option("--model", c.system, "System model file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--scenario", c.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--dp", dp, "Power imbalance in pu")->required();
  simulate->add_option("--dt", c.dt, "Step in s")->capture_default_str();
  simulate->add_option("--horizon", c.horizon, "Horizon in s")->capture_default_str();
  simulate->add_option("--out", c.out, "Trace CSV (t_s,delta_f_pu); stdout if omitted");

  // reduce
  auto* reduce = app.add_subcommand("reduce", "Aggregate to the second-order model");
  reduce->add_option("--model", c.system, "System model file")->required()->check(CLI::ExistingFile);
  reduce->add_option("--scenario", c.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  reduce->add_option("--fmax", c.fmax, "Nadir limit in pu")->capture_default_str();

  // margin
  auto* margin = app.add_subcommand("margin", "Largest tolerable step loss by simulation");
  margin->add_option("--model", c.system, "System model file")->required()->check(CLI::ExistingFile);
  margin->add_option("--scenario", c.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  add_margin_flags(margin, c);

  // gen-data
  std::size_t count = 0;
  int hidden = 10;
  std::uint64_t elm_seed = 0;
  LoadProfileOptions load;
  auto* gen = app.add_subcommand("gen-data", "Generate and label commitment scenarios");
  gen->add_option("--model", c.system, "System model file")->required()->check(CLI::ExistingFile);
  gen->add_option("--count", count, "Number of scenarios")->required()->check(CLI::PositiveNumber);
  gen->add_option("--out", c.out, "Dataset file")->required();
  gen->add_option("--peak-mw", load.peak_load_mw, "Peak load in MW (0: S_base)")->capture_default_str();
  gen->add_option("--load-min", load.load_min_frac, "Minimum load fraction")->capture_default_str();
  gen->add_option("--load-max", load.load_max_frac, "Maximum load fraction")->capture_default_str();
  gen->add_option("--hidden", hidden, "Hidden neurons of the stored feature map")->capture_default_str();
  gen->add_option("--elm-seed", elm_seed, "Seed of the stored feature map")->capture_default_str();
  add_seed(gen, c);
  add_margin_flags(gen, c);
  add_jobs(gen, c);

  // perturb
  std::string in_path;
  PerturbOptions perturb_opts;
  auto* perturb = app.add_subcommand("perturb", "Noise replica of a dataset, re-labeled");
  perturb->add_option("--model", c.system, "System model file")->required()->check(CLI::ExistingFile);
  perturb->add_option("--in", in_path, "Input dataset")->required()->check(CLI::ExistingFile);
  perturb->add_option("--out", c.out, "Output dataset")->required();
  perturb->add_option("--flip", perturb_opts.flip_prob, "Bit flip probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  perturb->add_option("--jitter", perturb_opts.jitter, "Relative RES output jitter")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_seed(perturb, c);
  add_jobs(perturb, c);

  // split
  std::size_t train_count = 0;
  std::string train_out;
  std::string test_out;
  auto* split_cmd = app.add_subcommand("split", "Random train/test partition");
  split_cmd->add_option("--model", c.system, "System model file")->required()->check(CLI::ExistingFile);
  split_cmd->add_option("--in", in_path, "Input dataset")->required()->check(CLI::ExistingFile);
  split_cmd->add_option("--train", train_count, "Training record count")->required()->check(CLI::PositiveNumber);
  split_cmd->add_option("--train-out", train_out, "Training dataset file")->required();
  split_cmd->add_option("--test-out", test_out, "Test dataset file")->required();
  add_seed(split_cmd, c);

  // train
  std::string data_path;
  TrainOptions train_opts;
  auto* train = app.add_subcommand("train", "Fit the ELM min-of-affine margin model");
  train->add_option("--model", c.system, "System model file")->required()->check(CLI::ExistingFile);
  train->add_option("--data", data_path, "Training dataset")->required()->check(CLI::ExistingFile);
  train->add_option("--L", train_opts.segments, "Affine segments")->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--hidden", hidden, "Hidden neurons")->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--restarts", train_opts.restarts, "Random restarts")->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--max-iters", train_opts.max_iters, "Iterations per restart")->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--out", c.out, "Trained model file")->required();
  add_seed(train, c);

  // predict
  std::string model_file;
  auto* predict = app.add_subcommand("predict", "Predict the margin of a scenario or dataset");
  predict->add_option("--model-file", model_file, "Trained model file")->required()->check(CLI::ExistingFile);
  predict->add_option("--system", c.system, "System model file")->required()->check(CLI::ExistingFile);
  auto* scen_opt = predict->add_option("--scenario", c.scenario, "Scenario file")->check(CLI::ExistingFile);
  auto* data_opt = predict->add_option("--data", data_path, "Dataset; prints id,label_pu,prediction_pu")->check(CLI::ExistingFile);
  scen_opt->excludes(data_opt);

  // evaluate
  std::string config_path;
  std::string csv_out;
  bool timing = false;
  std::optional<int> eval_jobs;
  auto* evaluate = app.add_subcommand("evaluate", "Proposed vs baseline over trials and datasets");
  evaluate->add_option("--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--out", c.out, "Text report; stdout if omitted");
  evaluate->add_option("--csv", csv_out, "CSV companion report");
  evaluate->add_flag("--timing", timing, "Include wall-clock training times");
  evaluate->add_option("--jobs", eval_jobs, "Override the config's jobs")->check(CLI::PositiveNumber);

  // export-fnc
  auto* export_cmd = app.add_subcommand("export-fnc", "Emit per-contingency linear constraints");
  export_cmd->add_option("--model-file", model_file, "Trained model file")->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--system", c.system, "System model file")->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--out", c.out, "Constraint text file; stdout if omitted");
  export_cmd->add_option("--csv", csv_out, "Delimiter-separated companion file");

  std::vector<std::string> argv_store{"fnclin"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, ctx.out, ctx.err);
    return code == 0 ? 0 : 1;
  }

  if (*simulate) {
    const SystemModel model = load_system_model(c.system);
    const CommitmentScenario scen = load_scenario(c.scenario);
    SimulationOptions sim;
    sim.dt = c.dt;
    sim.horizon_s = c.horizon;
    sim.stop_after_nadir_s = -1.0;
    const FrequencyTrace trace = simulate_response(model, scen, dp, sim);
    emit(ctx, c.out, [&](std::ostream& os) {
      os << "t_s,delta_f_pu\n";
      for (std::size_t k = 0; k < trace.samples.size(); ++k)
        os << format_double(trace.time_at(k)) << ',' << format_double(trace.samples[k]) << '\n';
    });
    if (!c.out.empty()) {
      const Nadir n = find_nadir(trace);
      ctx.out << "nadir_pu = " << format_double(n.delta_f_pu) << "\nt_nadir_s = "
              << format_double(n.t_s) << '\n';
    }
    return 0;
  }

  if (*reduce) {
    const SystemModel model = load_system_model(c.system);
    const CommitmentScenario scen = load_scenario(c.scenario);
    const ReducedModel r = aggregate(model, scen);
    const double m = reduced_margin(r, c.fmax);
    ctx.out << "H = " << format_double(r.h) << "\nD = " << format_double(r.d)
            << "\nR = " << format_double(r.r) << "\nF = " << format_double(r.f)
            << "\nT = " << format_double(r.t) << "\nzeta = " << format_double(r.zeta)
            << "\nomega_n = " << format_double(r.omega_n)
            << "\nanalytic_margin_pu = " << format_double(m)
            << "\nanalytic_margin_mw = " << format_double(m * model.s_base_mva()) << '\n';
    if (r.degenerate) ctx.out << "# no TG online; T is the mean reheat constant\n";
    return 0;
  }

  if (*margin) {
    const SystemModel model = load_system_model(c.system);
    const CommitmentScenario scen = load_scenario(c.scenario);
    const MarginResult res = margin_bisect(model, scen, margin_spec(c));
    ctx.out << "margin_pu = " << format_double(res.margin_pu)
            << "\nmargin_mw = " << format_double(res.margin_pu * model.s_base_mva())
            << "\nunbounded = " << (res.unbounded ? "true" : "false")
            << "\nsimulations = " << res.simulations << '\n';
    return 0;
  }

  if (*gen) {
    const SystemModel model = load_system_model(c.system);
    const std::uint64_t seed = resolve_seed(c.seed);
    const MarginSpec spec = margin_spec(c);
    const auto scenarios = generate_scenarios(model, count, seed, load);
    const ElmWeights w = init_weights(hidden, elm_seed, model);
    LabeledDataset data = label_dataset(model, scenarios, spec, w, labeling(ctx, c.jobs));
    data.provenance.generator_seed = seed;
    save_dataset(c.out, model, data);
    report_dataset(ctx, data, c.out);
    return 0;
  }

  if (*perturb) {
    const SystemModel model = load_system_model(c.system);
    const LabeledDataset base = load_dataset(in_path, model);
    const ElmWeights w = init_weights(base.provenance.n_hidden, base.provenance.elm_seed, model);
    const LabeledDataset noisy = perturb_dataset(model, base, resolve_seed(c.seed), perturb_opts, w,
                                                 labeling(ctx, c.jobs));
    save_dataset(c.out, model, noisy);
    report_dataset(ctx, noisy, c.out);
    return 0;
  }

  if (*split_cmd) {
    const SystemModel model = load_system_model(c.system);
    const LabeledDataset data = load_dataset(in_path, model);
    const auto [tr, te] = split(data, train_count, resolve_seed(c.seed));
    save_dataset(train_out, model, tr);
    save_dataset(test_out, model, te);
    ctx.out << "train: " << tr.size() << " -> " << train_out << "\ntest: " << te.size() << " -> "
            << test_out << '\n';
    return 0;
  }

  if (*train) {
    const SystemModel model = load_system_model(c.system);
    const LabeledDataset data = load_dataset(data_path, model);
    train_opts.seed = resolve_seed(c.seed);
    TrainedModel tm;
    tm.weights = init_weights(hidden, train_opts.seed, model);
    const Eigen::MatrixXd z = featurize(tm.weights, model, data.records);
    const Eigen::VectorXd y = data.labels();
    tm.pwl = train_elm_pwl(z, y, train_opts);
    tm.system_hash = model.hash();
    tm.tg_count = model.tg_count();
    tm.res_count = model.res_count();
    save_trained_model(c.out, tm);
    const Eigen::VectorXd p = eval_pwl_rows(tm.pwl, z);
    const Metrics m = metrics(std::span<const double>(p.data(), p.size()),
                              std::span<const double>(y.data(), y.size()), model.s_base_mva());
    ctx.out << "segments = " << tm.pwl.segments.size() << "\ntrain_mae_mw = " << format_double(m.mae_mw)
            << "\ntrain_mre_pct = " << format_double(m.mre_pct)
            << "\ntrain_max_signed_error_pu = " << format_double(m.max_signed_error_pu) << '\n';
    return 0;
  }

  if (*predict) {
    const SystemModel model = load_system_model(c.system);
    const TrainedModel tm = load_trained_model(model_file);
    tm.check_system(model);
    if (!data_path.empty()) {
      const LabeledDataset data = load_dataset(data_path, model);
      ctx.out << "id,label_pu,prediction_pu\n";
      for (const auto& r : data.records)
        ctx.out << r.id << ',' << format_double(r.label_pu) << ','
                << format_double(tm.predict(model, r.scenario)) << '\n';
      return 0;
    }
    if (c.scenario.empty()) throw ValidationError("predict needs --scenario or --data");
    const double m = tm.predict(model, load_scenario(c.scenario));
    ctx.out << "margin_pu = " << format_double(m)
            << "\nmargin_mw = " << format_double(m * model.s_base_mva()) << '\n';
    return 0;
  }

  if (*evaluate) {
    ExperimentConfig cfg = read_experiment_config(config_path);
    if (eval_jobs) cfg.jobs = *eval_jobs;
    const EvalReport report = run_experiment(cfg);
    RenderOptions ropts;
    ropts.include_timing = timing;
    const std::string text = render_report(report, ReportFormat::Text, ropts);
    emit(ctx, c.out, [&](std::ostream& os) { os << text; });
    if (!csv_out.empty()) {
      const std::string csv = render_report(report, ReportFormat::Csv, ropts);
      emit(ctx, csv_out, [&](std::ostream& os) { os << csv; });
    }
    return 0;
  }

  if (*export_cmd) {
    const SystemModel model = load_system_model(c.system);
    const TrainedModel tm = load_trained_model(model_file);
    tm.check_system(model);
    const auto blocks = emit_constraints(tm.pwl, tm.weights, model);
    emit(ctx, c.out, [&](std::ostream& os) { write_constraints_text(os, blocks, model); });
    if (!csv_out.empty())
      emit(ctx, csv_out, [&](std::ostream& os) { write_constraints_csv(os, blocks); });
    return 0;
  }
  return 1;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err};
  try {
    return run(args, ctx);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace fnclin::cli
