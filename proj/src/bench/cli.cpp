#include "srld/bench/cli.hpp"

#include "srld/bench/config.hpp"
#include "srld/bench/experiment.hpp"
#include "srld/bench/report.hpp"
#include "srld/diagnostics.hpp"
#include "srld/dynamics.hpp"
#include "srld/rng.hpp"
#include "srld/stein.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace srld::bench {

namespace {

Eigen::VectorXd parse_init_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

struct SampleArgs {
  std::string target = "gaussian:d=2";
  std::string method = "srld";
  std::string alpha = "10";
  double eta = 1e-3;
  long long steps = 20000;
  long long window = 10;
  long long thin = 100;
  long long keep_every = 1;
  std::string bandwidth = "median";
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string config_path;
  std::string init;
};

int run_sample(const SampleArgs& a, const CLI::App* cmd, std::ostream& out) {
  const auto given = [cmd](const std::string& name) {
    return cmd->count(name) > 0;
  };
  TargetSpec target_spec = parse_target_inline(a.target);
  SamplerConfig cfg;
  cfg.alpha = 10.0;
  std::optional<Eigen::VectorXd> init;
  std::string method = a.method;
  if (!a.config_path.empty()) {
    const ExperimentConfig file = load_experiment_config(a.config_path);
    target_spec = file.target;
    cfg = file.methods.front().cfg;
    init = file.init;
    if (!file.seeds.empty()) cfg.seed = file.seeds.front();
    if (!given("--method")) method = to_string(file.methods.front().kind);
  }
  // flags override config values
  if (given("--target")) target_spec = parse_target_inline(a.target);
  if (given("--eta")) cfg.step_size = a.eta;
  if (given("--steps")) cfg.total_steps = a.steps;
  if (given("--window")) cfg.window_size = a.window;
  if (given("--thin")) cfg.thinning = a.thin;
  if (given("--keep-every")) cfg.keep_every = a.keep_every;
  if (given("--bandwidth")) cfg.bandwidth = BandwidthPolicy::parse(a.bandwidth);
  if (given("--seed") || a.config_path.empty()) cfg.seed = a.seed;
  if (!a.init.empty()) init = parse_init_list(a.init);

  const TargetModel target = make_target(target_spec);
  const ChainKind kind = parse_chain_kind(method);
  const Eigen::VectorXd theta0 =
      init ? *init : default_init(target, cfg.seed);

  std::string alpha_text = a.alpha;
  if (!given("--alpha") && !a.config_path.empty())
    alpha_text = format_double(cfg.alpha);
  if (alpha_text == "auto") {
    // Estimate alpha from a Langevin burn-in with the same noise stream;
    // SRLD's first phase then reproduces it exactly.
    SamplerConfig burn_cfg = cfg;
    burn_cfg.alpha = 0.0;
    burn_cfg.total_steps = cfg.burnin_steps();
    const Trace burnin =
        run_chain(ChainKind::langevin, target, burn_cfg, theta0);
    const AutoAlpha est = auto_alpha(burnin, target, cfg);
    cfg.alpha = est.alpha;
    out << "auto alpha = " << format_double(est.alpha)
        << (est.degenerate ? " (degenerate burn-in)" : "") << '\n';
  } else {
    cfg.alpha = std::stod(alpha_text);
  }

  std::filesystem::create_directories(std::filesystem::path(a.out) / "traces");
  const Trace trace = run_chain(kind, target, cfg, theta0);
  const std::string path = trace_csv_path(a.out, method, cfg.seed);
  write_trace_csv(trace, path, cfg.keep_every);
  out << "target: " << target.name << '\n'
      << "method: " << method << "  steps: " << cfg.total_steps
      << "  eta: " << format_double(cfg.step_size)
      << "  alpha: " << format_double(cfg.alpha) << '\n'
      << "trace: " << path << '\n';
  return 0;
}

int run_compare(const std::string& config_path, const std::string& out_dir,
                std::ostream& out) {
  ExperimentConfig config = load_experiment_config(config_path);
  if (!out_dir.empty()) config.out_dir = out_dir;
  if (config.out_dir.empty())
    throw std::invalid_argument(
        "compare: no output directory (set --out or config \"outputs\")");
  const ComparisonResult result = run_experiment(config);

  std::size_t ok_seeds = 0;
  for (std::size_t s = 0; s < result.seeds.size(); ++s) {
    bool all_ok = true;
    for (const auto& m : result.methods)
      if (m.per_seed[s].failed) all_ok = false;
    if (all_ok) ++ok_seeds;
  }
  out << "target: " << result.target.dump() << '\n';
  out << "seeds: " << result.seeds.size() << " (" << ok_seeds
      << " complete)\n";
  for (const auto& [method, metrics] : result.aggregate.medians) {
    out << method << ":";
    for (const auto& [key, value] : metrics)
      out << "  " << key << "=" << format_double(value);
    out << '\n';
  }
  for (const auto& [key, p] : result.aggregate.sign_test_p)
    out << "sign test " << key << ": p=" << format_double(p) << '\n';
  out << "report: "
      << (std::filesystem::path(config.out_dir) / "metrics.json").string()
      << '\n';
  if (ok_seeds == 0) {
    out << "error: every seed failed (chain divergence)\n";
    return 1;
  }
  return 0;
}

int run_diagnose(const std::string& trace_path, const std::string& ref_path,
                 long long max_lag, bool post_burnin, std::ostream& out) {
  const TraceCsv trace = read_trace_csv(trace_path);
  const TraceCsv ref = read_trace_csv(ref_path);
  Eigen::MatrixXd x = trace.states;
  if (post_burnin && !trace.phases.empty()) {
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 0; i < trace.phases.size(); ++i)
      if (trace.phases[i] != "burnin")
        keep.push_back(static_cast<Eigen::Index>(i));
    Eigen::MatrixXd filtered(static_cast<Eigen::Index>(keep.size()), x.cols());
    for (std::size_t i = 0; i < keep.size(); ++i)
      filtered.row(static_cast<Eigen::Index>(i)) = x.row(keep[i]);
    x = std::move(filtered);
  }
  const Eigen::MatrixXd& y = ref.states;
  if (x.rows() < 2 || y.rows() < 2)
    throw std::invalid_argument("diagnose: need at least 2 rows per file");
  const double sigma = mmd_median_sigma(x, y);
  const double mmd = mmd2(x, y, sigma, MmdMode::biased);
  const double w1 = wasserstein1(x, y);
  const Eigen::Index lag =
      std::min<Eigen::Index>(max_lag, x.rows() - 1);
  double ess_sum = 0.0;
  double lag1 = 0.0;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    ess_sum += ess(x.col(c));
    lag1 += autocorrelation(x.col(c), lag)[std::min<Eigen::Index>(1, lag)];
  }
  out << "rows: " << x.rows() << " vs " << y.rows() << "  dim: " << x.cols()
      << '\n'
      << "mmd2: " << format_double(mmd) << "  (bandwidth " << format_double(sigma)
      << ")\n"
      << "w1: " << format_double(w1) << '\n'
      << "ess_mean: " << format_double(ess_sum / x.cols()) << '\n'
      << "lag1_autocorr: " << format_double(lag1 / x.cols()) << '\n';
  return 0;
}

int run_stein_check(const std::string& target_text,
                    std::vector<long long> ns, int grid_side,
                    double grid_extent, double sigma, std::uint64_t seed,
                    std::ostream& out) {
  const TargetModel target = make_target(parse_target_inline(target_text));
  if (target.dim != 2)
    throw std::invalid_argument("stein-check: grid check needs a 2D target");
  if (ns.empty()) ns = {1000, 100000};
  const auto grid = square_grid(grid_side, grid_extent);
  out << "target: " << target.name << "  sigma: " << format_double(sigma)
      << "  grid: " << grid.size() << " points in [-"
      << format_double(grid_extent) << "," << format_double(grid_extent)
      << "]^2\n";
  std::vector<double> medians;
  for (long long n : ns) {
    const auto residuals =
        stein_identity_residual(target, n, grid, seed, sigma);
    std::vector<double> sorted = residuals;
    const double med = median(sorted);
    const double mx = *std::max_element(residuals.begin(), residuals.end());
    medians.push_back(med);
    out << "n=" << n << "  max |g| = " << format_double(mx)
        << "  median |g| = " << format_double(med) << '\n';
  }
  for (std::size_t i = 1; i < medians.size(); ++i)
    out << "median ratio n=" << ns[i - 1] << " / n=" << ns[i] << " : "
        << format_double(medians[i - 1] / medians[i]) << '\n';
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Self-repulsive Langevin sampling benchmark harness"};
  app.require_subcommand(1);

  SampleArgs sample;
  CLI::App* cmd_sample =
      app.add_subcommand("sample", "run one chain and write its trace CSV");
  cmd_sample->add_option("--target", sample.target,
                         "inline target, e.g. gaussian:d=2 | banana2d | "
                         "mixture:d=2,mode=1");
  cmd_sample->add_option("--method", sample.method, "langevin | srld");
  cmd_sample->add_option("--alpha", sample.alpha,
                         "repulsion strength (number or 'auto')");
  cmd_sample->add_option("--eta", sample.eta, "step size");
  cmd_sample->add_option("--steps", sample.steps, "total iterations");
  cmd_sample->add_option("--window", sample.window, "window size M");
  cmd_sample->add_option("--thin", sample.thin, "thinning factor c_eta");
  cmd_sample->add_option("--keep-every", sample.keep_every,
                         "trace CSV row stride");
  cmd_sample->add_option("--bandwidth", sample.bandwidth,
                         "median | fixed:<value>");
  cmd_sample->add_option("--seed", sample.seed, "chain seed");
  cmd_sample->add_option("--out", sample.out, "output directory");
  cmd_sample->add_option("--config", sample.config_path,
                         "experiment config supplying defaults");
  cmd_sample->add_option("--init", sample.init,
                         "initial state as comma-separated numbers");

  std::string compare_config, compare_out;
  CLI::App* cmd_compare = app.add_subcommand(
      "compare", "paired experiment from a JSON config file");
  cmd_compare->add_option("--config", compare_config, "config path")
      ->required();
  cmd_compare->add_option("--out", compare_out,
                          "output directory (overrides config)");

  std::string diag_trace, diag_ref;
  long long diag_max_lag = 50;
  bool diag_post_burnin = false;
  CLI::App* cmd_diag = app.add_subcommand(
      "diagnose", "metrics of an existing trace CSV vs a reference CSV");
  cmd_diag->add_option("--trace", diag_trace, "trace CSV")->required();
  cmd_diag->add_option("--reference", diag_ref, "reference CSV")->required();
  cmd_diag->add_option("--max-lag", diag_max_lag, "autocorrelation horizon");
  cmd_diag->add_flag("--post-burnin", diag_post_burnin,
                     "drop rows whose phase is 'burnin'");

  std::string stein_target = "gaussian:d=2";
  std::vector<long long> stein_ns;
  int stein_side = 5;
  double stein_extent = 2.0, stein_sigma = 1.0;
  std::uint64_t stein_seed = 0;
  CLI::App* cmd_stein = app.add_subcommand(
      "stein-check", "Stein-identity residual table over a 2D grid");
  cmd_stein->add_option("--target", stein_target, "inline 2D target");
  cmd_stein->add_option("--n", stein_ns,
                        "sample counts (repeatable; default 1000 100000)");
  cmd_stein->add_option("--grid-side", stein_side, "grid points per axis");
  cmd_stein->add_option("--grid-extent", stein_extent, "grid half-width");
  cmd_stein->add_option("--sigma", stein_sigma, "kernel bandwidth");
  cmd_stein->add_option("--seed", stein_seed, "sampler seed");

  std::vector<std::string> argv_copy = args;
  try {
    std::vector<const char*> argv;
    argv.push_back("srld-bench");
    for (const auto& a : argv_copy) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    if (cmd_sample->parsed()) return run_sample(sample, cmd_sample, out);
    if (cmd_compare->parsed())
      return run_compare(compare_config, compare_out, out);
    if (cmd_diag->parsed())
      return run_diagnose(diag_trace, diag_ref, diag_max_lag, diag_post_burnin,
                          out);
    if (cmd_stein->parsed())
      return run_stein_check(stein_target, stein_ns, stein_side, stein_extent,
                             stein_sigma, stein_seed, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << "error: no subcommand given\n" << app.help();
  return 2;
}

}  // namespace srld::bench
