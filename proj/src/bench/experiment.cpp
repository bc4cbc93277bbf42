#include "srld/bench/experiment.hpp"

#include "srld/bench/report.hpp"
#include "srld/bench/stats.hpp"
#include "srld/rng.hpp"
#include "srld/stein.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace srld::bench {

namespace {

constexpr std::uint64_t kReferenceSeed = 0x726566u;  // pinned reference draw

Eigen::MatrixXd subsample_rows(const Eigen::MatrixXd& m, Eigen::Index cap,
                               std::uint64_t seed) {
  if (m.rows() <= cap) return m;
  const auto idx = subsample_indices(m.rows(), cap, seed);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = m.row(idx[i]);
  return out;
}

GeneralDynamicsSpec make_dq(const MethodEntry& entry) {
  return GeneralDynamicsSpec(*entry.diffusion, *entry.curl);
}

}  // namespace

Eigen::MatrixXd reference_samples(const TargetModel& target,
                                  Eigen::Index count) {
  if (count < 2)
    throw std::invalid_argument("reference_samples: count must be >= 2");
  if (target.has_exact_sampler())
    return sample_exact(target, count, kReferenceSeed);
  // No closed form: seed-pinned fine-step Langevin run, thinned evenly.
  SamplerConfig cfg;
  cfg.step_size = 1e-4;
  cfg.alpha = 0.0;
  cfg.total_steps = 1'000'000;
  cfg.seed = kReferenceSeed;
  const Trace trace = run_chain(ChainKind::langevin, target, cfg,
                                Eigen::VectorXd::Zero(target.dim));
  const Eigen::Index start = cfg.total_steps / 10;  // discard warm-up
  const Eigen::Index span = trace.size() - start;
  if (count > span)
    throw std::invalid_argument(
        "reference_samples: requested more reference points than the pinned "
        "run provides");
  Eigen::MatrixXd out(count, target.dim);
  for (Eigen::Index i = 0; i < count; ++i)
    out.row(i) =
        trace.states[static_cast<std::size_t>(start + i * span / count)]
            .transpose();
  return out;
}

namespace {

SeedMetrics evaluate_kept(const Eigen::MatrixXd& kept,
                          const Eigen::MatrixXd& reference,
                          const Reporting& reporting, std::uint64_t seed) {
  if (kept.rows() < 2)
    throw std::invalid_argument(
        "evaluate_chain: fewer than 2 post-burn-in samples; increase "
        "total_steps");
  SeedMetrics m;
  const Eigen::MatrixXd x = subsample_rows(
      kept, reporting.metric_sample_cap,
      derive_seed(seed, stream_tag::subsample, 0));
  const Eigen::MatrixXd y = subsample_rows(
      reference, reporting.metric_sample_cap,
      derive_seed(seed, stream_tag::subsample, 1));
  m.bandwidth_used = mmd_median_sigma(x, y);
  m.mmd2 = mmd2(x, y, m.bandwidth_used, MmdMode::biased);
  m.w1 = wasserstein1(x, y);

  const Eigen::Index max_lag =
      std::min<Eigen::Index>(reporting.max_lag, kept.rows() - 1);
  const Eigen::Index d = kept.cols();
  Eigen::VectorXd mean_curve = Eigen::VectorXd::Zero(max_lag + 1);
  double ess_sum = 0.0;
  for (Eigen::Index c = 0; c < d; ++c) {
    const Eigen::VectorXd series = kept.col(c);
    ess_sum += ess(series);
    mean_curve += autocorrelation(series, max_lag);
  }
  m.ess_mean = ess_sum / static_cast<double>(d);
  mean_curve /= static_cast<double>(d);
  m.autocorr.assign(mean_curve.data(), mean_curve.data() + mean_curve.size());
  return m;
}

}  // namespace

SeedMetrics evaluate_chain(const Trace& trace,
                           const Eigen::MatrixXd& reference,
                           const Reporting& reporting, std::uint64_t seed,
                           Eigen::Index keep_every) {
  return evaluate_kept(post_burnin_samples(trace, keep_every), reference,
                       reporting, seed);
}

unsigned worker_count(std::size_t jobs) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("SRLD_THREADS")) {
    const long v = std::atol(env);
    if (v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
  }
  return std::min<unsigned>(hw, jobs == 0 ? 1u : static_cast<unsigned>(jobs));
}

ComparisonResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  const TargetModel target = make_target(config.target);
  if (config.init && config.init->size() != target.dim)
    throw std::invalid_argument("config: init: dimension " +
                                std::to_string(config.init->size()) +
                                " does not match target dimension " +
                                std::to_string(target.dim));

  // Resolve step-size matching before any chain runs.
  std::vector<MethodEntry> methods = config.methods;
  if (config.match_pilot_steps) {
    const MethodEntry* srld_entry = nullptr;
    for (const auto& m : methods)
      if (m.kind == ChainKind::srld && m.cfg.alpha > 0.0) {
        srld_entry = &m;
        break;
      }
    if (srld_entry == nullptr)
      throw std::invalid_argument(
          "config: match_step_sizes needs an srld method with alpha > 0");
    SamplerConfig pilot_cfg = srld_entry->cfg;
    pilot_cfg.seed = config.seeds.front();
    const MatchedStepSize matched =
        match_step_sizes(target, pilot_cfg, *config.match_pilot_steps);
    for (auto& m : methods)
      if (m.kind == ChainKind::langevin)
        m.cfg.step_size = matched.eta_langevin;
  }

  const Eigen::MatrixXd reference =
      reference_samples(target, config.reference_count);

  // Pre-built general-dynamics specs (construction validates D and Q).
  std::vector<std::optional<GeneralDynamicsSpec>> dq_specs(methods.size());
  for (std::size_t i = 0; i < methods.size(); ++i)
    if (methods[i].kind == ChainKind::general)
      dq_specs[i].emplace(make_dq(methods[i]));

  const bool emit = !config.out_dir.empty();
  if (emit) {
    std::filesystem::create_directories(std::filesystem::path(config.out_dir) /
                                        "traces");
    std::filesystem::create_directories(std::filesystem::path(config.out_dir) /
                                        "plots");
  }

  ComparisonResult result;
  result.target = target_to_json(config.target);
  result.seeds = config.seeds;
  for (const auto& m : methods) result.method_names.push_back(m.name);
  result.methods.resize(methods.size());
  for (std::size_t i = 0; i < methods.size(); ++i) {
    result.methods[i].name = methods[i].name;
    result.methods[i].per_seed.resize(config.seeds.size());
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&]() {
    for (;;) {
      const std::size_t s = next.fetch_add(1);
      if (s >= config.seeds.size()) return;
      const std::uint64_t seed = config.seeds[s];
      try {
        const Eigen::VectorXd theta0 =
            config.init ? *config.init : default_init(target, seed);
        for (std::size_t i = 0; i < methods.size(); ++i) {
          SamplerConfig cfg = methods[i].cfg;
          cfg.seed = config.pairing == Pairing::coupled_noise
                         ? seed
                         : derive_seed(seed, 0x6d657468u, i);
          SeedMetrics metrics;
          try {
            const Trace trace =
                run_chain(methods[i].kind, target, cfg, theta0,
                          dq_specs[i] ? &*dq_specs[i] : nullptr);
            if (emit)
              write_trace_csv(trace,
                              trace_csv_path(config.out_dir, methods[i].name,
                                             seed),
                              cfg.keep_every);
            metrics = evaluate_kept(post_burnin_samples(trace, cfg.keep_every),
                                    reference, config.reporting, seed);
          } catch (const ChainDivergence&) {
            metrics.failed = true;
          }
          result.methods[i].per_seed[s] = std::move(metrics);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  const unsigned workers = worker_count(config.seeds.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Aggregation: medians per method, paired differences and sign tests for
  // two-method comparisons.  lag1_autocorr reads autocorr[1].
  auto metric_value = [](const SeedMetrics& m,
                         const std::string& key) -> double {
    if (key == "mmd2") return m.mmd2;
    if (key == "w1") return m.w1;
    if (key == "ess_mean") return m.ess_mean;
    return m.autocorr.size() > 1
               ? m.autocorr[1]
               : std::numeric_limits<double>::quiet_NaN();
  };
  const std::vector<std::string> metric_keys = {"mmd2", "w1", "ess_mean",
                                                "lag1_autocorr"};
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (const auto& key : metric_keys) {
      std::vector<double> values;
      for (const auto& sm : result.methods[i].per_seed)
        if (!sm.failed) values.push_back(metric_value(sm, key));
      if (!values.empty())
        result.aggregate.medians[methods[i].name][key] =
            median(std::move(values));
    }
  }
  if (methods.size() == 2) {
    const std::map<std::string, bool> lower_better = {
        {"mmd2", true}, {"w1", true}, {"ess_mean", false},
        {"lag1_autocorr", true}};
    for (const auto& key : metric_keys) {
      std::vector<double> diffs;
      for (std::size_t s = 0; s < config.seeds.size(); ++s) {
        const SeedMetrics& a = result.methods[0].per_seed[s];
        const SeedMetrics& b = result.methods[1].per_seed[s];
        if (a.failed || b.failed) continue;
        diffs.push_back(metric_value(a, key) - metric_value(b, key));
      }
      result.aggregate.sign_test_p[key] =
          sign_test_p(diffs, lower_better.at(key));
      result.aggregate.paired_diffs[key] = std::move(diffs);
    }
  }

  if (emit) emit_reports(result, config.out_dir);
  return result;
}

}  // namespace srld::bench
