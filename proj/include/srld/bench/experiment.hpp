// Experiment orchestration: seed sweeps, coupled-noise pairing, reference
// sample generation, metric evaluation and aggregation.

#pragma once

#include "srld/bench/config.hpp"
#include "srld/diagnostics.hpp"
#include "srld/trace.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace srld::bench {

struct SeedMetrics {
  bool failed = false;
  double mmd2 = std::numeric_limits<double>::quiet_NaN();
  double w1 = std::numeric_limits<double>::quiet_NaN();
  double ess_mean = std::numeric_limits<double>::quiet_NaN();
  double bandwidth_used = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> autocorr;  // averaged across dimensions, lags 0..L
};

struct MethodResult {
  std::string name;
  std::vector<SeedMetrics> per_seed;  // aligned with config.seeds
};

struct Aggregate {
  // method -> metric -> median over non-failed seeds
  std::map<std::string, std::map<std::string, double>> medians;
  // metric -> per-seed difference methods[0] - methods[1]
  std::map<std::string, std::vector<double>> paired_diffs;
  // metric -> one-sided sign-test p that methods[0] improves on methods[1]
  std::map<std::string, double> sign_test_p;
};

struct ComparisonResult {
  json target;
  std::vector<std::string> method_names;
  std::vector<std::uint64_t> seeds;
  std::vector<MethodResult> methods;
  Aggregate aggregate;
};

// Deterministic reference draw for metric baselines: the exact sampler when
// the target has one, otherwise a seed-pinned fine-step Langevin run
// (eta = 1e-4, 1e6 steps, first 10% discarded, thinned evenly).
Eigen::MatrixXd reference_samples(const TargetModel& target,
                                  Eigen::Index count);

// Per-seed metrics of one chain's post-burn-in samples against a reference.
SeedMetrics evaluate_chain(const Trace& trace, const Eigen::MatrixXd& reference,
                           const Reporting& reporting, std::uint64_t seed,
                           Eigen::Index keep_every = 1);

// Runs every (seed, method) chain, evaluates metrics, aggregates.  Seeds run
// in parallel workers capped by SRLD_THREADS; results are deterministic
// regardless of scheduling.  Chain divergence marks the seed failed and the
// sweep continues.
ComparisonResult run_experiment(const ExperimentConfig& config);

// Worker count: min(jobs, hardware, SRLD_THREADS when set).
unsigned worker_count(std::size_t jobs);

}  // namespace srld::bench
