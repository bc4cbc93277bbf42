// Sample-quality metrics: kernel MMD, Wasserstein-1, effective sample size
// via Geyer's initial positive-sequence truncation, autocorrelation curves,
// moment traces and summary statistics.  Rows of sample matrices are points.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace srld {

enum class MmdMode { biased, unbiased };

// Squared kernel MMD with K = exp(-|x-y|^2 / sigma).  Biased: all pairs
// including diagonals (always >= 0).  Unbiased: diagonal-excluded
// U-statistic (may be negative); needs at least 2 points per set.
double mmd2(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double sigma,
            MmdMode mode = MmdMode::biased);

// Median heuristic on the pooled X u Y set: sigma = med^2 of pairwise
// Euclidean distances.  Falls back to 1 for degenerate pools.
double mmd_median_sigma(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

struct WassersteinOptions {
  enum class Method { automatic, exact, sliced };
  Method method = Method::automatic;
  // exact optimal assignment up to this many points (d >= 2)
  Eigen::Index exact_cutoff = 512;
  Eigen::Index projections = 128;
  std::uint64_t projection_seed = 0x57315750;  // pinned, recorded in reports
};

// Wasserstein-1 between empirical distributions.  d = 1 uses the exact
// quantile formula; d >= 2 solves the optimal assignment for small equal
// sets and falls back to the sliced approximation (seeded random
// projections) past the cutoff or for unequal counts.
double wasserstein1(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                    const WassersteinOptions& opts = {});

// Normalized empirical autocorrelation rho_0..rho_max_lag computed with the
// full-series mean and variance; rho_0 = 1.  Throws on constant series.
Eigen::VectorXd autocorrelation(const Eigen::VectorXd& series,
                                Eigen::Index max_lag);

// ESS = n / (1 + 2 sum rho_t), truncated at the first consecutive lag pair
// (rho_{2t-1} + rho_{2t}) <= 0.  Positive pair sums only, so ESS <= n.
double ess(const Eigen::VectorXd& series);

// Sliding-window mean of |theta_k|^2 over the given states.
std::vector<double> moment_trace(const std::vector<Eigen::VectorXd>& states,
                                 Eigen::Index window);

struct SummaryStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // unbiased
};

SummaryStats summary_stats(const Eigen::MatrixXd& samples);

// Median of a list (average of middles for even length); helper shared by
// the harness aggregations.
double median(std::vector<double> values);

}  // namespace srld
