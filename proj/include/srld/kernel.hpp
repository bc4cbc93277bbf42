// RBF kernel K(a, b) = exp(-|a - b|^2 / sigma), its gradient in the first
// argument, and the med^2/log(M) adaptive bandwidth rule.

#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>

namespace srld {

// Kernel bandwidth selection for the Stein velocity field.
struct BandwidthPolicy {
  enum class Mode { fixed, median_trick };
  Mode mode = Mode::median_trick;
  double sigma = 1.0;  // used when mode == fixed

  static BandwidthPolicy fixed(double sigma);
  static BandwidthPolicy median();
  // "fixed:<value>" or "median"
  static BandwidthPolicy parse(const std::string& text);
  std::string to_string() const;
};

double rbf(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double sigma);

// d/d(a) of rbf(a, b): -(2/sigma) (a - b) K(a, b)
Eigen::VectorXd grad_rbf_arg1(const Eigen::VectorXd& a,
                              const Eigen::VectorXd& b, double sigma);

struct MedianBandwidth {
  double sigma = 1.0;
  bool degenerate = false;  // fallback sigma = 1 was used
};

// Median of the M(M-1)/2 pairwise Euclidean distances.  Returns 0 when
// fewer than two points are given.
double median_pairwise_distance(std::span<const Eigen::VectorXd> points);

// sigma = med^2 / log(M).  Degenerate inputs (M <= 1, or all points
// coincident) fall back to sigma = 1 with the flag set.
MedianBandwidth median_bandwidth(std::span<const Eigen::VectorXd> points);

// Resolves a policy against a point set (median_trick consults the points).
MedianBandwidth resolve_bandwidth(const BandwidthPolicy& policy,
                                  std::span<const Eigen::VectorXd> points);

}  // namespace srld
