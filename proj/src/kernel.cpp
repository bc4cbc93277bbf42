#include "srld/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace srld {

BandwidthPolicy BandwidthPolicy::fixed(double sigma) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("BandwidthPolicy: fixed sigma must be > 0, got " +
                                std::to_string(sigma));
  return BandwidthPolicy{Mode::fixed, sigma};
}

BandwidthPolicy BandwidthPolicy::median() {
  return BandwidthPolicy{Mode::median_trick, 1.0};
}

BandwidthPolicy BandwidthPolicy::parse(const std::string& text) {
  if (text == "median") return median();
  if (text.rfind("fixed:", 0) == 0) {
    std::size_t pos = 0;
    const std::string value = text.substr(6);
    double sigma = 0.0;
    try {
      sigma = std::stod(value, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("BandwidthPolicy: cannot parse '" + text + "'");
    }
    if (pos != value.size())
      throw std::invalid_argument("BandwidthPolicy: trailing characters in '" +
                                  text + "'");
    return fixed(sigma);
  }
  throw std::invalid_argument(
      "BandwidthPolicy: expected 'median' or 'fixed:<value>', got '" + text +
      "'");
}

std::string BandwidthPolicy::to_string() const {
  return mode == Mode::median_trick ? "median"
                                    : "fixed:" + std::to_string(sigma);
}

namespace {

void check_pair(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                double sigma) {
  if (a.size() != b.size())
    throw std::invalid_argument("rbf: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  if (!(sigma > 0.0))
    throw std::invalid_argument("rbf: sigma must be > 0, got " +
                                std::to_string(sigma));
}

}  // namespace

double rbf(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double sigma) {
  check_pair(a, b, sigma);
  return std::exp(-(a - b).squaredNorm() / sigma);
}

Eigen::VectorXd grad_rbf_arg1(const Eigen::VectorXd& a,
                              const Eigen::VectorXd& b, double sigma) {
  check_pair(a, b, sigma);
  const Eigen::VectorXd diff = a - b;
  const double k = std::exp(-diff.squaredNorm() / sigma);
  return (-2.0 / sigma * k) * diff;
}

double median_pairwise_distance(std::span<const Eigen::VectorXd> points) {
  const std::size_t m = points.size();
  if (m < 2) return 0.0;
  std::vector<double> dists;
  dists.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      dists.push_back((points[i] - points[j]).norm());
  std::sort(dists.begin(), dists.end());
  const std::size_t n = dists.size();
  if (n % 2 == 1) return dists[n / 2];
  return 0.5 * (dists[n / 2 - 1] + dists[n / 2]);
}

MedianBandwidth median_bandwidth(std::span<const Eigen::VectorXd> points) {
  const std::size_t m = points.size();
  if (m <= 1) return {1.0, true};  // log(M) <= 0
  const double med = median_pairwise_distance(points);
  if (med <= 0.0) return {1.0, true};  // coincident points
  const double sigma = med * med / std::log(static_cast<double>(m));
  return {sigma, false};
}

MedianBandwidth resolve_bandwidth(const BandwidthPolicy& policy,
                                  std::span<const Eigen::VectorXd> points) {
  if (policy.mode == BandwidthPolicy::Mode::fixed)
    return {policy.sigma, false};
  return median_bandwidth(points);
}

}  // namespace srld
