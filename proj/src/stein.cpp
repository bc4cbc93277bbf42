#include "srld/stein.hpp"

#include "srld/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace srld {

Eigen::VectorXd velocity(const Eigen::VectorXd& query,
                         const EmpiricalMeasure& measure,
                         const TargetModel& target, double sigma) {
  if (measure.count() == 0)
    throw std::invalid_argument("velocity: empty empirical measure");
  if (!(sigma > 0.0))
    throw std::invalid_argument("velocity: sigma must be > 0, got " +
                                std::to_string(sigma));
  const Eigen::Index d = query.size();
  if (d != target.dim)
    throw std::invalid_argument("velocity: query dimension " +
                                std::to_string(d) + " does not match target " +
                                std::to_string(target.dim));
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  for (const Eigen::VectorXd& p : measure.points) {
    if (p.size() != d)
      throw std::invalid_argument(
          "velocity: measure point dimension mismatch");
    const Eigen::VectorXd diff = p - query;
    const double k = std::exp(-diff.squaredNorm() / sigma);
    // -K(p, q) grad V(p)  +  grad_p K(p, q) = -(2/sigma)(p - q) K
    sum.noalias() += -k * target.grad(p);
    sum.noalias() += (-2.0 / sigma * k) * diff;
  }
  return sum / static_cast<double>(measure.count());
}

std::vector<double> stein_identity_residual(
    const TargetModel& target, Eigen::Index n,
    std::span<const Eigen::VectorXd> grid, std::uint64_t seed, double sigma) {
  if (!target.has_exact_sampler())
    throw std::invalid_argument("stein_identity_residual: target '" +
                                target.name + "' has no exact sampler");
  if (n < 10)
    throw std::invalid_argument(
        "stein_identity_residual: need n >= 10 samples, got " +
        std::to_string(n));
  const Eigen::MatrixXd samples = sample_exact(target, n, seed);
  std::vector<Eigen::VectorXd> points(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    points[static_cast<std::size_t>(i)] = samples.row(i).transpose();
  const EmpiricalMeasure measure{points};
  std::vector<double> residuals;
  residuals.reserve(grid.size());
  for (const Eigen::VectorXd& q : grid)
    residuals.push_back(velocity(q, measure, target, sigma).norm());
  return residuals;
}

std::vector<Eigen::VectorXd> square_grid(int side, double extent) {
  std::vector<Eigen::VectorXd> grid;
  grid.reserve(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      Eigen::VectorXd p(2);
      p[0] = side == 1 ? 0.0 : -extent + 2.0 * extent * i / (side - 1);
      p[1] = side == 1 ? 0.0 : -extent + 2.0 * extent * j / (side - 1);
      grid.push_back(p);
    }
  }
  return grid;
}

}  // namespace srld
