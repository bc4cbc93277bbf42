// Stein variational velocity field over an empirical measure, and the
// Stein-identity residual check used to validate targets and samplers.

#pragma once

#include "srld/targets.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace srld {

// Uniformly weighted empirical measure; a non-owning view over points that
// must all share one dimension.
struct EmpiricalMeasure {
  std::span<const Eigen::VectorXd> points;

  Eigen::Index count() const {
    return static_cast<Eigen::Index>(points.size());
  }
};

// g(q; measure) = (1/M) sum_j [ -K(p_j, q) grad V(p_j) + d/dp K(p, q)|_{p_j} ]
// The kernel-gradient term equals (2/sigma)(q - p_j) K and pushes the query
// away from the measure's points.
Eigen::VectorXd velocity(const Eigen::VectorXd& query,
                         const EmpiricalMeasure& measure,
                         const TargetModel& target, double sigma);

// Draws n exact samples, evaluates the velocity at each grid point against
// that one empirical measure, and returns |g| per grid point.  Residuals
// shrink at the Monte-Carlo n^{-1/2} rate when the sampler matches V.
std::vector<double> stein_identity_residual(
    const TargetModel& target, Eigen::Index n,
    std::span<const Eigen::VectorXd> grid, std::uint64_t seed,
    double sigma = 1.0);

// Axis-aligned side x side lattice spanning [-extent, extent]^2.
std::vector<Eigen::VectorXd> square_grid(int side, double extent);

}  // namespace srld
