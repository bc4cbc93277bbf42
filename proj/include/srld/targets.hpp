// Sampling targets: differentiable potentials V with analytic gradients,
// plus exact samplers and closed-form moments where the target has them.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace srld {

// A target distribution rho*(x) ~ exp(-V(x)).  Immutable after construction;
// all callables are pure, so the model is safe to share across threads.
struct TargetModel {
  Eigen::Index dim = 0;
  std::string name;
  std::function<double(const Eigen::VectorXd&)> potential;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
  // (count, seed) -> n x dim matrix, rows are samples
  std::function<Eigen::MatrixXd(Eigen::Index, std::uint64_t)> exact_sampler;
  std::optional<Eigen::VectorXd> analytic_mean;
  std::optional<Eigen::MatrixXd> analytic_cov;

  bool has_exact_sampler() const { return static_cast<bool>(exact_sampler); }
};

// Correlated 2D target: V = x0^4/10 + (4(x1 + 1.2) - x0^2)^2 / 2.
// No closed-form sampler or moments.
struct Banana2dSpec {};

// Equal-covariance isotropic Gaussian mixture, components N(mean_i, var I).
struct GaussMixtureSpec {
  std::vector<Eigen::VectorXd> means;
  std::vector<double> weights;
  double variance = 1.0;
};

// N(0, variance * I_dim)
struct IsotropicGaussianSpec {
  Eigen::Index dim = 1;
  double variance = 1.0;
};

// Gaussian posterior of Bayesian linear regression with ridge prior:
// V(b) = noise_precision/2 |y - X b|^2 + prior_precision/2 |b|^2.
struct BayesLinregSpec {
  Eigen::MatrixXd design;     // n x d
  Eigen::VectorXd responses;  // n
  double prior_precision = 1.0;
  double noise_precision = 1.0;
};

using TargetSpec = std::variant<Banana2dSpec, GaussMixtureSpec,
                                IsotropicGaussianSpec, BayesLinregSpec>;

// Throws std::invalid_argument naming the offending field.
void validate(const TargetSpec& spec);

TargetModel make_target(const TargetSpec& spec);

// Checked entry points (dimension mismatch -> std::invalid_argument).
double potential(const TargetModel& target, const Eigen::VectorXd& theta);
Eigen::VectorXd grad_potential(const TargetModel& target,
                               const Eigen::VectorXd& theta);
// Requires an exact sampler; deterministic given seed.
Eigen::MatrixXd sample_exact(const TargetModel& target, Eigen::Index n,
                             std::uint64_t seed);

// Convenience builders for the distributions used in the synthetic studies.
TargetSpec banana2d();
TargetSpec isotropic_gaussian(Eigen::Index dim, double variance);
// Symmetric two-mode mixture with means +/- mode_scale * ones(dim).
TargetSpec symmetric_mixture(Eigen::Index dim, double mode_scale,
                             double variance);

}  // namespace srld
