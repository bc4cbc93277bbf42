#include "srld/targets.hpp"

#include "srld/rng.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace srld {

namespace {

void check_dim(const TargetModel& target, const Eigen::VectorXd& theta,
               const char* op) {
  if (theta.size() != target.dim)
    throw std::invalid_argument(std::string(op) + ": expected dimension " +
                                std::to_string(target.dim) + ", got " +
                                std::to_string(theta.size()));
}

// log sum_i exp(a_i), guarded against empty input upstream
double log_sum_exp(const Eigen::VectorXd& a) {
  const double m = a.maxCoeff();
  return m + std::log((a.array() - m).exp().sum());
}

TargetModel make_banana(const Banana2dSpec&) {
  TargetModel t;
  t.dim = 2;
  t.name = "banana2d";
  t.potential = [](const Eigen::VectorXd& x) {
    const double u = 4.0 * (x[1] + 1.2) - x[0] * x[0];
    return std::pow(x[0], 4) / 10.0 + 0.5 * u * u;
  };
  t.grad = [](const Eigen::VectorXd& x) {
    const double u = 4.0 * (x[1] + 1.2) - x[0] * x[0];
    Eigen::VectorXd g(2);
    g[0] = 0.4 * std::pow(x[0], 3) - 2.0 * x[0] * u;
    g[1] = 4.0 * u;
    return g;
  };
  return t;
}

TargetModel make_isotropic(const IsotropicGaussianSpec& spec) {
  TargetModel t;
  t.dim = spec.dim;
  t.name = "isotropic_gaussian(d=" + std::to_string(spec.dim) +
           ",var=" + std::to_string(spec.variance) + ")";
  const double var = spec.variance;
  t.potential = [var](const Eigen::VectorXd& x) {
    return 0.5 * x.squaredNorm() / var;
  };
  t.grad = [var](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return x / var;
  };
  const Eigen::Index d = spec.dim;
  const double sd = std::sqrt(var);
  t.exact_sampler = [d, sd](Eigen::Index n, std::uint64_t seed) {
    NormalStream rng(derive_seed(seed, stream_tag::exact_sampler));
    return Eigen::MatrixXd(sd * rng.matrix(n, d));
  };
  t.analytic_mean = Eigen::VectorXd::Zero(d);
  t.analytic_cov = var * Eigen::MatrixXd::Identity(d, d);
  return t;
}

TargetModel make_mixture(const GaussMixtureSpec& spec) {
  const Eigen::Index d = spec.means.front().size();
  const Eigen::Index k = static_cast<Eigen::Index>(spec.means.size());
  const double var = spec.variance;

  Eigen::VectorXd log_w(k);
  for (Eigen::Index i = 0; i < k; ++i) log_w[i] = std::log(spec.weights[i]);
  std::vector<Eigen::VectorXd> means = spec.means;

  TargetModel t;
  t.dim = d;
  t.name = "gauss_mixture(k=" + std::to_string(k) + ",d=" + std::to_string(d) +
           ",var=" + std::to_string(var) + ")";

  // V = -log sum_i w_i exp(-|x - mu_i|^2 / (2 var)); the shared Gaussian
  // normalizer is dropped (additive constant, inert in the dynamics).
  auto component_logs = [means, log_w, var, k](const Eigen::VectorXd& x) {
    Eigen::VectorXd logs(k);
    for (Eigen::Index i = 0; i < k; ++i)
      logs[i] = log_w[i] - 0.5 * (x - means[i]).squaredNorm() / var;
    return logs;
  };
  t.potential = [component_logs](const Eigen::VectorXd& x) {
    return -log_sum_exp(component_logs(x));
  };
  t.grad = [component_logs, means, var, d,
            k](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::VectorXd logs = component_logs(x);
    const double lse = log_sum_exp(logs);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 0; i < k; ++i) {
      const double resp = std::exp(logs[i] - lse);
      g += resp / var * (x - means[i]);
    }
    return g;
  };

  std::vector<double> weights = spec.weights;
  const double sd = std::sqrt(var);
  t.exact_sampler = [means, weights, sd, d, k](Eigen::Index n,
                                               std::uint64_t seed) {
    NormalStream rng(derive_seed(seed, stream_tag::exact_sampler));
    Eigen::MatrixXd out(n, d);
    for (Eigen::Index r = 0; r < n; ++r) {
      const double u = rng.uniform01();
      Eigen::Index comp = k - 1;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < k; ++i) {
        acc += weights[static_cast<std::size_t>(i)];
        if (u < acc) {
          comp = i;
          break;
        }
      }
      out.row(r) = (means[static_cast<std::size_t>(comp)] + sd * rng.vector(d))
                       .transpose();
    }
    return out;
  };

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < k; ++i) mean += spec.weights[i] * means[i];
  Eigen::MatrixXd cov = var * Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::VectorXd c = means[i] - mean;
    cov += spec.weights[i] * c * c.transpose();
  }
  t.analytic_mean = mean;
  t.analytic_cov = cov;
  return t;
}

TargetModel make_bayes_linreg(const BayesLinregSpec& spec) {
  const Eigen::Index d = spec.design.cols();
  const double tau = spec.noise_precision;
  const double lambda = spec.prior_precision;

  // Posterior precision and mean (standard conjugate Gaussian algebra).
  const Eigen::MatrixXd precision =
      tau * spec.design.transpose() * spec.design +
      lambda * Eigen::MatrixXd::Identity(d, d);
  const Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument(
        "bayes_linreg: posterior precision is not positive definite");
  const Eigen::VectorXd mean =
      llt.solve(tau * spec.design.transpose() * spec.responses);
  const Eigen::MatrixXd cov =
      llt.solve(Eigen::MatrixXd::Identity(d, d));
  const Eigen::MatrixXd chol_u = llt.matrixU();

  TargetModel t;
  t.dim = d;
  t.name = "bayes_linreg(d=" + std::to_string(d) + ")";
  const Eigen::MatrixXd design = spec.design;
  const Eigen::VectorXd responses = spec.responses;
  t.potential = [design, responses, tau, lambda](const Eigen::VectorXd& b) {
    return 0.5 * tau * (responses - design * b).squaredNorm() +
           0.5 * lambda * b.squaredNorm();
  };
  t.grad = [design, responses, tau,
            lambda](const Eigen::VectorXd& b) -> Eigen::VectorXd {
    return tau * design.transpose() * (design * b - responses) + lambda * b;
  };
  // sample = mean + U^{-1} z with precision = U^T U
  t.exact_sampler = [mean, chol_u, d](Eigen::Index n, std::uint64_t seed) {
    NormalStream rng(derive_seed(seed, stream_tag::exact_sampler));
    Eigen::MatrixXd out(n, d);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Eigen::VectorXd z = rng.vector(d);
      out.row(r) =
          (mean + chol_u.triangularView<Eigen::Upper>().solve(z)).transpose();
    }
    return out;
  };
  t.analytic_mean = mean;
  t.analytic_cov = cov;
  return t;
}

}  // namespace

void validate(const TargetSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Banana2dSpec>) {
          // no parameters
        } else if constexpr (std::is_same_v<T, IsotropicGaussianSpec>) {
          if (s.dim < 1)
            throw std::invalid_argument(
                "isotropic_gaussian.dim must be >= 1, got " +
                std::to_string(s.dim));
          if (!(s.variance > 0.0))
            throw std::invalid_argument(
                "isotropic_gaussian.variance must be > 0, got " +
                std::to_string(s.variance));
        } else if constexpr (std::is_same_v<T, GaussMixtureSpec>) {
          if (s.means.empty())
            throw std::invalid_argument("gauss_mixture.means must be non-empty");
          if (s.means.size() != s.weights.size())
            throw std::invalid_argument(
                "gauss_mixture.weights: expected one weight per mean (" +
                std::to_string(s.means.size()) + " means, " +
                std::to_string(s.weights.size()) + " weights)");
          const Eigen::Index d = s.means.front().size();
          for (const auto& m : s.means)
            if (m.size() != d)
              throw std::invalid_argument(
                  "gauss_mixture.means: inconsistent dimensions");
          double sum = 0.0;
          for (double w : s.weights) {
            if (!(w > 0.0))
              throw std::invalid_argument(
                  "gauss_mixture.weights must be strictly positive, got " +
                  std::to_string(w));
            sum += w;
          }
          if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument(
                "gauss_mixture.weights must sum to 1, got " +
                std::to_string(sum));
          if (!(s.variance > 0.0))
            throw std::invalid_argument(
                "gauss_mixture.variance must be > 0, got " +
                std::to_string(s.variance));
        } else if constexpr (std::is_same_v<T, BayesLinregSpec>) {
          if (s.design.rows() != s.responses.size())
            throw std::invalid_argument(
                "bayes_linreg.design: row count " +
                std::to_string(s.design.rows()) +
                " does not match responses length " +
                std::to_string(s.responses.size()));
          if (s.design.cols() < 1)
            throw std::invalid_argument(
                "bayes_linreg.design must have at least one column");
          if (!(s.prior_precision > 0.0))
            throw std::invalid_argument(
                "bayes_linreg.prior_precision must be > 0, got " +
                std::to_string(s.prior_precision));
          if (!(s.noise_precision > 0.0))
            throw std::invalid_argument(
                "bayes_linreg.noise_precision must be > 0, got " +
                std::to_string(s.noise_precision));
        }
      },
      spec);
}

TargetModel make_target(const TargetSpec& spec) {
  validate(spec);
  return std::visit(
      [](const auto& s) -> TargetModel {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Banana2dSpec>)
          return make_banana(s);
        else if constexpr (std::is_same_v<T, IsotropicGaussianSpec>)
          return make_isotropic(s);
        else if constexpr (std::is_same_v<T, GaussMixtureSpec>)
          return make_mixture(s);
        else
          return make_bayes_linreg(s);
      },
      spec);
}

double potential(const TargetModel& target, const Eigen::VectorXd& theta) {
  check_dim(target, theta, "potential");
  return target.potential(theta);
}

Eigen::VectorXd grad_potential(const TargetModel& target,
                               const Eigen::VectorXd& theta) {
  check_dim(target, theta, "grad_potential");
  return target.grad(theta);
}

Eigen::MatrixXd sample_exact(const TargetModel& target, Eigen::Index n,
                             std::uint64_t seed) {
  if (!target.has_exact_sampler())
    throw std::invalid_argument("sample_exact: target '" + target.name +
                                "' has no exact sampler");
  if (n < 1)
    throw std::invalid_argument("sample_exact: n must be >= 1, got " +
                                std::to_string(n));
  return target.exact_sampler(n, seed);
}

TargetSpec banana2d() { return Banana2dSpec{}; }

TargetSpec isotropic_gaussian(Eigen::Index dim, double variance) {
  return IsotropicGaussianSpec{dim, variance};
}

TargetSpec symmetric_mixture(Eigen::Index dim, double mode_scale,
                             double variance) {
  GaussMixtureSpec spec;
  spec.means = {Eigen::VectorXd::Constant(dim, mode_scale),
                Eigen::VectorXd::Constant(dim, -mode_scale)};
  spec.weights = {0.5, 0.5};
  spec.variance = variance;
  return spec;
}

}  // namespace srld
