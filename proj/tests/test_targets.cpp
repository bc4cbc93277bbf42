#include "srld/targets.hpp"
#include "srld/diagnostics.hpp"
#include "srld/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace srld;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

// central-difference gradient with per-coordinate step
Eigen::VectorXd fd_grad(const TargetModel& t, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 6e-6 * (1.0 + std::abs(x[i]));
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (t.potential(xp) - t.potential(xm)) / (2.0 * h);
  }
  return g;
}

void check_grad_matches_fd(const TargetModel& t, std::uint64_t seed,
                           int probes = 100) {
  NormalStream rng(seed);
  for (int i = 0; i < probes; ++i) {
    Eigen::VectorXd x = rng.vector(t.dim);
    const double norm = x.norm();
    if (norm > 5.0) x *= 5.0 / norm;  // probe within |x| <= 5
    const Eigen::VectorXd g = t.grad(x);
    const Eigen::VectorXd fd = fd_grad(t, x);
    CHECK((g - fd).norm() / (1.0 + g.norm()) < 1e-5);
  }
}

BayesLinregSpec small_linreg() {
  BayesLinregSpec s;
  s.design.resize(6, 3);
  s.design << 1.0, 0.2, -0.5, 0.7, -1.1, 0.3, -0.2, 0.9, 1.4, 0.5, 0.5, -0.8,
      -1.3, 0.1, 0.6, 0.4, -0.7, -0.2;
  s.responses.resize(6);
  s.responses << 1.2, -0.3, 0.8, 0.1, -1.0, 0.5;
  s.prior_precision = 0.5;
  s.noise_precision = 2.0;
  return s;
}

}  // namespace

TEST_SUITE("targets") {

TEST_CASE("banana potential and gradient vanish at (0, -1.2)") {
  const TargetModel t = make_target(banana2d());
  CHECK(potential(t, vec2(0.0, -1.2)) == 0.0);
  CHECK(grad_potential(t, vec2(0.0, -1.2)).norm() == 0.0);
}

TEST_CASE("isotropic gaussian hand values") {
  const TargetModel t2 = make_target(isotropic_gaussian(2, 1.0));
  CHECK(potential(t2, Eigen::VectorXd::Zero(2)) == 0.0);

  const TargetModel t3 = make_target(isotropic_gaussian(3, 1.0));
  Eigen::VectorXd x(3);
  x << 1.0, 2.0, 3.0;
  CHECK((grad_potential(t3, x) - x).norm() == 0.0);

  const TargetModel t100 = make_target(isotropic_gaussian(100, 0.5));
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(100);
  e1[0] = 1.0;
  const Eigen::VectorXd g = grad_potential(t100, e1);
  CHECK(g[0] == 2.0);
  CHECK(g.tail(99).norm() == 0.0);
}

TEST_CASE("symmetric mixture gradient vanishes at the origin") {
  const TargetModel t = make_target(symmetric_mixture(2, 1.0, 1.0));
  CHECK(grad_potential(t, Eigen::VectorXd::Zero(2)).norm() == 0.0);
}

TEST_CASE("mixture potential matches a log-sum-exp oracle") {
  GaussMixtureSpec s;
  s.means = {Eigen::VectorXd::Constant(1, 1.0),
             Eigen::VectorXd::Constant(1, -1.0)};
  s.weights = {0.5, 0.5};
  s.variance = 1.0;
  const TargetModel t = make_target(s);
  // convention: V = -log sum w_i exp(-|x - mu_i|^2 / (2 var))
  const double oracle = -std::log(0.5 * std::exp(-0.5) + 0.5 * std::exp(-0.5));
  CHECK(potential(t, Eigen::VectorXd::Zero(1)) ==
        doctest::Approx(oracle).epsilon(1e-15));
  CHECK(potential(t, Eigen::VectorXd::Zero(1)) ==
        doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("gradients match finite differences on every target") {
  check_grad_matches_fd(make_target(banana2d()), 101);
  check_grad_matches_fd(make_target(isotropic_gaussian(3, 1.0)), 102);
  check_grad_matches_fd(make_target(isotropic_gaussian(100, 0.5)), 103, 20);
  check_grad_matches_fd(make_target(symmetric_mixture(2, 1.0, 1.0)), 104);
  check_grad_matches_fd(
      make_target(symmetric_mixture(20, std::sqrt(2.0 / 20.0), 1.0)), 105, 30);
  check_grad_matches_fd(make_target(small_linreg()), 106);
}

TEST_CASE("isotropic gaussians are dissipative") {
  // <x, -grad V> = -|x|^2 / var <= b1 - a1 |x|^2 with a1 = 1/var, b1 = 0
  for (double var : {0.5, 1.0, 2.0}) {
    const TargetModel t = make_target(isotropic_gaussian(4, var));
    NormalStream rng(107);
    for (int i = 0; i < 100; ++i) {
      const Eigen::VectorXd x = 3.0 * rng.vector(4);
      const double lhs = x.dot(-t.grad(x));
      CHECK(lhs == doctest::Approx(-x.squaredNorm() / var).epsilon(1e-12));
      CHECK(lhs <= -x.squaredNorm() / var + 1e-12);
    }
  }
}

TEST_CASE("exact samplers are deterministic in the seed") {
  const TargetModel t = make_target(isotropic_gaussian(2, 1.0));
  const Eigen::MatrixXd a = sample_exact(t, 64, 7);
  const Eigen::MatrixXd b = sample_exact(t, 64, 7);
  CHECK((a.array() == b.array()).all());
  const Eigen::MatrixXd c = sample_exact(t, 64, 8);
  CHECK(!(a.array() == c.array()).all());
}

TEST_CASE("exact sampler moments: standard gaussian") {
  const TargetModel t = make_target(isotropic_gaussian(2, 1.0));
  const Eigen::MatrixXd x = sample_exact(t, 100000, 1);
  const SummaryStats s = summary_stats(x);
  for (Eigen::Index c = 0; c < 2; ++c) CHECK(std::abs(s.mean[c]) < 0.02);
}

TEST_CASE("exact sampler moments: symmetric mixture has mean zero") {
  GaussMixtureSpec spec;
  spec.means = {Eigen::VectorXd::Constant(1, 1.0),
                Eigen::VectorXd::Constant(1, -1.0)};
  spec.weights = {0.5, 0.5};
  spec.variance = 1.0;
  const TargetModel t = make_target(spec);
  const Eigen::MatrixXd x = sample_exact(t, 100000, 2);
  CHECK(std::abs(x.col(0).mean()) < 0.02);
  // mixture covariance: var + mode^2 = 2
  const SummaryStats s = summary_stats(x);
  CHECK(s.covariance(0, 0) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("bayes_linreg posterior moments match the closed form") {
  const TargetModel t = make_target(TargetSpec(small_linreg()));
  REQUIRE(t.analytic_mean.has_value());
  REQUIRE(t.analytic_cov.has_value());
  const Eigen::MatrixXd x = sample_exact(t, 100000, 3);
  const SummaryStats s = summary_stats(x);
  CHECK((s.mean - *t.analytic_mean).norm() / (1.0 + t.analytic_mean->norm()) <
        0.02);
  CHECK((s.covariance - *t.analytic_cov).norm() / t.analytic_cov->norm() <
        0.02);
  // the posterior mode minimizes V: gradient vanishes at the analytic mean
  CHECK(grad_potential(t, *t.analytic_mean).norm() < 1e-10);
}

TEST_CASE("banana has no exact sampler") {
  const TargetModel t = make_target(banana2d());
  CHECK(!t.has_exact_sampler());
  CHECK(!t.analytic_mean.has_value());
  CHECK_THROWS_AS(sample_exact(t, 10, 0), std::invalid_argument);
}

TEST_CASE("spec validation names the offending field") {
  CHECK_THROWS_WITH_AS(make_target(isotropic_gaussian(2, -1.0)),
                       doctest::Contains("variance"), std::invalid_argument);

  GaussMixtureSpec bad_weights;
  bad_weights.means = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)};
  bad_weights.weights = {0.7, 0.7};
  CHECK_THROWS_WITH_AS(make_target(TargetSpec(bad_weights)),
                       doctest::Contains("weights"), std::invalid_argument);

  BayesLinregSpec bad_rows = small_linreg();
  bad_rows.responses = Eigen::VectorXd::Zero(4);
  CHECK_THROWS_WITH_AS(make_target(TargetSpec(bad_rows)),
                       doctest::Contains("design"), std::invalid_argument);
}

TEST_CASE("dimension mismatches are rejected") {
  const TargetModel t = make_target(isotropic_gaussian(2, 1.0));
  CHECK_THROWS_AS(potential(t, Eigen::VectorXd::Zero(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(grad_potential(t, Eigen::VectorXd::Zero(1)),
                  std::invalid_argument);
}

}  // TEST_SUITE
