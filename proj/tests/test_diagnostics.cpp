#include "srld/diagnostics.hpp"
#include "srld/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace srld;

namespace {

Eigen::MatrixXd points1d(std::initializer_list<double> xs) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

// brute-force double loop over all pairs
double mmd2_bruteforce(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                       double sigma, MmdMode mode) {
  auto k = [sigma](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::exp(-(a - b).squaredNorm() / sigma);
  };
  const Eigen::Index m = x.rows(), n = y.rows();
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      if (mode == MmdMode::biased || i != j)
        xx += k(x.row(i).transpose(), x.row(j).transpose());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (mode == MmdMode::biased || i != j)
        yy += k(y.row(i).transpose(), y.row(j).transpose());
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      xy += k(x.row(i).transpose(), y.row(j).transpose());
  const double mm = static_cast<double>(m), nn = static_cast<double>(n);
  if (mode == MmdMode::biased)
    return xx / (mm * mm) + yy / (nn * nn) - 2.0 * xy / (mm * nn);
  return xx / (mm * (mm - 1.0)) + yy / (nn * (nn - 1.0)) - 2.0 * xy / (mm * nn);
}

// exact W1 by scanning every matching of equal-size point sets
double w1_bruteforce(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  const Eigen::Index n = x.rows();
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      cost += (x.row(i) - y.row(perm[static_cast<std::size_t>(i)])).norm();
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(n);
}

Eigen::MatrixXd random_points(NormalStream& rng, Eigen::Index n,
                              Eigen::Index d) {
  return rng.matrix(n, d);
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("biased mmd2 of identical sets is exactly zero") {
  NormalStream rng(41);
  const Eigen::MatrixXd x = random_points(rng, 17, 3);
  CHECK(mmd2(x, x, 1.3, MmdMode::biased) == 0.0);
}

TEST_CASE("mmd2 hand value on two singletons") {
  const double v = mmd2(points1d({0.0}), points1d({1.0}), 1.0);
  CHECK(v == doctest::Approx(2.0 - 2.0 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(v == doctest::Approx(1.264241).epsilon(1e-6));
}

TEST_CASE("mmd2 matches the brute-force double loop on small sets") {
  NormalStream rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    const auto m = static_cast<Eigen::Index>(2 + rng.below(5));
    const auto n = static_cast<Eigen::Index>(2 + rng.below(5));
    const Eigen::MatrixXd x = random_points(rng, m, 2);
    const Eigen::MatrixXd y = random_points(rng, n, 2);
    const double sigma = 0.5 + 2.0 * rng.uniform01();
    for (MmdMode mode : {MmdMode::biased, MmdMode::unbiased}) {
      CHECK(std::abs(mmd2(x, y, sigma, mode) -
                     mmd2_bruteforce(x, y, sigma, mode)) < 1e-12);
    }
  }
}

TEST_CASE("mmd2 symmetry and non-negativity of the biased estimator") {
  NormalStream rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd x = random_points(rng, 8, 2);
    const Eigen::MatrixXd y =
        (random_points(rng, 11, 2).array() + 0.5).matrix();
    const double b = mmd2(x, y, 1.0, MmdMode::biased);
    CHECK(b >= 0.0);
    CHECK(std::abs(b - mmd2(y, x, 1.0, MmdMode::biased)) < 1e-12);
  }
}

TEST_CASE("mmd2 input validation") {
  const Eigen::MatrixXd x = points1d({0.0, 1.0});
  CHECK_THROWS_AS(mmd2(x, x, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(mmd2(x, Eigen::MatrixXd::Zero(2, 2), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(mmd2(points1d({0.0}), x, 1.0, MmdMode::unbiased),
                  std::invalid_argument);
}

TEST_CASE("wasserstein1 identity and two point masses") {
  const Eigen::MatrixXd x = points1d({0.0});
  CHECK(wasserstein1(x, x) == 0.0);
  CHECK(wasserstein1(x, points1d({3.0})) == 3.0);
}

TEST_CASE("wasserstein1 1d handles unequal counts exactly") {
  // {0, 1} vs {0, 0, 1, 1} have equal CDFs except on [0,1) where they match:
  // actually both are uniform on {0,1}, so W1 = 0
  CHECK(wasserstein1(points1d({0.0, 1.0}), points1d({0.0, 0.0, 1.0, 1.0})) ==
        0.0);
  // {0} vs {0, 1}: F differs by 1/2 on [0, 1)
  CHECK(wasserstein1(points1d({0.0}), points1d({0.0, 1.0})) ==
        doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("assignment W1 matches the permutation brute force") {
  NormalStream rng(44);
  for (int trial = 0; trial < 15; ++trial) {
    const auto n = static_cast<Eigen::Index>(2 + rng.below(7));  // up to 8
    const Eigen::MatrixXd x = random_points(rng, n, 2);
    const Eigen::MatrixXd y = random_points(rng, n, 2);
    CHECK(std::abs(wasserstein1(x, y) - w1_bruteforce(x, y)) < 1e-10);
  }
}

TEST_CASE("wasserstein1 symmetry and triangle inequality (property)") {
  NormalStream rng(45);
  for (int trial = 0; trial < 10; ++trial) {
    const auto n = static_cast<Eigen::Index>(2 + rng.below(7));
    const Eigen::MatrixXd a = random_points(rng, n, 2);
    const Eigen::MatrixXd b = random_points(rng, n, 2);
    const Eigen::MatrixXd c = random_points(rng, n, 2);
    const double ab = wasserstein1(a, b);
    const double ba = wasserstein1(b, a);
    const double bc = wasserstein1(b, c);
    const double ac = wasserstein1(a, c);
    CHECK(std::abs(ab - ba) < 1e-10);
    CHECK(ac <= ab + bc + 1e-10);
  }
}

TEST_CASE("sliced W1 approximates the exact value in 2d") {
  NormalStream rng(46);
  const Eigen::MatrixXd x = random_points(rng, 64, 2);
  Eigen::MatrixXd y = random_points(rng, 64, 2);
  y.array() += 2.0;
  WassersteinOptions sliced;
  sliced.method = WassersteinOptions::Method::sliced;
  const double exact = wasserstein1(x, y);
  const double approx = wasserstein1(x, y, sliced);
  // sliced W1 is a lower-bound style approximation; same order of magnitude
  CHECK(approx > 0.3 * exact);
  CHECK(approx <= exact + 1e-9);
  // and exactly zero for identical sets
  CHECK(wasserstein1(x, x, sliced) == 0.0);
}

TEST_CASE("exact path rejects unequal counts with a pointer to sliced mode") {
  NormalStream rng(47);
  const Eigen::MatrixXd x = random_points(rng, 4, 2);
  const Eigen::MatrixXd y = random_points(rng, 5, 2);
  WassersteinOptions exact;
  exact.method = WassersteinOptions::Method::exact;
  CHECK_THROWS_WITH_AS(wasserstein1(x, y, exact), doctest::Contains("sliced"),
                       std::invalid_argument);
  // automatic mode falls back to sliced and succeeds
  CHECK(wasserstein1(x, y) >= 0.0);
}

TEST_CASE("autocorrelation basics") {
  NormalStream rng(48);
  Eigen::VectorXd iid(10000);
  for (Eigen::Index i = 0; i < iid.size(); ++i) iid[i] = rng.normal();
  const Eigen::VectorXd rho = autocorrelation(iid, 5);
  CHECK(rho[0] == 1.0);
  CHECK(std::abs(rho[1]) < 0.05);

  Eigen::VectorXd alternating(1000);
  for (Eigen::Index i = 0; i < alternating.size(); ++i)
    alternating[i] = (i % 2 == 0) ? 1.0 : -1.0;
  CHECK(autocorrelation(alternating, 1)[1] ==
        doctest::Approx(-1.0).epsilon(1e-2));

  CHECK_THROWS_AS(autocorrelation(Eigen::VectorXd::Ones(100), 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(autocorrelation(iid, 10000), std::invalid_argument);
}

TEST_CASE("autocorrelation is invariant under affine rescaling") {
  NormalStream rng(49);
  Eigen::VectorXd x(2000);
  double state = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    state = 0.7 * state + rng.normal();
    x[i] = state;
  }
  const Eigen::VectorXd base = autocorrelation(x, 20);
  for (int trial = 0; trial < 10; ++trial) {
    double a = 6.0 * rng.uniform01() - 3.0;
    if (std::abs(a) < 0.1) a = 0.5;
    const double b = 20.0 * rng.uniform01() - 10.0;
    const Eigen::VectorXd scaled =
        autocorrelation((a * x.array() + b).matrix(), 20);
    CHECK((scaled - base).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("ess of an iid series is close to n") {
  NormalStream rng(50);
  Eigen::VectorXd iid(10000);
  for (Eigen::Index i = 0; i < iid.size(); ++i) iid[i] = rng.normal();
  const double e = ess(iid);
  CHECK(e / 10000.0 > 0.8);
  CHECK(e / 10000.0 < 1.2);
}

TEST_CASE("ess truncation caps anticorrelated chains at n") {
  NormalStream rng(51);
  Eigen::VectorXd alternating(5000);
  for (Eigen::Index i = 0; i < alternating.size(); ++i)
    alternating[i] = ((i % 2 == 0) ? 1.0 : -1.0) + 1e-3 * rng.normal();
  const double e = ess(alternating);
  CHECK(e <= 5000.0 + 1e-9);
  CHECK(e > 0.9 * 5000.0);
}

TEST_CASE("ess within a factor 2 of the analytic AR(1) value") {
  NormalStream rng(52);
  const Eigen::Index n = 100000;
  Eigen::VectorXd x(n);
  double state = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    state = 0.9 * state + rng.normal();
    x[i] = state;
  }
  const double expected = (1.0 - 0.9) / (1.0 + 0.9);  // ESS / n
  const double measured = ess(x) / static_cast<double>(n);
  CHECK(measured > expected / 2.0);
  CHECK(measured < expected * 2.0);
}

TEST_CASE("ess is symmetric under time reversal") {
  NormalStream rng(53);
  Eigen::VectorXd x(5000);
  double state = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    state = 0.8 * state + rng.normal();
    x[i] = state;
  }
  CHECK(ess(x) == doctest::Approx(ess(x.reverse().eval())).epsilon(1e-12));
  CHECK_THROWS_AS(ess(Eigen::VectorXd::Zero(100)), std::invalid_argument);
}

TEST_CASE("moment trace on constant and exact-sample inputs") {
  std::vector<Eigen::VectorXd> zeros(50, Eigen::VectorXd::Zero(3));
  for (double v : moment_trace(zeros, 10)) CHECK(v == 0.0);

  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
  e1[0] = 1.0;
  std::vector<Eigen::VectorXd> ones(50, e1);
  for (double v : moment_trace(ones, 10)) CHECK(v == 1.0);

  // N(0, I_d): windowed mean of |x|^2 near d within 3 sqrt(2 d / window);
  // the sweep over overlapping windows gets a 4-sigma band (max over many
  // correlated windows), the full-series window gets the 3-sigma band.
  const Eigen::Index d = 4, window = 500;
  NormalStream rng(54);
  std::vector<Eigen::VectorXd> gauss;
  for (int i = 0; i < 3000; ++i) gauss.push_back(rng.vector(d));
  const auto mt = moment_trace(gauss, window);
  const double sigma_w = std::sqrt(2.0 * d / static_cast<double>(window));
  for (std::size_t k = window; k < mt.size(); ++k) {
    CHECK(mt[k] > d - 4.0 * sigma_w);
    CHECK(mt[k] < d + 4.0 * sigma_w);
  }
  const auto full = moment_trace(gauss, 3000);
  const double sigma_full = std::sqrt(2.0 * d / 3000.0);
  CHECK(std::abs(full.back() - d) < 3.0 * sigma_full);
}

TEST_CASE("summary statistics") {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(3, 2);
  const SummaryStats sz = summary_stats(z);
  CHECK(sz.mean.norm() == 0.0);
  CHECK(sz.covariance.norm() == 0.0);

  const SummaryStats s2 = summary_stats(points1d({0.0, 2.0}));
  CHECK(s2.mean[0] == 1.0);
  CHECK(s2.covariance(0, 0) == 2.0);  // unbiased

  NormalStream rng(55);
  const Eigen::MatrixXd x = rng.matrix(100000, 2);
  const SummaryStats s = summary_stats(x);
  CHECK(s.mean.cwiseAbs().maxCoeff() < 0.02);
  CHECK((s.covariance - Eigen::MatrixXd::Identity(2, 2)).norm() < 0.05);
}

TEST_CASE("median averages the two middle order statistics") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK_THROWS_AS(median(std::vector<double>{}), std::invalid_argument);
}

}  // TEST_SUITE
