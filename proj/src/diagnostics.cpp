#include "srld/diagnostics.hpp"

#include "srld/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace srld {

namespace {

// exp(-|x_i - y_j|^2 / sigma) for all pairs via the Gram trick
Eigen::MatrixXd kernel_block(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                             double sigma) {
  const Eigen::VectorXd sx = x.rowwise().squaredNorm();
  const Eigen::VectorXd sy = y.rowwise().squaredNorm();
  Eigen::MatrixXd d = (-2.0 * x * y.transpose()).eval();
  d.colwise() += sx;
  d.rowwise() += sy.transpose();
  d = d.cwiseMax(0.0);  // Gram round-off can dip below zero
  return (-d / sigma).array().exp();
}

void check_mmd_inputs(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                      double sigma) {
  if (x.cols() != y.cols())
    throw std::invalid_argument("mmd2: dimension mismatch (" +
                                std::to_string(x.cols()) + " vs " +
                                std::to_string(y.cols()) + ")");
  if (x.rows() < 1 || y.rows() < 1)
    throw std::invalid_argument("mmd2: empty sample set");
  if (!(sigma > 0.0))
    throw std::invalid_argument("mmd2: sigma must be > 0, got " +
                                std::to_string(sigma));
}

}  // namespace

double mmd2(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double sigma,
            MmdMode mode) {
  check_mmd_inputs(x, y, sigma);
  const double m = static_cast<double>(x.rows());
  const double n = static_cast<double>(y.rows());
  const Eigen::MatrixXd kxx = kernel_block(x, x, sigma);
  const Eigen::MatrixXd kyy = kernel_block(y, y, sigma);
  const Eigen::MatrixXd kxy = kernel_block(x, y, sigma);
  if (mode == MmdMode::biased) {
    const double v = kxx.mean() + kyy.mean() - 2.0 * kxy.mean();
    return std::max(0.0, v);
  }
  if (x.rows() < 2 || y.rows() < 2)
    throw std::invalid_argument(
        "mmd2: unbiased estimator needs at least 2 points per set");
  const double xx = (kxx.sum() - kxx.trace()) / (m * (m - 1.0));
  const double yy = (kyy.sum() - kyy.trace()) / (n * (n - 1.0));
  return xx + yy - 2.0 * kxy.mean();
}

double mmd_median_sigma(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.cols() != y.cols())
    throw std::invalid_argument("mmd_median_sigma: dimension mismatch");
  Eigen::MatrixXd pool(x.rows() + y.rows(), x.cols());
  pool << x, y;
  // cap the pool by even striding; the heuristic does not need every pair
  constexpr Eigen::Index kMaxPool = 1024;
  if (pool.rows() > kMaxPool) {
    Eigen::MatrixXd sub(kMaxPool, pool.cols());
    for (Eigen::Index i = 0; i < kMaxPool; ++i)
      sub.row(i) = pool.row(i * pool.rows() / kMaxPool);
    pool = std::move(sub);
  }
  std::vector<double> dists;
  const Eigen::Index n = pool.rows();
  dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      dists.push_back((pool.row(i) - pool.row(j)).norm());
  if (dists.empty()) return 1.0;
  const double med = median(std::move(dists));
  return med > 0.0 ? med * med : 1.0;
}

namespace {

double w1_sorted_equal(std::vector<double>& xs, std::vector<double>& ys) {
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    total += std::abs(xs[i] - ys[i]);
  return total / static_cast<double>(xs.size());
}

// integral |F_x - F_y| over the merged breakpoints; exact for any counts
double w1_1d(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() == ys.size()) return w1_sorted_equal(xs, ys);
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double mx = static_cast<double>(xs.size());
  const double my = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double fx = 0.0, fy = 0.0, total = 0.0;
  double prev = std::min(xs.front(), ys.front());
  while (i < xs.size() || j < ys.size()) {
    double t = std::numeric_limits<double>::infinity();
    if (i < xs.size()) t = std::min(t, xs[i]);
    if (j < ys.size()) t = std::min(t, ys[j]);
    total += std::abs(fx - fy) * (t - prev);
    prev = t;
    while (i < xs.size() && xs[i] == t) {
      fx += 1.0 / mx;
      ++i;
    }
    while (j < ys.size() && ys[j] == t) {
      fy += 1.0 / my;
      ++j;
    }
  }
  return total;
}

std::vector<double> column_of(const Eigen::MatrixXd& m, Eigen::Index c) {
  std::vector<double> v(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    v[static_cast<std::size_t>(i)] = m(i, c);
  return v;
}

// Kuhn-Munkres with potentials (shortest augmenting paths), O(n^3).
double min_assignment_cost(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost(p[j] - 1, j - 1);
  return total;
}

double w1_exact_assignment(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      cost(i, j) = (x.row(i) - y.row(j)).norm();
  return min_assignment_cost(cost) / static_cast<double>(n);
}

double w1_sliced(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                 const WassersteinOptions& opts) {
  NormalStream rng(
      derive_seed(opts.projection_seed, stream_tag::sliced_projections));
  const Eigen::Index d = x.cols();
  double total = 0.0;
  for (Eigen::Index l = 0; l < opts.projections; ++l) {
    Eigen::VectorXd dir = rng.vector(d);
    double norm = dir.norm();
    while (norm == 0.0) {
      dir = rng.vector(d);
      norm = dir.norm();
    }
    dir /= norm;
    const Eigen::VectorXd px = x * dir;
    const Eigen::VectorXd py = y * dir;
    std::vector<double> xs(px.data(), px.data() + px.size());
    std::vector<double> ys(py.data(), py.data() + py.size());
    total += w1_1d(std::move(xs), std::move(ys));
  }
  return total / static_cast<double>(opts.projections);
}

}  // namespace

double wasserstein1(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                    const WassersteinOptions& opts) {
  if (x.cols() != y.cols())
    throw std::invalid_argument("wasserstein1: dimension mismatch (" +
                                std::to_string(x.cols()) + " vs " +
                                std::to_string(y.cols()) + ")");
  if (x.rows() < 1 || y.rows() < 1)
    throw std::invalid_argument("wasserstein1: empty sample set");
  if (x.cols() == 1)
    return w1_1d(column_of(x, 0), column_of(y, 0));

  using Method = WassersteinOptions::Method;
  Method method = opts.method;
  if (method == Method::automatic)
    method = (x.rows() == y.rows() && x.rows() <= opts.exact_cutoff)
                 ? Method::exact
                 : Method::sliced;
  if (method == Method::exact) {
    if (x.rows() != y.rows())
      throw std::invalid_argument(
          "wasserstein1: the exact path needs equal sample counts (" +
          std::to_string(x.rows()) + " vs " + std::to_string(y.rows()) +
          "); use the sliced mode");
    return w1_exact_assignment(x, y);
  }
  return w1_sliced(x, y, opts);
}

Eigen::VectorXd autocorrelation(const Eigen::VectorXd& series,
                                Eigen::Index max_lag) {
  const Eigen::Index n = series.size();
  if (max_lag < 0) throw std::invalid_argument("autocorrelation: max_lag < 0");
  if (n <= max_lag)
    throw std::invalid_argument(
        "autocorrelation: series length " + std::to_string(n) +
        " must exceed max_lag " + std::to_string(max_lag));
  const Eigen::VectorXd centered =
      series.array() - series.mean();
  const double c0 = centered.squaredNorm() / static_cast<double>(n);
  if (c0 <= 0.0)
    throw std::invalid_argument("autocorrelation: constant series");
  Eigen::VectorXd rho(max_lag + 1);
  rho[0] = 1.0;
  for (Eigen::Index t = 1; t <= max_lag; ++t)
    rho[t] = centered.head(n - t).dot(centered.tail(n - t)) /
             static_cast<double>(n) / c0;
  return rho;
}

double ess(const Eigen::VectorXd& series) {
  const Eigen::Index n = series.size();
  if (n < 2) throw std::invalid_argument("ess: need at least 2 samples");
  const Eigen::VectorXd centered = series.array() - series.mean();
  const double c0 = centered.squaredNorm() / static_cast<double>(n);
  if (c0 <= 0.0) throw std::invalid_argument("ess: constant series");
  auto rho = [&](Eigen::Index t) {
    return centered.head(n - t).dot(centered.tail(n - t)) /
           static_cast<double>(n) / c0;
  };
  double sum = 0.0;
  for (Eigen::Index m = 1; 2 * m < n; ++m) {
    const double pair = rho(2 * m - 1) + rho(2 * m);
    if (pair <= 0.0) break;
    sum += pair;
  }
  return static_cast<double>(n) / (1.0 + 2.0 * sum);
}

std::vector<double> moment_trace(const std::vector<Eigen::VectorXd>& states,
                                 Eigen::Index window) {
  if (states.empty())
    throw std::invalid_argument("moment_trace: empty trace");
  if (window < 1) throw std::invalid_argument("moment_trace: window < 1");
  std::vector<double> sq(states.size());
  for (std::size_t k = 0; k < states.size(); ++k)
    sq[k] = states[k].squaredNorm();
  std::vector<double> out(states.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    acc += sq[k];
    if (k >= static_cast<std::size_t>(window))
      acc -= sq[k - static_cast<std::size_t>(window)];
    const auto len = std::min<std::size_t>(k + 1,
                                           static_cast<std::size_t>(window));
    out[k] = acc / static_cast<double>(len);
  }
  return out;
}

SummaryStats summary_stats(const Eigen::MatrixXd& samples) {
  const Eigen::Index n = samples.rows();
  if (n < 2)
    throw std::invalid_argument("summary_stats: need at least 2 samples");
  SummaryStats s;
  s.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - s.mean.transpose();
  s.covariance =
      centered.transpose() * centered / static_cast<double>(n - 1);
  return s;
}

double median(std::vector<double> values) {
  if (values.empty())
    throw std::invalid_argument("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace srld
