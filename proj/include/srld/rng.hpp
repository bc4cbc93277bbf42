// Deterministic seeded random streams used by all samplers and the harness.
//
// Stream splitting rule: every consumer derives its own engine seed as
// derive_seed(user_seed, tag [, index]) via splitmix64 mixing, so chains,
// initializations, exact samplers and metric subsampling never share or
// disturb each other's draws.  Normal variates come from an explicit
// Box-Muller transform on mt19937_64 output, which pins the exact sequence
// to this repository rather than to a particular libstdc++ version.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace srld {

namespace stream_tag {
inline constexpr std::uint64_t chain_noise = 0x6e6f6973'65303031ULL;
inline constexpr std::uint64_t chain_init = 0x696e6974'30783031ULL;
inline constexpr std::uint64_t exact_sampler = 0x65786163'74733031ULL;
inline constexpr std::uint64_t svgd_init = 0x73766764'30783031ULL;
inline constexpr std::uint64_t subsample = 0x73756273'616d7031ULL;
inline constexpr std::uint64_t sliced_projections = 0x736c6963'65777331ULL;
inline constexpr std::uint64_t pilot = 0x70696c6f'74303031ULL;
inline constexpr std::uint64_t reference = 0x72656665'72656e31ULL;
}  // namespace stream_tag

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(splitmix64(seed) ^ tag);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                                 std::uint64_t index) {
  return splitmix64(derive_seed(seed, tag) ^ splitmix64(index));
}

// Standard normal stream with a cached Box-Muller spare.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    // 53-bit mantissa draw in [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Eigen::VectorXd vector(Eigen::Index dim) {
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal();
    return v;
  }

  void fill(Eigen::Ref<Eigen::VectorXd> v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal();
  }

  // n x dim matrix of standard normals, rows are samples.
  Eigen::MatrixXd matrix(Eigen::Index n, Eigen::Index dim) {
    Eigen::MatrixXd m(n, dim);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = normal();
    return m;
  }

  // uniform integer in [0, bound) by rejection, bias-free
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// k distinct row indices from [0, n), ascending.  Partial Fisher-Yates on an
// index array, then sorted so downstream slices keep the original row order.
inline std::vector<Eigen::Index> subsample_indices(Eigen::Index n,
                                                   Eigen::Index k,
                                                   std::uint64_t seed) {
  if (k >= n) {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    return all;
  }
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  NormalStream rng(seed);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto j = i + static_cast<Eigen::Index>(
                           rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace srld
