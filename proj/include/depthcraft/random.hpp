#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace depthcraft {

/// The one generator used throughout the library. Default seed is 0.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Derives an independent stream seed from a base seed and a stream index.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Draws `count` directions uniformly on the unit sphere S^{d-1}, one per row.
/// Successive calls with the same generator state produce nested prefixes.
inline Eigen::MatrixXd uniform_directions(Eigen::Index count, Eigen::Index dim, Rng& rng) {
  Eigen::MatrixXd dirs(count, dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index k = 0; k < count; ++k) {
    double norm = 0.0;
    do {
      for (Eigen::Index j = 0; j < dim; ++j) dirs(k, j) = normal(rng);
      norm = dirs.row(k).norm();
    } while (norm < 1e-12);
    dirs.row(k) /= norm;
  }
  return dirs;
}

/// Draws `k` distinct indices from [0, n) in increasing order.
inline std::vector<Eigen::Index> random_subset(Eigen::Index n, Eigen::Index k, Rng& rng) {
  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(k));
  // Floyd's algorithm; k is tiny compared with n in every caller.
  for (Eigen::Index j = n - k; j < n; ++j) {
    std::uniform_int_distribution<Eigen::Index> pick(0, j);
    Eigen::Index t = pick(rng);
    if (std::find(out.begin(), out.end(), t) == out.end()) {
      out.push_back(t);
    } else {
      out.push_back(j);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Random permutation of [0, n).
inline std::vector<Eigen::Index> random_permutation(Eigen::Index n, Rng& rng) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

}  // namespace depthcraft
