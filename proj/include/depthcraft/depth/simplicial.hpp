#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "depthcraft/depth/halfspace.hpp"
#include "depthcraft/depth/mahalanobis.hpp"
#include "depthcraft/depth/spec.hpp"
#include "depthcraft/random.hpp"

namespace depthcraft {

/// Binomial coefficient as a double (exact below 2^53).
inline double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

/// Number of simplices with vertices in the sample that contain z, and the
/// total number of simplices.
struct SimplexCount {
  std::int64_t inside = 0;
  std::int64_t total = 0;
  double fraction() const { return total == 0 ? 0.0 : static_cast<double>(inside) / static_cast<double>(total); }
};

inline std::int64_t choose2(std::int64_t k) { return k * (k - 1) / 2; }
inline std::int64_t choose3(std::int64_t k) { return k * (k - 1) * (k - 2) / 6; }

/// d = 2: counts triangles not containing z by angular sweep, O(n log n).
inline SimplexCount simplicial_count_2d(const Vector& z, const Matrix& x) {
  Index at_z = 0;
  std::vector<detail::Vec2> v = detail::sorted_offsets(z, x, at_z);
  const std::int64_t n = x.rows();
  const std::int64_t m = static_cast<std::int64_t>(v.size());
  SimplexCount c;
  c.total = choose3(n);
  // Triples fitting in an open half-plane are the ones missing z. Each is
  // counted once, from its first vertex in (angle, sorted position) order.
  std::int64_t missing = 0;
  std::int64_t end = 1;
  for (std::int64_t i = 0; i < m; ++i) {
    if (end <= i) end = i + 1;
    auto ahead = [&](std::int64_t j) {
      const auto& a = v[static_cast<std::size_t>(i)];
      const auto& b = v[static_cast<std::size_t>(j % m)];
      return detail::cross(a, b) > 0.0 || (j < m && detail::same_direction(a, b));
    };
    while (end < i + m && ahead(end)) ++end;
    missing += choose2(end - i - 1);
  }
  c.inside = c.total - missing;
  return c;
}

namespace detail {

/// Visits every k-subset of [0, n) in lexicographic order; stops early if
/// the visitor returns false.
template <typename F>
void for_each_combination(Index n, Index k, F&& visit) {
  if (k > n || k <= 0) return;
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (;;) {
    if (!visit(idx)) return;
    Index p = k - 1;
    while (p >= 0 && idx[static_cast<std::size_t>(p)] == n - k + p) --p;
    if (p < 0) return;
    ++idx[static_cast<std::size_t>(p)];
    for (Index t = p + 1; t < k; ++t) idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
  }
}

/// 1 if z lies in the closed simplex, 0 if not, -1 if the simplex is flat.
inline int simplex_contains(const Vector& z, const Matrix& x, const std::vector<Index>& idx, double scale) {
  const Index d = x.cols();
  Matrix a(d + 1, d + 1);
  for (Index k = 0; k <= d; ++k) {
    a.block(0, k, d, 1) = x.row(idx[static_cast<std::size_t>(k)]).transpose();
    a(d, k) = 1.0;
  }
  Eigen::PartialPivLU<Matrix> lu(a);
  double det = lu.determinant();
  if (std::abs(det) < 1e-12 * std::pow(scale, static_cast<double>(d))) return -1;
  Vector rhs(d + 1);
  rhs.head(d) = z;
  rhs(d) = 1.0;
  Vector lambda = lu.solve(rhs);
  return lambda.minCoeff() >= -1e-12 ? 1 : 0;
}

inline SimplexCount simplicial_count_1d(const Vector& z, const Matrix& x) {
  std::int64_t l = 0;
  std::int64_t r = 0;
  std::int64_t e = 0;
  for (Index i = 0; i < x.rows(); ++i) {
    if (x(i, 0) < z(0)) {
      ++l;
    } else if (x(i, 0) > z(0)) {
      ++r;
    } else {
      ++e;
    }
  }
  return {l * r + e * (l + r) + choose2(e), choose2(static_cast<std::int64_t>(x.rows()))};
}

/// Full enumeration with the barycentric test; -1 inside if a flat simplex was met.
inline SimplexCount simplicial_count_enum(const Vector& z, const Matrix& x) {
  const Index d = x.cols();
  double scale = data_scale(x);
  SimplexCount c;
  bool flat = false;
  for_each_combination(x.rows(), d + 1, [&](const std::vector<Index>& idx) {
    int in = simplex_contains(z, x, idx, scale);
    if (in < 0) {
      flat = true;
      return false;
    }
    c.inside += in;
    ++c.total;
    return true;
  });
  if (flat) c.inside = -1;
  return c;
}

}  // namespace detail

struct SimplicialOptions {
  double cap = 1e7;
  std::uint64_t seed = 0;
};

/// Exact simplicial depth: fraction of the C(n, d+1) closed simplices that contain z.
inline SimplexCount simplicial_count_exact(const Vector& z, const DataMatrix& data, const SimplicialOptions& opt = {},
                                           DepthDiagnostics* diag = nullptr) {
  check_dim(z, data.cols());
  const Matrix& x = data.values();
  const Index n = x.rows();
  const Index d = x.cols();
  if (n < d + 1) throw ParameterError("simplicial depth needs at least d + 1 = " + std::to_string(d + 1) + " points");
  if (d == 1) return detail::simplicial_count_1d(z, x);
  if (d == 2) return simplicial_count_2d(z, x);
  double total = binomial(n, d + 1);
  if (total > opt.cap) {
    throw SizeError("exact simplicial depth would enumerate " + std::to_string(static_cast<long long>(total)) +
                    " simplices (limit " + std::to_string(static_cast<long long>(opt.cap)) +
                    "); use the approximate algorithm (--approx) instead");
  }
  SimplexCount c = detail::simplicial_count_enum(z, x);
  if (c.inside >= 0) return c;
  if (diag) diag->jittered = true;
  Rng rng(opt.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  double mag = 1e-9 * detail::data_scale(x);
  for (int attempt = 0; attempt < 5; ++attempt) {
    Matrix j = x;
    for (Index a = 0; a < n; ++a) {
      for (Index b = 0; b < d; ++b) j(a, b) += mag * noise(rng);
    }
    c = detail::simplicial_count_enum(z, j);
    if (c.inside >= 0) return c;
    mag *= 10.0;
  }
  throw DegenerateDataError("simplicial depth: could not resolve degenerate configuration");
}

inline double depth_simplicial_exact(const Vector& z, const DataMatrix& data, const SimplicialOptions& opt = {},
                                     DepthDiagnostics* diag = nullptr) {
  return simplicial_count_exact(z, data, opt, diag).fraction();
}

/// Number of random simplices to draw: k itself if k > 1, else ceil(k * total).
inline Index simplex_sample_size(double k, double total) {
  if (k > 1.0) return static_cast<Index>(std::llround(k));
  return std::max<Index>(1, static_cast<Index>(std::ceil(k * total)));
}

/// Approximate simplicial depth from random (d+1)-subsets; flat simplices count as misses.
inline double depth_simplicial_approx(const Vector& z, const DataMatrix& data, double k, Rng& rng) {
  check_dim(z, data.cols());
  const Matrix& x = data.values();
  const Index d = x.cols();
  if (x.rows() < d + 1) throw ParameterError("simplicial depth needs at least d + 1 = " + std::to_string(d + 1) + " points");
  Index draws = simplex_sample_size(k, binomial(x.rows(), d + 1));
  double scale = detail::data_scale(x);
  Index hits = 0;
  for (Index s = 0; s < draws; ++s) {
    std::vector<Index> idx = random_subset(x.rows(), d + 1, rng);
    if (detail::simplex_contains(z, x, idx, scale) == 1) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

namespace detail {

inline double simplex_volume(const Vector& z, const Matrix& x, const std::vector<Index>& idx, double fact) {
  const Index d = x.cols();
  Matrix e(d, d);
  for (Index k = 0; k < d; ++k) e.col(k) = x.row(idx[static_cast<std::size_t>(k)]).transpose() - z;
  return std::abs(e.determinant()) / fact;
}

inline double factorial(Index d) {
  double f = 1.0;
  for (Index i = 2; i <= d; ++i) f *= static_cast<double>(i);
  return f;
}

}  // namespace detail

/// Oja (simplicial volume) depth 1 / (1 + A), A = mean volume of conv(z, d sample
/// points) divided by sqrt(det Sigma).
inline double depth_simplicial_volume_exact(const Vector& z, const DataMatrix& data, const ScatterEstimate& est,
                                            double cap = 1e7) {
  check_dim(z, data.cols());
  const Matrix& x = data.values();
  const Index d = x.cols();
  if (x.rows() < d) throw ParameterError("simplicial volume depth needs at least d points");
  double total = binomial(x.rows(), d);
  if (total > cap) {
    throw SizeError("exact simplicial volume depth would enumerate " + std::to_string(static_cast<long long>(total)) +
                    " simplices (limit " + std::to_string(static_cast<long long>(cap)) +
                    "); use the approximate algorithm (--approx) instead");
  }
  const double fact = detail::factorial(d);
  double sum = 0.0;
  std::int64_t count = 0;
  detail::for_each_combination(x.rows(), d, [&](const std::vector<Index>& idx) {
    sum += detail::simplex_volume(z, x, idx, fact);
    ++count;
    return true;
  });
  double a = sum / static_cast<double>(count) / std::exp(0.5 * est.log_det);
  return 1.0 / (1.0 + a);
}

inline double depth_simplicial_volume_approx(const Vector& z, const DataMatrix& data, const ScatterEstimate& est,
                                             double k, Rng& rng) {
  check_dim(z, data.cols());
  const Matrix& x = data.values();
  const Index d = x.cols();
  if (x.rows() < d) throw ParameterError("simplicial volume depth needs at least d points");
  Index draws = simplex_sample_size(k, binomial(x.rows(), d));
  const double fact = detail::factorial(d);
  double sum = 0.0;
  for (Index s = 0; s < draws; ++s) sum += detail::simplex_volume(z, x, random_subset(x.rows(), d, rng), fact);
  double a = sum / static_cast<double>(draws) / std::exp(0.5 * est.log_det);
  return 1.0 / (1.0 + a);
}

}  // namespace depthcraft
