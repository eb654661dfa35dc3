#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "depthcraft/depth/mahalanobis.hpp"
#include "depthcraft/depth/spec.hpp"
#include "depthcraft/random.hpp"

namespace depthcraft {

namespace detail {

struct Vec2 {
  double x;
  double y;
};

inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

/// Angular order starting at the positive x-axis, counter-clockwise.
inline bool angle_less(const Vec2& a, const Vec2& b) {
  auto half = [](const Vec2& v) { return (v.y < 0.0 || (v.y == 0.0 && v.x < 0.0)) ? 1 : 0; };
  int ha = half(a);
  int hb = half(b);
  if (ha != hb) return ha < hb;
  return cross(a, b) > 0.0;
}

inline bool same_direction(const Vec2& a, const Vec2& b) { return cross(a, b) == 0.0 && dot(a, b) > 0.0; }

/// Nonzero vectors x_i - z in angular order, plus the number equal to z.
inline std::vector<Vec2> sorted_offsets(const Vector& z, const Matrix& x, Index& at_z) {
  std::vector<Vec2> v;
  v.reserve(static_cast<std::size_t>(x.rows()));
  at_z = 0;
  for (Index i = 0; i < x.rows(); ++i) {
    Vec2 p{x(i, 0) - z(0), x(i, 1) - z(1)};
    if (p.x == 0.0 && p.y == 0.0) {
      ++at_z;
    } else {
      v.push_back(p);
    }
  }
  std::sort(v.begin(), v.end(), angle_less);
  return v;
}

/// Minimum number of points in a closed halfplane through z (angle sweep).
inline Index halfspace_count_2d(const Vector& z, const Matrix& x) {
  Index at_z = 0;
  std::vector<Vec2> v = sorted_offsets(z, x, at_z);
  const std::size_t m = v.size();
  if (m == 0) return at_z;
  // Group equal directions.
  std::vector<Vec2> rep;
  std::vector<Index> size;
  for (std::size_t i = 0; i < m; ++i) {
    if (!rep.empty() && same_direction(rep.back(), v[i])) {
      ++size.back();
    } else {
      rep.push_back(v[i]);
      size.push_back(1);
    }
  }
  if (rep.size() > 1 && same_direction(rep.front(), rep.back())) {
    size.front() += size.back();
    rep.pop_back();
    size.pop_back();
  }
  const std::size_t g = rep.size();
  // For group i count the points with angle in (theta_i, theta_i + pi].
  auto inside = [&](std::size_t i, std::size_t j) {
    double c = cross(rep[i], rep[j % g]);
    return c > 0.0 || (c == 0.0 && dot(rep[i], rep[j % g]) < 0.0);
  };
  Index best = static_cast<Index>(m);
  std::size_t end = 1;
  Index window = 0;
  for (std::size_t i = 0; i < g; ++i) {
    if (end <= i) {
      end = i + 1;
      window = 0;
    }
    while (end < i + g && inside(i, end)) {
      window += size[end % g];
      ++end;
    }
    best = std::min(best, window);
    if (end > i + 1) window -= size[(i + 1) % g];
  }
  return best + at_z;
}

/// Generalized cross product: the normal of the hyperplane spanned by the
/// d-1 rows of `rows`, via cofactor expansion.
inline Vector cofactor_normal(const Matrix& rows) {
  const Index d = rows.cols();
  Vector u(d);
  Matrix minor(d - 1, d - 1);
  for (Index k = 0; k < d; ++k) {
    for (Index c = 0, cc = 0; c < d; ++c) {
      if (c == k) continue;
      minor.col(cc++) = rows.col(c);
    }
    double det = d - 1 == 0 ? 1.0 : minor.determinant();
    u(k) = (k % 2 == 0 ? 1.0 : -1.0) * det;
  }
  return u;
}

/// Candidate-normal enumeration for d >= 3. Returns -1 if the offsets are not
/// in general position.
inline Index halfspace_count_enum(const Matrix& v) {
  const Index m = v.rows();
  const Index d = v.cols();
  if (m <= d - 1) return 0;
  Vector norms = v.rowwise().norm();
  Index best = m;
  std::vector<Index> idx(static_cast<std::size_t>(d - 1));
  for (Index k = 0; k < d - 1; ++k) idx[static_cast<std::size_t>(k)] = k;
  Matrix rows(d - 1, d);
  for (;;) {
    double norm_prod = 1.0;
    for (Index k = 0; k < d - 1; ++k) {
      rows.row(k) = v.row(idx[static_cast<std::size_t>(k)]);
      norm_prod *= norms(idx[static_cast<std::size_t>(k)]);
    }
    Vector u = cofactor_normal(rows);
    double un = u.norm();
    if (un <= 1e-12 * norm_prod) return -1;
    Vector s = v * u;
    Index pos = 0;
    Index neg = 0;
    std::size_t next = 0;
    for (Index j = 0; j < m; ++j) {
      if (next < idx.size() && idx[next] == j) {
        ++next;
        continue;
      }
      if (std::abs(s(j)) <= 1e-12 * un * norms(j)) return -1;
      if (s(j) > 0.0) {
        ++pos;
      } else {
        ++neg;
      }
    }
    best = std::min({best, pos, neg});
    if (best == 0) return 0;
    // Next (d-1)-combination in lexicographic order.
    Index k = d - 2;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == m - (d - 1) + k) --k;
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
    for (Index t = k + 1; t < d - 1; ++t) idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
  }
  return best;
}

inline double data_scale(const Matrix& x) { return std::max(1e-300, (x.rowwise() - x.colwise().mean()).cwiseAbs().maxCoeff()); }

}  // namespace detail

struct HalfspaceOptions {
  long cap = 60;
  std::uint64_t seed = 0;
};

/// Tukey depth: min over directions u of (1/n) #{i : x_i'u <= z'u}. Exact.
inline double depth_halfspace_exact(const Vector& z, const DataMatrix& data, const HalfspaceOptions& opt = {},
                                    DepthDiagnostics* diag = nullptr) {
  check_dim(z, data.cols());
  const Matrix& x = data.values();
  const Index n = x.rows();
  const Index d = x.cols();
  if (n == 0) return 0.0;
  if (d == 1) {
    Index le = 0;
    Index ge = 0;
    for (Index i = 0; i < n; ++i) {
      if (x(i, 0) <= z(0)) ++le;
      if (x(i, 0) >= z(0)) ++ge;
    }
    return static_cast<double>(std::min(le, ge)) / static_cast<double>(n);
  }
  if (d == 2) return static_cast<double>(detail::halfspace_count_2d(z, x)) / static_cast<double>(n);

  if (n > opt.cap) {
    throw SizeError("exact halfspace depth in dimension " + std::to_string(d) + " is limited to n <= " +
                    std::to_string(opt.cap) + " points (got " + std::to_string(n) +
                    "); use the approximate algorithm (--approx) instead");
  }
  Matrix v = x.rowwise() - z.transpose();
  Index at_z = 0;
  std::vector<Index> keep;
  for (Index i = 0; i < n; ++i) {
    if (v.row(i).cwiseAbs().maxCoeff() == 0.0) {
      ++at_z;
    } else {
      keep.push_back(i);
    }
  }
  Matrix w(static_cast<Index>(keep.size()), d);
  for (std::size_t i = 0; i < keep.size(); ++i) w.row(static_cast<Index>(i)) = v.row(keep[i]);
  Index count = detail::halfspace_count_enum(w);
  if (count < 0) {
    // Not in general position: perturb deterministically and retry.
    if (diag) diag->jittered = true;
    Rng rng(opt.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    double mag = 1e-9 * detail::data_scale(x);
    for (int attempt = 0; attempt < 5 && count < 0; ++attempt) {
      Matrix j = w;
      for (Index a = 0; a < j.rows(); ++a) {
        for (Index b = 0; b < d; ++b) j(a, b) += mag * noise(rng);
      }
      count = detail::halfspace_count_enum(j);
      mag *= 10.0;
    }
    if (count < 0) throw DegenerateDataError("halfspace depth: could not resolve degenerate configuration");
  }
  return static_cast<double>(count + at_z) / static_cast<double>(n);
}

/// Sorted projections of the sample on each direction, for the approximate
/// (random-direction) halfspace depth.
struct HalfspaceApproxStats {
  Matrix directions;                       // k x d
  std::vector<std::vector<double>> sorted; // per direction
  Index n = 0;

  HalfspaceApproxStats() = default;
  HalfspaceApproxStats(const DataMatrix& data, Matrix dirs) : directions(std::move(dirs)), n(data.rows()) {
    Matrix proj = data.values() * directions.transpose();
    sorted.resize(static_cast<std::size_t>(directions.rows()));
    for (Index j = 0; j < directions.rows(); ++j) {
      auto& s = sorted[static_cast<std::size_t>(j)];
      s.assign(proj.col(j).data(), proj.col(j).data() + proj.rows());
      std::sort(s.begin(), s.end());
    }
  }

  Index dim() const { return directions.cols(); }

  Index count(const Vector& z) const {
    check_dim(z, dim());
    Vector pz = directions * z;
    Index best = n;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
      const auto& s = sorted[j];
      double t = pz(static_cast<Index>(j));
      auto le = static_cast<Index>(std::upper_bound(s.begin(), s.end(), t) - s.begin());
      auto ge = static_cast<Index>(s.end() - std::lower_bound(s.begin(), s.end(), t));
      best = std::min({best, le, ge});
    }
    return best;
  }

  double depth(const Vector& z) const { return n == 0 ? 0.0 : static_cast<double>(count(z)) / static_cast<double>(n); }
};

/// Minimum univariate halfspace depth over k random directions. Never below
/// the exact depth.
inline double depth_halfspace_approx(const Vector& z, const DataMatrix& data, int k, Rng& rng) {
  check_dim(z, data.cols());
  if (k < 1) throw ParameterError("num-directions: must be at least 1");
  return HalfspaceApproxStats(data, uniform_directions(k, data.cols(), rng)).depth(z);
}

}  // namespace depthcraft
