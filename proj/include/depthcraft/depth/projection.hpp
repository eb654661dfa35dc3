#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "depthcraft/depth/mahalanobis.hpp"
#include "depthcraft/optim.hpp"
#include "depthcraft/random.hpp"

namespace depthcraft {

namespace detail {

inline double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  double hi = *mid;
  if (n % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

/// Median and MAD of a univariate sample (conventional even-n median, MAD unscaled).
inline std::pair<double, double> median_mad(std::vector<double> v) {
  double med = median_inplace(v);
  for (double& x : v) x = std::abs(x - med);
  return {med, median_inplace(v)};
}

/// Unit vector from d-1 spherical angles.
inline Vector from_angles(const Vector& a, Index d) {
  Vector u(d);
  double s = 1.0;
  for (Index k = 0; k + 1 < d; ++k) {
    u(k) = s * std::cos(a(k));
    s *= std::sin(a(k));
  }
  u(d - 1) = s;
  return u;
}

inline Vector to_angles(const Vector& u) {
  const Index d = u.size();
  Vector a(d - 1);
  for (Index k = 0; k + 1 < d; ++k) {
    double tail = u.tail(d - k).norm();
    a(k) = tail > 0.0 ? std::acos(std::clamp(u(k) / tail, -1.0, 1.0)) : 0.0;
  }
  if (d >= 2 && u(d - 1) < 0.0) a(d - 2) = 2.0 * std::numbers::pi - a(d - 2);
  return a;
}

}  // namespace detail

/// Per-direction median and MAD of the projected sample.
struct ProjectionStats {
  Matrix data;       // n x d, kept for refinement
  Matrix directions; // k x d
  Vector median;
  Vector mad;
  double scale = 1.0;
  bool refine = false;

  ProjectionStats() = default;
  ProjectionStats(const DataMatrix& x, Matrix dirs, bool refine_ = false)
      : data(x.values()), directions(std::move(dirs)), refine(refine_) {
    const Index k = directions.rows();
    median.resize(k);
    mad.resize(k);
    scale = std::max(1.0, data.cwiseAbs().maxCoeff());
    Matrix proj = data * directions.transpose();
    bool any = false;
    for (Index j = 0; j < k; ++j) {
      std::vector<double> col(proj.col(j).data(), proj.col(j).data() + proj.rows());
      auto [m, s] = detail::median_mad(std::move(col));
      median(j) = m;
      mad(j) = s;
      if (s > 1e-12 * scale) any = true;
    }
    if (!any) throw DegenerateDataError("projection depth: every projected sample has zero MAD");
  }

  Index dim() const { return data.cols(); }

  /// Outlyingness of z along an arbitrary direction; negative if degenerate.
  double outlyingness_along(const Vector& z, const Vector& u) const {
    std::vector<double> p(static_cast<std::size_t>(data.rows()));
    Vector proj = data * u;
    std::copy(proj.data(), proj.data() + proj.size(), p.begin());
    auto [m, s] = detail::median_mad(std::move(p));
    if (s <= 1e-12 * scale) return -1.0;
    return std::abs(z.dot(u) - m) / s;
  }

  double outlyingness(const Vector& z) const {
    check_dim(z, dim());
    Vector pz = directions * z;
    const Index k = directions.rows();
    std::vector<double> o(static_cast<std::size_t>(k), -1.0);
    double best = 0.0;
    for (Index j = 0; j < k; ++j) {
      if (mad(j) <= 1e-12 * scale) continue;
      o[static_cast<std::size_t>(j)] = std::abs(pz(j) - median(j)) / mad(j);
      best = std::max(best, o[static_cast<std::size_t>(j)]);
    }
    if (!refine || dim() < 2) return best;

    // Polish the five best directions with Nelder-Mead on spherical angles.
    std::vector<Index> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), Index{0});
    std::size_t keep = std::min<std::size_t>(5, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                      [&](Index a, Index b) { return o[static_cast<std::size_t>(a)] > o[static_cast<std::size_t>(b)]; });
    const Index d = dim();
    auto objective = [&](const Vector& a) {
      double v = outlyingness_along(z, detail::from_angles(a, d));
      return v < 0.0 ? 0.0 : -v;
    };
    for (std::size_t r = 0; r < keep; ++r) {
      Vector start = detail::to_angles(directions.row(order[r]).transpose());
      NelderMeadResult res = nelder_mead(objective, start, 0.1, 200);
      best = std::max(best, -res.value);
    }
    return best;
  }

  double depth(const Vector& z) const { return 1.0 / (1.0 + outlyingness(z)); }
};

/// Approximate projection depth over k random directions; an upper bound on
/// the true depth.
inline double depth_projection(const Vector& z, const DataMatrix& data, int k, bool refine, Rng& rng) {
  check_dim(z, data.cols());
  if (k < 1) throw ParameterError("num-directions: must be at least 1");
  return ProjectionStats(data, uniform_directions(k, data.cols(), rng), refine).depth(z);
}

}  // namespace depthcraft
