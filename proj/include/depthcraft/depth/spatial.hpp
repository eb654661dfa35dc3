#pragma once

#include <cmath>
#include <numbers>

#include "depthcraft/depth/mahalanobis.hpp"

namespace depthcraft {

/// Data mapped through Sigma^{-1/2}, shared by the global and local spatial depth.
struct SpatialStats {
  Matrix transform;  // Sigma^{-1/2}
  Matrix y;          // n x d, rows Sigma^{-1/2} x_i

  SpatialStats() = default;
  SpatialStats(const DataMatrix& data, const ScatterEstimate& est)
      : transform(est.sigma_inv_sqrt), y(data.values() * est.sigma_inv_sqrt) {}

  Index dim() const { return y.cols(); }

  /// Rows t_i = Sigma^{-1/2}(z - x_i) with their norms; tiny vectors count as zero.
  void directions(const Vector& z, Matrix& t, Vector& norms) const {
    Eigen::RowVectorXd tz = z.transpose() * transform;
    t = (-y).rowwise() + tz;
    norms = t.rowwise().norm();
    double scale = std::max(1.0, tz.norm());
    for (Index i = 0; i < t.rows(); ++i) {
      if (norms(i) <= 1e-13 * scale) norms(i) = 0.0;
    }
  }
};

/// 1 - || (1/n) sum v(Sigma^{-1/2}(z - x_i)) ||, with v(t) = t/|t| and v(0) = 0.
inline double depth_spatial(const Vector& z, const SpatialStats& stats) {
  check_dim(z, stats.dim());
  Matrix t;
  Vector norms;
  stats.directions(z, t, norms);
  Vector sum = Vector::Zero(stats.dim());
  for (Index i = 0; i < t.rows(); ++i) {
    if (norms(i) > 0.0) sum += t.row(i).transpose() / norms(i);
  }
  double depth = 1.0 - sum.norm() / static_cast<double>(t.rows());
  return std::clamp(depth, 0.0, 1.0);
}

inline double depth_spatial(const Vector& z, const DataMatrix& data, const ScatterEstimate& est) {
  check_dim(z, data.cols());
  return depth_spatial(z, SpatialStats(data, est));
}

/// Kernelized spatial depth with the Gaussian kernel of bandwidth h. For
/// h > 1 the value is multiplied by h^d. Not bounded by 1.
inline double depth_spatial_local(const Vector& z, const SpatialStats& stats, double h) {
  if (!(h > 0.0)) throw ParameterError("bandwidth: must be positive");
  check_dim(z, stats.dim());
  const Index d = stats.dim();
  Matrix t;
  Vector norms;
  stats.directions(z, t, norms);
  const double norm_const = std::pow(2.0 * std::numbers::pi, -0.5 * static_cast<double>(d)) *
                            std::pow(h, -static_cast<double>(d));
  double kernel_sum = 0.0;
  Vector weighted = Vector::Zero(d);
  for (Index i = 0; i < t.rows(); ++i) {
    double k = norm_const * std::exp(-0.5 * norms(i) * norms(i) / (h * h));
    kernel_sum += k;
    if (norms(i) > 0.0) weighted += (k / norms(i)) * t.row(i).transpose();
  }
  const double n = static_cast<double>(t.rows());
  double depth = std::abs(kernel_sum / n) - weighted.norm() / n;
  if (h > 1.0) depth *= std::pow(h, static_cast<double>(d));
  return std::max(depth, 0.0);
}

inline double depth_spatial_local(const Vector& z, const DataMatrix& data, const ScatterEstimate& est, double h) {
  check_dim(z, data.cols());
  return depth_spatial_local(z, SpatialStats(data, est), h);
}

}  // namespace depthcraft
