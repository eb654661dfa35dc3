#pragma once

#include <cmath>
#include <numbers>

#include "depthcraft/depth/mahalanobis.hpp"

namespace depthcraft {

/// Gaussian kernel density of one class with bandwidth matrix H = h^2 Sigma,
/// scaled by the class prior.
struct PotentialStats {
  Matrix x;            // class points (already pretransformed if applicable)
  Matrix h_inv;        // H^{-1}
  double peak = 0.0;   // (2 pi)^{-d/2} det(H)^{-1/2}
  double weight = 0.0; // prior / n_j

  PotentialStats() = default;
  PotentialStats(const DataMatrix& cls, double prior, double h, const Matrix& sigma) : x(cls.values()) {
    if (!(h > 0.0)) throw ParameterError("bandwidth: must be positive");
    const Index d = x.cols();
    Matrix bw = h * h * sigma;
    Eigen::LDLT<Matrix> ldlt(bw);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 0.0) {
      throw DegenerateDataError("potential: bandwidth matrix is singular");
    }
    h_inv = ldlt.solve(Matrix::Identity(d, d));
    double log_det = ldlt.vectorD().array().log().sum();
    peak = std::pow(2.0 * std::numbers::pi, -0.5 * static_cast<double>(d)) * std::exp(-0.5 * log_det);
    weight = prior / static_cast<double>(x.rows());
  }

  double operator()(const Vector& z) const {
    check_dim(z, x.cols());
    double sum = 0.0;
    for (Index i = 0; i < x.rows(); ++i) {
      Vector diff = z - x.row(i).transpose();
      sum += std::exp(-0.5 * diff.dot(h_inv * diff));
    }
    return weight * peak * sum;
  }
};

/// prior * (1/n_j) sum K_H(z - x_ji) with H = h^2 sigma.
inline double potential(const Vector& z, const DataMatrix& cls, double prior, double h, const Matrix& sigma) {
  return PotentialStats(cls, prior, h, sigma)(z);
}

/// As above with sigma the moment covariance of the class.
inline double potential(const Vector& z, const DataMatrix& cls, double prior, double h) {
  return potential(z, cls, prior, h, moment_estimate(cls).sigma);
}

}  // namespace depthcraft
