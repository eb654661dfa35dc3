#pragma once

#include "depthcraft/datamodel.hpp"
#include "depthcraft/error.hpp"
#include "depthcraft/estimators.hpp"

namespace depthcraft {

inline void check_dim(const Vector& z, Index d) {
  if (z.size() != d) {
    throw ParameterError("dimension mismatch: point has " + std::to_string(z.size()) + " coordinates, data has " +
                         std::to_string(d));
  }
}

/// 1 / (1 + (z - mu)' Sigma^{-1} (z - mu)).
inline double depth_mahalanobis(const Vector& z, const ScatterEstimate& est) {
  check_dim(z, est.dim());
  return 1.0 / (1.0 + est.mahalanobis2(z));
}

inline double depth_mahalanobis(const Vector& z, const DataMatrix& data, const ScatterEstimate& est) {
  check_dim(z, data.cols());
  return depth_mahalanobis(z, est);
}

}  // namespace depthcraft
