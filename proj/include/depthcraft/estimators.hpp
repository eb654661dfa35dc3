#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include "depthcraft/datamodel.hpp"
#include "depthcraft/error.hpp"
#include "depthcraft/random.hpp"

namespace depthcraft {

enum class Estimator { moment, mcd, none };

inline std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::moment: return "moment";
    case Estimator::mcd: return "mcd";
    case Estimator::none: return "none";
  }
  return "moment";
}

inline Estimator estimator_from_string(const std::string& s) {
  if (s == "moment") return Estimator::moment;
  if (s == "mcd" || s == "MCD") return Estimator::mcd;
  if (s == "none") return Estimator::none;
  throw ParameterError("mah-estimate: unknown estimator '" + s + "' (expected moment, mcd or none)");
}

/// Location and scatter with the derived inverses every depth needs.
struct ScatterEstimate {
  Vector mu;
  Matrix sigma;
  Matrix sigma_inv;
  Matrix sigma_inv_sqrt;
  Estimator kind = Estimator::moment;
  double log_det = 0.0;

  Index dim() const { return mu.size(); }

  /// Squared Mahalanobis distance of z from mu.
  double mahalanobis2(const Vector& z) const {
    Vector diff = z - mu;
    return diff.dot(sigma_inv * diff);
  }
};

/// Symmetric inverse square root U diag(lambda^{-1/2}) U' of an SPD matrix.
inline Matrix inv_sqrt(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) throw ParameterError("inv_sqrt: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
  if (eig.info() != Eigen::Success) throw DegenerateDataError("inv_sqrt: eigendecomposition failed");
  const Vector& lambda = eig.eigenvalues();
  double top = lambda.maxCoeff();
  if (!(top > 0.0) || lambda.minCoeff() <= 1e-12 * top) {
    throw DegenerateDataError("inv_sqrt: matrix is singular or not positive definite");
  }
  const Matrix& u = eig.eigenvectors();
  return u * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * u.transpose();
}

namespace detail {

inline int numerical_rank(const Eigen::SelfAdjointEigenSolver<Matrix>& eig, double rel_tol) {
  double top = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  int rank = 0;
  for (Index i = 0; i < eig.eigenvalues().size(); ++i) {
    if (eig.eigenvalues()(i) > rel_tol * top) ++rank;
  }
  return rank;
}

inline Matrix covariance_of(const Matrix& x, const Vector& mu) {
  Matrix centered = x.rowwise() - mu.transpose();
  return (centered.transpose() * centered) / static_cast<double>(x.rows() - 1);
}

}  // namespace detail

/// Builds a ScatterEstimate from mu and sigma. Rejects covariances whose
/// condition number exceeds 1e12.
inline ScatterEstimate make_scatter(Vector mu, Matrix sigma, Estimator kind) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
  if (eig.info() != Eigen::Success) throw DegenerateDataError("scatter: eigendecomposition failed");
  const Vector& lambda = eig.eigenvalues();
  double top = lambda.maxCoeff();
  if (!(top > 0.0) || lambda.minCoeff() <= top * 1e-12) {
    throw DegenerateDataError("degenerate data: covariance matrix has numerical rank " +
                              std::to_string(detail::numerical_rank(eig, 1e-12)) + " of " +
                              std::to_string(sigma.rows()));
  }
  ScatterEstimate est;
  const Matrix& u = eig.eigenvectors();
  est.mu = std::move(mu);
  est.sigma = sigma;
  est.sigma_inv = u * lambda.cwiseInverse().asDiagonal() * u.transpose();
  est.sigma_inv_sqrt = u * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * u.transpose();
  est.kind = kind;
  est.log_det = lambda.array().log().sum();
  return est;
}

/// Column means and the unbiased (n - 1) covariance.
inline ScatterEstimate moment_estimate(const DataMatrix& data) {
  if (data.rows() < 2) throw ParameterError("moment estimate needs at least 2 observations");
  Vector mu = data.column_means();
  Matrix sigma = detail::covariance_of(data.values(), mu);
  return make_scatter(std::move(mu), std::move(sigma), Estimator::moment);
}

/// Identity scatter centred at the column means (estimator "none").
inline ScatterEstimate identity_estimate(const DataMatrix& data) {
  ScatterEstimate est;
  est.mu = data.rows() > 0 ? data.column_means() : Vector::Zero(data.cols());
  est.sigma = Matrix::Identity(data.cols(), data.cols());
  est.sigma_inv = est.sigma;
  est.sigma_inv_sqrt = est.sigma;
  est.kind = Estimator::none;
  est.log_det = 0.0;
  return est;
}

/// Median of the chi-square distribution with `dof` degrees of freedom, by
/// bisection on the regularized lower incomplete gamma function.
inline double chi2_median(int dof) {
  double a = 0.5 * dof;
  double lo = 0.0;
  double hi = std::max(1.0, 2.0 * dof);
  while (boost::math::gamma_p(a, 0.5 * hi) < 0.5) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (boost::math::gamma_p(a, 0.5 * mid) < 0.5) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Outcome of the MCD search, with the raw (unscaled) subset statistics.
struct McdResult {
  ScatterEstimate estimate;
  std::vector<Index> subset;  // sorted row indices of the h-subset
  double raw_log_det = 0.0;   // log det of the subset covariance before scaling
};

namespace detail {

struct SubsetFit {
  Vector mu;
  Matrix sigma;
  double log_det = std::numeric_limits<double>::infinity();
  bool ok = false;
};

inline SubsetFit fit_subset(const Matrix& x, const std::vector<Index>& subset) {
  SubsetFit fit;
  const Index d = x.cols();
  const Index h = static_cast<Index>(subset.size());
  Matrix sub(h, d);
  for (Index k = 0; k < h; ++k) sub.row(k) = x.row(subset[static_cast<std::size_t>(k)]);
  fit.mu = sub.colwise().mean().transpose();
  fit.sigma = covariance_of(sub, fit.mu);
  Eigen::LDLT<Matrix> ldlt(fit.sigma);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return fit;
  Vector diag = ldlt.vectorD();
  double scale = std::max(fit.sigma.diagonal().maxCoeff(), std::numeric_limits<double>::min());
  if (diag.minCoeff() <= 1e-12 * scale) return fit;
  fit.log_det = diag.array().log().sum();
  fit.ok = true;
  return fit;
}

inline std::vector<Index> smallest_distances(const Matrix& x, const SubsetFit& fit, Index h) {
  Eigen::LDLT<Matrix> ldlt(fit.sigma);
  Matrix centered = (x.rowwise() - fit.mu.transpose()).transpose();
  Matrix solved = ldlt.solve(centered);
  Vector d2 = (centered.array() * solved.array()).colwise().sum().transpose();
  std::vector<Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return d2(a) < d2(b); });
  order.resize(static_cast<std::size_t>(h));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace detail

/// One concentration step: estimate on `subset`, keep the h points with the
/// smallest Mahalanobis distances. The covariance determinant never increases.
inline std::vector<Index> c_step(const DataMatrix& data, const std::vector<Index>& subset, Index h) {
  detail::SubsetFit fit = detail::fit_subset(data.values(), subset);
  if (!fit.ok) throw DegenerateDataError("c-step: subset covariance is singular");
  return detail::smallest_distances(data.values(), fit, h);
}

/// Log determinant of the covariance of the given rows (+inf when singular).
inline double subset_log_det(const DataMatrix& data, const std::vector<Index>& subset) {
  return detail::fit_subset(data.values(), subset).log_det;
}

/// Simplified FAST-MCD: 500 elemental starts, C-steps to convergence, the
/// subset of smallest covariance determinant wins. Sigma is scaled for
/// consistency at the normal model unless the subset is the whole sample.
inline McdResult mcd(const DataMatrix& data, double fraction, Rng& rng, int starts = 500) {
  if (!(fraction > 0.5 && fraction <= 1.0)) throw ParameterError("mcd: fraction must lie in (0.5, 1]");
  const Index n = data.rows();
  const Index d = data.cols();
  const Index h = static_cast<Index>(std::ceil(fraction * static_cast<double>(n) - 1e-12));
  if (h < d + 1) {
    throw ParameterError("mcd: subset size h = " + std::to_string(h) + " must be at least d + 1 = " +
                         std::to_string(d + 1));
  }
  McdResult result;
  if (h == n) {
    result.estimate = moment_estimate(data);
    result.estimate.kind = Estimator::mcd;
    result.subset.resize(static_cast<std::size_t>(n));
    std::iota(result.subset.begin(), result.subset.end(), Index{0});
    result.raw_log_det = result.estimate.log_det;
    return result;
  }

  const Matrix& x = data.values();
  double best = std::numeric_limits<double>::infinity();
  std::vector<Index> best_subset;
  for (int s = 0; s < starts; ++s) {
    // Elemental start, enlarged until its covariance is nonsingular.
    std::vector<Index> perm = random_permutation(n, rng);
    Index take = d + 1;
    std::vector<Index> start(perm.begin(), perm.begin() + take);
    detail::SubsetFit fit = detail::fit_subset(x, start);
    while (!fit.ok && take < h) {
      start.push_back(perm[static_cast<std::size_t>(take++)]);
      fit = detail::fit_subset(x, start);
    }
    if (!fit.ok) continue;
    std::vector<Index> subset = detail::smallest_distances(x, fit, h);
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 100; ++it) {
      fit = detail::fit_subset(x, subset);
      if (!fit.ok) break;
      if (std::isfinite(prev) && std::abs(std::exp(prev) - std::exp(fit.log_det)) < 1e-12 * std::max(1.0, std::exp(prev))) {
        break;
      }
      prev = fit.log_det;
      std::vector<Index> next = detail::smallest_distances(x, fit, h);
      if (next == subset) break;
      subset = std::move(next);
    }
    if (fit.ok && fit.log_det < best) {
      best = fit.log_det;
      best_subset = subset;
    }
  }
  if (best_subset.empty()) throw DegenerateDataError("mcd: every h-subset has a singular covariance");

  detail::SubsetFit fit = detail::fit_subset(x, best_subset);
  Eigen::LDLT<Matrix> ldlt(fit.sigma);
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Vector diff = x.row(i).transpose() - fit.mu;
    d2[static_cast<std::size_t>(i)] = diff.dot(ldlt.solve(diff));
  }
  auto mid = d2.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(d2.begin(), mid, d2.end());
  double factor = *mid / chi2_median(static_cast<int>(d));
  if (!(factor > 0.0)) factor = 1.0;

  result.estimate = make_scatter(fit.mu, fit.sigma * factor, Estimator::mcd);
  result.subset = std::move(best_subset);
  result.raw_log_det = fit.log_det;
  return result;
}

inline ScatterEstimate mcd_estimate(const DataMatrix& data, double fraction, Rng& rng) {
  return mcd(data, fraction, rng).estimate;
}

/// Dispatches on the estimator kind; MCD is seeded from `seed`.
inline ScatterEstimate estimate_scatter(const DataMatrix& data, Estimator kind, double mcd_fraction,
                                        std::uint64_t seed) {
  switch (kind) {
    case Estimator::moment: return moment_estimate(data);
    case Estimator::none: return identity_estimate(data);
    case Estimator::mcd: {
      Rng rng(seed);
      return mcd_estimate(data, mcd_fraction, rng);
    }
  }
  return moment_estimate(data);
}

}  // namespace depthcraft
