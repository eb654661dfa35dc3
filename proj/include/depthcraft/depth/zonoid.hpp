#pragma once

#include <algorithm>
#include <cmath>

#include "depthcraft/depth/mahalanobis.hpp"
#include "depthcraft/lp.hpp"

namespace depthcraft {

namespace detail {

/// Solves  max sum mu_i  s.t.  sum mu_i (x_i - z) = 0,  0 <= mu_i <= 1.
/// With lambda_i = mu_i / t this is the zonoid program min t s.t.
/// sum lambda_i = 1, sum lambda_i x_i = z, 0 <= lambda_i <= t, and
/// the depth 1/(n t*) equals sum mu*_i / n.
inline double zonoid_lp(const Vector& z, const Matrix& x, int degenerate_switch) {
  const Index n = x.rows();
  const Index d = x.cols();
  Matrix a = (x.rowwise() - z.transpose()).transpose();  // d x n
  Vector row_scale = a.cwiseAbs().rowwise().maxCoeff();
  for (Index j = 0; j < d; ++j) {
    if (row_scale(j) > 0.0) a.row(j) /= row_scale(j);
  }
  LpOptions opt;
  opt.degenerate_switch = degenerate_switch;
  LpResult res = solve_lp(-Vector::Ones(n), a, Vector::Zero(d), Vector::Ones(n), opt);
  if (res.status != LpStatus::optimal) return -1.0;
  Vector mu = res.x.cwiseMax(0.0).cwiseMin(1.0);
  double residual = (a * mu).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-7 * std::max(1.0, mu.sum()))) return -1.0;
  return mu.sum();
}

}  // namespace detail

/// Zonoid depth: the largest alpha such that z lies in the zonoid
/// alpha-trimmed region. 0 outside the convex hull, 1 at the mean.
inline double depth_zonoid(const Vector& z, const DataMatrix& data) {
  check_dim(z, data.cols());
  const Matrix& x = data.values();
  const Index n = x.rows();
  if (n == 0) return 0.0;
  double total = detail::zonoid_lp(z, x, 50);
  if (total < 0.0) total = detail::zonoid_lp(z, x, 0);  // retry with Bland's rule throughout
  if (total < 0.0) throw SolverError("zonoid depth: linear program failed to converge");
  double depth = total / static_cast<double>(n);
  // Any point of the hull has depth at least 1/n.
  if (depth < 0.5 / static_cast<double>(n)) return 0.0;
  return std::min(depth, 1.0);
}

/// Membership of z in the convex hull of the sample (feasibility of
/// sum lambda = 1, X lambda = z, lambda >= 0).
inline bool in_convex_hull(const Vector& z, const DataMatrix& data) { return depth_zonoid(z, data) > 0.0; }

}  // namespace depthcraft
