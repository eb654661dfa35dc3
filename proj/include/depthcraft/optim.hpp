#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace depthcraft {

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
};

/// Nelder-Mead downhill simplex with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& start, double step, int max_iterations,
                                    double ftol = 1e-12) {
  const Eigen::Index k = start.size();
  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(k + 1), start);
  std::vector<double> val(static_cast<std::size_t>(k + 1));
  for (Eigen::Index i = 0; i < k; ++i) pts[static_cast<std::size_t>(i + 1)](i) += step;
  for (std::size_t i = 0; i < pts.size(); ++i) val[i] = f(pts[i]);

  std::vector<std::size_t> order(pts.size());
  NelderMeadResult res;
  int it = 0;
  for (; it < max_iterations; ++it) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    std::size_t best = order.front();
    std::size_t worst = order.back();
    std::size_t second = order[order.size() - 2];
    if (std::abs(val[worst] - val[best]) <= ftol * (std::abs(val[best]) + ftol)) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(k);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= static_cast<double>(k);

    Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
    double fr = f(reflected);
    if (fr < val[best]) {
      Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[worst]);
      double fe = f(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        val[worst] = fe;
      } else {
        pts[worst] = reflected;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      pts[worst] = reflected;
      val[worst] = fr;
      continue;
    }
    bool outside = fr < val[worst];
    Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
    double fc = f(contracted);
    if (fc < (outside ? fr : val[worst])) {
      pts[worst] = contracted;
      val[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      val[i] = f(pts[i]);
    }
  }
  std::size_t best = static_cast<std::size_t>(std::min_element(val.begin(), val.end()) - val.begin());
  res.x = pts[best];
  res.value = val[best];
  res.iterations = it;
  return res;
}

}  // namespace depthcraft
