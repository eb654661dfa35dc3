#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "depthcraft/error.hpp"
#include "depthcraft/optim.hpp"
#include "depthcraft/separators/common.hpp"

namespace depthcraft {

/// Polynomial through the origin of the DD-plot. With `swapped` false the
/// score is poly(D1) - D2, otherwise D1 - poly(D2); positive means label +1.
struct PolynomialModel {
  int degree = 1;
  bool swapped = false;
  Vector coef;  // a_1..a_m
  double cv_error = 0.0;

  static double poly(const Vector& a, double t) {
    double v = 0.0;
    double p = t;
    for (Index k = 0; k < a.size(); ++k) {
      v += a(k) * p;
      p *= t;
    }
    return v;
  }

  double score(const Vector& dd) const {
    if (dd.size() != 2) throw UnsupportedError("polynomial separator works on two-class DD-plots only");
    return swapped ? dd(0) - poly(coef, dd(1)) : poly(coef, dd(0)) - dd(1);
  }
};

struct PolynomialOptions {
  int max_degree = 3;
  int starts = 10;
  int folds = 10;
  double smoothing = 0.1;  // fraction of the median depth gap
  int iterations = 300;
};

namespace detail {

inline double smoothing_scale(const Matrix& dd, double factor) {
  std::vector<double> gap(static_cast<std::size_t>(dd.rows()));
  for (Index i = 0; i < dd.rows(); ++i) gap[static_cast<std::size_t>(i)] = std::abs(dd(i, 0) - dd(i, 1));
  std::nth_element(gap.begin(), gap.begin() + static_cast<std::ptrdiff_t>(gap.size() / 2), gap.end());
  double s = factor * gap[gap.size() / 2];
  return s > 1e-12 ? s : 1e-3;
}

inline PolynomialModel fit_polynomial(const Matrix& dd, const std::vector<int>& y, int degree, bool swapped,
                                      const PolynomialOptions& opt, std::uint64_t seed) {
  const double s = smoothing_scale(dd, opt.smoothing);
  const int a = swapped ? 1 : 0;
  const int b = 1 - a;
  auto loss = [&](const Vector& coef) {
    double total = 0.0;
    for (Index i = 0; i < dd.rows(); ++i) {
      double v = PolynomialModel::poly(coef, dd(i, a)) - dd(i, b);
      double m = -y[static_cast<std::size_t>(i)] * v / s;
      total += m > 30.0 ? m : std::log1p(std::exp(m));
    }
    return total;
  };
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PolynomialModel best;
  best.degree = degree;
  best.swapped = swapped;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int st = 0; st < opt.starts; ++st) {
    Vector start = Vector::Zero(degree);
    if (st == 0) {
      start(0) = 1.0;  // the diagonal
    } else {
      for (Index k = 0; k < degree; ++k) start(k) = normal(rng) / static_cast<double>(k + 1);
    }
    NelderMeadResult res = nelder_mead(loss, start, 0.2, opt.iterations);
    if (res.value < best_loss) {
      best_loss = res.value;
      best.coef = res.x;
    }
  }
  return best;
}

inline Index polynomial_errors(const PolynomialModel& m, const Matrix& dd, const std::vector<int>& y) {
  Index e = 0;
  for (Index i = 0; i < dd.rows(); ++i) {
    int pred = m.score(dd.row(i).transpose()) > 0.0 ? 1 : -1;
    if (pred != y[static_cast<std::size_t>(i)]) ++e;
  }
  return e;
}

}  // namespace detail

/// Smoothed-risk polynomial separator on a two-column DD-plot, labels +-1.
/// Degree and orientation are chosen by stratified cross-validation.
inline PolynomialModel train_polynomial(const Matrix& dd, const std::vector<int>& y, const PolynomialOptions& opt,
                                        std::uint64_t seed) {
  if (dd.cols() != 2) throw UnsupportedError("polynomial separator supports exactly two classes");
  if (opt.max_degree < 1) throw ParameterError("max-degree: must be at least 1");
  const Index n = dd.rows();
  if (n < 2) throw TrainingError("polynomial separator needs at least 2 training points");
  int k = std::max(2, std::min<int>(opt.folds, static_cast<int>(n)));
  std::vector<int> fold = stratified_folds(y, k, seed);
  int best_deg = 1;
  bool best_swap = false;
  double best_err = 2.0;
  for (int deg = 1; deg <= opt.max_degree; ++deg) {
    for (int sw = 0; sw < 2; ++sw) {
      Index wrong = 0;
      for (int f = 0; f < k; ++f) {
        std::vector<Index> tr, te;
        for (Index i = 0; i < n; ++i) (fold[static_cast<std::size_t>(i)] == f ? te : tr).push_back(i);
        if (te.empty() || tr.empty()) continue;
        PolynomialModel m = detail::fit_polynomial(pick_rows(dd, tr), pick(y, tr), deg, sw == 1, opt,
                                                   split_seed(seed, static_cast<std::uint64_t>(f)));
        wrong += detail::polynomial_errors(m, pick_rows(dd, te), pick(y, te));
      }
      double err = static_cast<double>(wrong) / static_cast<double>(n);
      if (err < best_err) {
        best_err = err;
        best_deg = deg;
        best_swap = sw == 1;
      }
    }
  }
  PolynomialModel m = detail::fit_polynomial(dd, y, best_deg, best_swap, opt, seed);
  m.cv_error = best_err;
  return m;
}

inline void to_json(nlohmann::json& j, const PolynomialModel& m) {
  j = nlohmann::json{{"degree", m.degree},
                     {"swapped", m.swapped},
                     {"coefficients", std::vector<double>(m.coef.data(), m.coef.data() + m.coef.size())},
                     {"cv_error", m.cv_error}};
}

inline void from_json(const nlohmann::json& j, PolynomialModel& m) {
  m.degree = j.at("degree").get<int>();
  m.swapped = j.at("swapped").get<bool>();
  auto c = j.at("coefficients").get<std::vector<double>>();
  if (static_cast<int>(c.size()) != m.degree) throw SchemaError("polynomial model: coefficient count mismatch");
  m.coef = Eigen::Map<Vector>(c.data(), static_cast<Index>(c.size()));
  m.cv_error = j.at("cv_error").get<double>();
}

}  // namespace depthcraft
