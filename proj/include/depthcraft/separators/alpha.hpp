#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

#include <nlohmann/json.hpp>

#include "depthcraft/error.hpp"
#include "depthcraft/separators/common.hpp"
#include "depthcraft/separators/extend.hpp"

namespace depthcraft {

struct MinError {
  Index error = 0;     // misclassified points at the best split
  double angle = 0.0;  // rotation to apply: f' = f cos(angle) + x sin(angle)
};

/// Best line through the origin of the (f, x) plane separating labels +-1.
/// Each point is reduced to its line angle arctan(x/f) in (-pi/2, pi/2]; its
/// label is negated when it lies on the far ray (f < 0, or f = 0 and x < 0).
/// Points at the origin get label 0. The split maximising |prefix sum| +
/// |suffix sum| of labels is optimal; the returned angle puts the line midway
/// between the two angles adjacent to it, turned by -pi/2 into a normal.
inline MinError get_min_error(const Vector& f, const Vector& x, const std::vector<int>& y) {
  const Index n = f.size();
  if (x.size() != n || static_cast<Index>(y.size()) != n) throw ParameterError("get_min_error: length mismatch");
  struct Item {
    double angle;
    int label;
  };
  std::vector<Item> a(static_cast<std::size_t>(n));
  Index nonzero = 0;
  for (Index i = 0; i < n; ++i) {
    int label = y[static_cast<std::size_t>(i)];
    double angle;
    if (f(i) == 0.0 && x(i) == 0.0) {
      angle = 0.0;
      label = 0;
    } else if (f(i) == 0.0) {
      angle = std::numbers::pi / 2;
      if (x(i) < 0.0) label = -label;
    } else {
      angle = std::atan(x(i) / f(i));
      if (f(i) < 0.0) label = -label;
    }
    if (label != 0) ++nonzero;
    a[static_cast<std::size_t>(i)] = {angle, label};
  }
  std::stable_sort(a.begin(), a.end(), [](const Item& p, const Item& q) { return p.angle < q.angle; });

  long total = 0;
  for (const auto& it : a) total += it.label;
  long best = std::labs(total);
  std::size_t best_split = 0;
  long prefix = 0;
  for (std::size_t i = 1; i < a.size(); ++i) {
    prefix += a[i - 1].label;
    if (!(a[i - 1].angle < a[i].angle)) continue;  // cannot split equal angles
    long v = std::labs(prefix) + std::labs(total - prefix);
    if (v > best) {
      best = v;
      best_split = i;
    }
  }
  MinError out;
  out.error = (nonzero - best) / 2;
  double mid;
  if (a.empty()) {
    mid = 0.0;
  } else if (best_split == 0) {
    mid = 0.5 * (a.front().angle + a.back().angle - std::numbers::pi);
  } else {
    mid = 0.5 * (a[best_split - 1].angle + a[best_split].angle);
  }
  out.angle = mid - std::numbers::pi / 2;
  return out;
}

/// Trained alpha-procedure: a hyperplane through the origin of the extended
/// depth space. Positive score means the first class of the pair.
struct AlphaModel {
  int degree = 1;
  int dims = 2;                              // q, columns of the depth space
  std::vector<std::vector<int>> exponents;   // monomial per extended column
  Vector normal;
  std::vector<std::pair<Index, double>> features;  // (property, angle) in order of selection
  std::vector<Index> risk_trace;             // empirical risk after each step

  double score(const Vector& depth_row) const {
    if (depth_row.size() != dims) throw ParameterError("alpha separator: depth row has wrong dimension");
    return normal.dot(extend_row(depth_row, exponents));
  }

  double score_extended(const Vector& ext) const {
    if (ext.size() != normal.size()) throw ParameterError("alpha separator: extended point has wrong dimension");
    return normal.dot(ext);
  }

  std::vector<std::string> feature_names() const {
    std::vector<std::string> out;
    for (const auto& [p, a] : features) out.push_back(monomial_name(exponents[static_cast<std::size_t>(p)]));
    return out;
  }
};

namespace detail {

inline bool same_support(const std::vector<int>& a, const std::vector<int>& b) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if ((a[k] > 0) != (b[k] > 0)) return false;
  }
  return true;
}

}  // namespace detail

/// The alpha-procedure on an extended depth space; labels are +1 / -1.
inline AlphaModel train_alpha(const ExtendedDepthSpace& ext, const std::vector<int>& y) {
  const Matrix& z = ext.features;
  const Index n = z.rows();
  const Index r = z.cols();
  if (n < 2) throw TrainingError("alpha separator needs at least 2 training points");
  if (static_cast<Index>(y.size()) != n) throw ParameterError("alpha separator: label count mismatch");
  if (r < 2) throw TrainingError("alpha separator needs at least 2 properties");

  AlphaModel m;
  m.degree = ext.degree;
  m.dims = ext.exponents.empty() ? 0 : static_cast<int>(ext.exponents.front().size());
  m.exponents = ext.exponents;

  // Step 1: best pair of properties.
  Index bk = -1;
  Index bl = -1;
  MinError best;
  int best_deg = 0;
  for (Index k = 0; k < r; ++k) {
    for (Index l = k + 1; l < r; ++l) {
      if (detail::same_support(ext.exponents[static_cast<std::size_t>(k)], ext.exponents[static_cast<std::size_t>(l)])) {
        continue;
      }
      MinError e = get_min_error(z.col(k), z.col(l), y);
      int deg = ext.total_degree(k) + ext.total_degree(l);
      if (bk < 0 || e.error < best.error || (e.error == best.error && deg < best_deg)) {
        best = e;
        bk = k;
        bl = l;
        best_deg = deg;
      }
    }
  }
  if (bk < 0) throw TrainingError("alpha separator: no informative pair of properties");
  m.features = {{bk, 0.0}, {bl, best.angle}};
  m.risk_trace = {best.error};
  Vector f = z.col(bk) * std::cos(best.angle) + z.col(bl) * std::sin(best.angle);
  std::vector<bool> used(static_cast<std::size_t>(r), false);
  used[static_cast<std::size_t>(bk)] = used[static_cast<std::size_t>(bl)] = true;
  Index err = best.error;

  // Following steps: add properties while the risk strictly decreases.
  for (;;) {
    if (err == 0) break;
    Index bp = -1;
    MinError cand;
    for (Index p = 0; p < r; ++p) {
      if (used[static_cast<std::size_t>(p)]) continue;
      MinError e = get_min_error(f, z.col(p), y);
      if (bp < 0 || e.error < cand.error ||
          (e.error == cand.error && ext.total_degree(p) < ext.total_degree(bp))) {
        cand = e;
        bp = p;
      }
    }
    if (bp < 0 || cand.error >= err) break;
    err = cand.error;
    used[static_cast<std::size_t>(bp)] = true;
    m.features.emplace_back(bp, cand.angle);
    m.risk_trace.push_back(err);
    f = f * std::cos(cand.angle) + z.col(bp) * std::sin(cand.angle);
  }

  // Normal vector by the cascading cosine/sine product.
  m.normal = Vector::Zero(r);
  double a = 1.0;
  for (std::size_t i = m.features.size() - 1; i >= 1; --i) {
    m.normal(m.features[i].first) = a * std::sin(m.features[i].second);
    a *= std::cos(m.features[i].second);
  }
  m.normal(m.features.front().first) = a;

  // Orientation: positive side should hold label +1.
  Vector proj = z * m.normal;
  Index ml_minus = 0, ml_plus = 0, m_minus = 0, m_plus = 0;
  for (Index i = 0; i < n; ++i) {
    bool left = proj(i) <= 0.0;
    if (y[static_cast<std::size_t>(i)] > 0) {
      ++m_plus;
      if (left) ++ml_plus;
    } else {
      ++m_minus;
      if (left) ++ml_minus;
    }
  }
  Index e_minus = ml_plus + m_minus - ml_minus;
  Index e_plus = ml_minus + m_plus - ml_plus;
  if (e_minus > e_plus) m.normal = -m.normal;
  return m;
}

inline AlphaModel train_alpha(const Matrix& depths, const std::vector<int>& y, int degree) {
  return train_alpha(extend(depths, degree), y);
}

/// Misclassified count of an alpha model on depth rows with labels +-1.
inline Index alpha_errors(const AlphaModel& m, const Matrix& depths, const std::vector<int>& y) {
  Index e = 0;
  for (Index i = 0; i < depths.rows(); ++i) {
    int pred = m.score(depths.row(i).transpose()) > 0.0 ? 1 : -1;
    if (pred != y[static_cast<std::size_t>(i)]) ++e;
  }
  return e;
}

/// Chooses the degree in 1..max_degree by stratified k-fold cross-validation
/// (ties to the smaller degree) and trains on all data with it.
inline AlphaModel train_alpha_cv(const Matrix& depths, const std::vector<int>& y, int max_degree, int folds,
                                 std::uint64_t seed, std::vector<double>* cv_errors = nullptr) {
  if (max_degree < 1 || max_degree > 3) throw ParameterError("max-degree: must be 1, 2 or 3");
  if (max_degree == 1) return train_alpha(depths, y, 1);
  const Index n = depths.rows();
  int k = std::min<int>(folds, static_cast<int>(n));
  std::vector<int> fold = stratified_folds(y, k, seed);
  int best_p = 1;
  double best_err = 2.0;
  for (int p = 1; p <= max_degree; ++p) {
    Index wrong = 0;
    for (int f = 0; f < k; ++f) {
      std::vector<Index> tr, te;
      for (Index i = 0; i < n; ++i) (fold[static_cast<std::size_t>(i)] == f ? te : tr).push_back(i);
      if (te.empty()) continue;
      std::vector<int> ytr = pick(y, tr);
      if (std::count(ytr.begin(), ytr.end(), 1) == 0 || std::count(ytr.begin(), ytr.end(), -1) == 0) {
        wrong += static_cast<Index>(te.size());
        continue;
      }
      AlphaModel m = train_alpha(pick_rows(depths, tr), ytr, p);
      wrong += alpha_errors(m, pick_rows(depths, te), pick(y, te));
    }
    double err = static_cast<double>(wrong) / static_cast<double>(n);
    if (cv_errors) cv_errors->push_back(err);
    if (err < best_err) {
      best_err = err;
      best_p = p;
    }
  }
  return train_alpha(depths, y, best_p);
}

inline void to_json(nlohmann::json& j, const AlphaModel& m) {
  std::vector<Index> props;
  std::vector<double> angles;
  for (const auto& [p, a] : m.features) {
    props.push_back(p);
    angles.push_back(a);
  }
  j = nlohmann::json{{"degree", m.degree},
                     {"dims", m.dims},
                     {"exponents", m.exponents},
                     {"normal", std::vector<double>(m.normal.data(), m.normal.data() + m.normal.size())},
                     {"feature_properties", props},
                     {"feature_angles", angles},
                     {"risk_trace", m.risk_trace}};
}

inline void from_json(const nlohmann::json& j, AlphaModel& m) {
  m.degree = j.at("degree").get<int>();
  m.dims = j.at("dims").get<int>();
  m.exponents = j.at("exponents").get<std::vector<std::vector<int>>>();
  auto normal = j.at("normal").get<std::vector<double>>();
  m.normal = Eigen::Map<Vector>(normal.data(), static_cast<Index>(normal.size()));
  auto props = j.at("feature_properties").get<std::vector<Index>>();
  auto angles = j.at("feature_angles").get<std::vector<double>>();
  if (props.size() != angles.size() || m.exponents.size() != normal.size()) throw SchemaError("alpha model: inconsistent sizes");
  m.features.clear();
  for (std::size_t i = 0; i < props.size(); ++i) m.features.emplace_back(props[i], angles[i]);
  m.risk_trace = j.at("risk_trace").get<std::vector<Index>>();
}

}  // namespace depthcraft
