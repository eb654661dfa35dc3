#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <nlohmann/json.hpp>

#include "depthcraft/datamodel.hpp"
#include "depthcraft/error.hpp"

namespace depthcraft {

/// Winner of a vote: most votes, then larger training class, then smaller index.
inline int vote_winner(const std::vector<Index>& votes, const std::vector<Index>& class_sizes) {
  int best = 0;
  for (int c = 1; c < static_cast<int>(votes.size()); ++c) {
    const auto k = static_cast<std::size_t>(c);
    const auto b = static_cast<std::size_t>(best);
    if (votes[k] > votes[b] || (votes[k] == votes[b] && class_sizes[k] > class_sizes[b])) best = c;
  }
  return best;
}

/// Euclidean k-nearest-neighbour rule on an arbitrary feature space. Classes
/// are 0-based indices.
struct KnnModel {
  Index k = 1;
  Matrix points;
  std::vector<int> classes;
  std::vector<Index> class_sizes;
  std::vector<double> cv_errors;  // leave-one-out error for k = 1..k_max

  int num_classes() const { return static_cast<int>(class_sizes.size()); }

  /// Indices of training points by increasing distance to z (ties by index).
  std::vector<Index> neighbours(const Vector& z, Index skip = -1) const {
    std::vector<std::pair<double, Index>> d;
    d.reserve(static_cast<std::size_t>(points.rows()));
    for (Index i = 0; i < points.rows(); ++i) {
      if (i == skip) continue;
      d.emplace_back((points.row(i).transpose() - z).squaredNorm(), i);
    }
    std::sort(d.begin(), d.end());
    std::vector<Index> out;
    out.reserve(d.size());
    for (const auto& [dist, i] : d) out.push_back(i);
    return out;
  }

  int classify(const Vector& z) const {
    if (z.size() != points.cols()) throw ParameterError("knn: point has wrong dimension");
    std::vector<Index> nb = neighbours(z);
    std::vector<Index> votes(class_sizes.size(), 0);
    for (Index j = 0; j < std::min<Index>(k, static_cast<Index>(nb.size())); ++j) {
      ++votes[static_cast<std::size_t>(classes[static_cast<std::size_t>(nb[static_cast<std::size_t>(j)])])];
    }
    return vote_winner(votes, class_sizes);
  }
};

/// Default upper bound for k: min(50, ceil(n/2)), at most n - 1.
inline Index default_k_max(Index n) {
  return std::max<Index>(1, std::min<Index>({50, (n + 1) / 2, n - 1}));
}

/// Trains a kNN rule with k chosen by leave-one-out over 1..k_max (ties to
/// the smaller k). k_max <= 0 selects the default.
inline KnnModel train_knn(const Matrix& points, const std::vector<int>& classes, int num_classes, Index k_max = 0) {
  const Index n = points.rows();
  if (n < 2) throw TrainingError("knn needs at least 2 training points");
  if (static_cast<Index>(classes.size()) != n) throw ParameterError("knn: label count mismatch");
  if (k_max <= 0) k_max = default_k_max(n);
  if (k_max > n - 1) throw ParameterError("k-max: must be at most n - 1 = " + std::to_string(n - 1));
  KnnModel m;
  m.points = points;
  m.classes = classes;
  m.class_sizes.assign(static_cast<std::size_t>(num_classes), 0);
  for (int c : classes) {
    if (c < 0 || c >= num_classes) throw ParameterError("knn: class index out of range");
    ++m.class_sizes[static_cast<std::size_t>(c)];
  }
  std::vector<Index> wrong(static_cast<std::size_t>(k_max), 0);
  for (Index i = 0; i < n; ++i) {
    std::vector<Index> nb = m.neighbours(points.row(i).transpose(), i);
    std::vector<Index> votes(static_cast<std::size_t>(num_classes), 0);
    for (Index k = 1; k <= k_max; ++k) {
      ++votes[static_cast<std::size_t>(classes[static_cast<std::size_t>(nb[static_cast<std::size_t>(k - 1)])])];
      if (vote_winner(votes, m.class_sizes) != classes[static_cast<std::size_t>(i)]) ++wrong[static_cast<std::size_t>(k - 1)];
    }
  }
  Index best = 0;
  for (Index k = 0; k < k_max; ++k) {
    m.cv_errors.push_back(static_cast<double>(wrong[static_cast<std::size_t>(k)]) / static_cast<double>(n));
    if (wrong[static_cast<std::size_t>(k)] < wrong[static_cast<std::size_t>(best)]) best = k;
  }
  m.k = best + 1;
  return m;
}

/// kNN with a fixed k (no cross-validation).
inline KnnModel make_knn(const Matrix& points, const std::vector<int>& classes, int num_classes, Index k) {
  if (k < 1 || k > points.rows()) throw ParameterError("k: must be in 1..n");
  KnnModel m;
  m.k = k;
  m.points = points;
  m.classes = classes;
  m.class_sizes.assign(static_cast<std::size_t>(num_classes), 0);
  for (int c : classes) ++m.class_sizes[static_cast<std::size_t>(c)];
  return m;
}

inline void to_json(nlohmann::json& j, const KnnModel& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.points.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (Index c = 0; c < m.points.cols(); ++c) r.push_back(m.points(i, c));
    rows.push_back(std::move(r));
  }
  j = nlohmann::json{{"k", m.k},
                     {"dim", m.points.cols()},
                     {"points", rows},
                     {"classes", m.classes},
                     {"class_sizes", m.class_sizes},
                     {"cv_errors", m.cv_errors}};
}

inline void from_json(const nlohmann::json& j, KnnModel& m) {
  m.k = j.at("k").get<Index>();
  Index dim = j.at("dim").get<Index>();
  const auto& rows = j.at("points");
  m.points.resize(static_cast<Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Index>(rows[i].size()) != dim) throw SchemaError("knn model: point has wrong dimension");
    for (Index c = 0; c < dim; ++c) m.points(static_cast<Index>(i), c) = rows[i][static_cast<std::size_t>(c)].get<double>();
  }
  m.classes = j.at("classes").get<std::vector<int>>();
  m.class_sizes = j.at("class_sizes").get<std::vector<Index>>();
  m.cv_errors = j.at("cv_errors").get<std::vector<double>>();
  if (static_cast<Index>(m.classes.size()) != m.points.rows() || m.k < 1) throw SchemaError("knn model: inconsistent sizes");
}

}  // namespace depthcraft
