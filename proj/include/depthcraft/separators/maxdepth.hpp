#pragma once

#include <random>
#include <vector>

#include "depthcraft/datamodel.hpp"
#include "depthcraft/depth/engine.hpp"
#include "depthcraft/random.hpp"
#include "depthcraft/separators/common.hpp"
#include "depthcraft/separators/knn.hpp"

namespace depthcraft {

/// Index of the largest entry; exact ties are broken uniformly at random.
inline int classify_maxdepth(const Vector& depth_row, Rng& rng) {
  if (depth_row.size() < 2) throw ParameterError("max-depth rule needs at least 2 classes");
  double top = depth_row.maxCoeff();
  std::vector<int> best;
  for (Index j = 0; j < depth_row.size(); ++j) {
    if (depth_row(j) == top) best.push_back(static_cast<int>(j));
  }
  if (best.size() == 1) return best.front();
  std::uniform_int_distribution<std::size_t> pick_one(0, best.size() - 1);
  return best[pick_one(rng)];
}

/// Depth-based kNN: the sample is extended by its reflection through x0 and
/// x0 goes to the modal class among the k deepest original points.
struct DknnModel {
  Index k = 1;
  DepthSpec spec;
  LabeledSample sample;
  std::vector<double> cv_errors;

  int classify(const Vector& x0, Rng& rng) const;
};

namespace detail {

/// Depths of the rows of `x` w.r.t. x ∪ (2 x0 - x).
inline Vector reflected_depths(const Vector& x0, const Matrix& x, const DepthSpec& spec) {
  const Index n = x.rows();
  Matrix cloud(2 * n, x.cols());
  cloud.topRows(n) = x;
  cloud.bottomRows(n) = (-x).rowwise() + 2.0 * x0.transpose();
  DepthEngine engine(DataMatrix(cloud), spec);
  Vector out(n);
  for (Index i = 0; i < n; ++i) out(i) = engine.depth(x.row(i).transpose(), 0);
  return out;
}

/// Training rows ordered by decreasing depth (ties by index).
inline std::vector<Index> deepest_first(const Vector& depth) {
  std::vector<Index> idx(static_cast<std::size_t>(depth.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return depth(a) > depth(b); });
  return idx;
}

inline int modal_class(const std::vector<Index>& votes, Rng& rng) {
  Index top = *std::max_element(votes.begin(), votes.end());
  std::vector<int> best;
  for (std::size_t c = 0; c < votes.size(); ++c) {
    if (votes[c] == top) best.push_back(static_cast<int>(c));
  }
  if (best.size() == 1) return best.front();
  std::uniform_int_distribution<std::size_t> pick_one(0, best.size() - 1);
  return best[pick_one(rng)];
}

}  // namespace detail

/// Classifies x0 with a fixed k; returns a 0-based class index.
inline int dknn_classify(const Vector& x0, const LabeledSample& sample, Index k, const DepthSpec& spec, Rng& rng) {
  const Index n = sample.size();
  if (k < 1 || k > n) throw ParameterError("k: must be in 1.." + std::to_string(n));
  check_dim(x0, sample.dim());
  Vector depth = detail::reflected_depths(x0, sample.data().values(), spec);
  std::vector<Index> order = detail::deepest_first(depth);
  std::vector<Index> votes(static_cast<std::size_t>(sample.num_classes()), 0);
  for (Index j = 0; j < k; ++j) ++votes[static_cast<std::size_t>(sample.labels()[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] - 1)];
  return detail::modal_class(votes, rng);
}

inline int DknnModel::classify(const Vector& x0, Rng& rng) const { return dknn_classify(x0, sample, k, spec, rng); }

/// Chooses k in 1..k_max by leave-one-out (ties to the smaller k).
inline DknnModel train_dknn(const LabeledSample& sample, const DepthSpec& spec, Index k_max, std::uint64_t seed) {
  const Index n = sample.size();
  if (n < 3) throw TrainingError("depth-based knn needs at least 3 training points");
  if (k_max <= 0) k_max = default_k_max(n);
  k_max = std::min(k_max, n - 1);
  std::vector<Index> wrong(static_cast<std::size_t>(k_max), 0);
  const Matrix& x = sample.data().values();
  for (Index i = 0; i < n; ++i) {
    std::vector<Index> rest;
    for (Index r = 0; r < n; ++r) {
      if (r != i) rest.push_back(r);
    }
    Matrix others = pick_rows(x, rest);
    Vector x0 = x.row(i).transpose();
    Vector depth = detail::reflected_depths(x0, others, spec);
    std::vector<Index> order = detail::deepest_first(depth);
    std::vector<Index> votes(static_cast<std::size_t>(sample.num_classes()), 0);
    Rng rng(point_seed(seed, x0));
    for (Index k = 1; k <= k_max; ++k) {
      Index row = rest[static_cast<std::size_t>(order[static_cast<std::size_t>(k - 1)])];
      ++votes[static_cast<std::size_t>(sample.labels()[static_cast<std::size_t>(row)] - 1)];
      if (detail::modal_class(votes, rng) != sample.labels()[static_cast<std::size_t>(i)] - 1) ++wrong[static_cast<std::size_t>(k - 1)];
    }
  }
  DknnModel m;
  m.spec = spec;
  m.sample = sample;
  Index best = 0;
  for (Index k = 0; k < k_max; ++k) {
    m.cv_errors.push_back(static_cast<double>(wrong[static_cast<std::size_t>(k)]) / static_cast<double>(n));
    if (wrong[static_cast<std::size_t>(k)] < wrong[static_cast<std::size_t>(best)]) best = k;
  }
  m.k = best + 1;
  return m;
}

}  // namespace depthcraft
