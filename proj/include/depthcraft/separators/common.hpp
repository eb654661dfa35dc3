#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <map>
#include <vector>

#include "depthcraft/datamodel.hpp"
#include "depthcraft/random.hpp"

namespace depthcraft {

/// Fold index per observation; every class is spread evenly over the folds.
inline std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed) {
  std::vector<int> out(labels.size(), 0);
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Rng rng(seed);
  int offset = 0;
  for (auto& [label, idx] : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = static_cast<int>((k + static_cast<std::size_t>(offset)) % static_cast<std::size_t>(folds));
    offset += static_cast<int>(idx.size() % static_cast<std::size_t>(folds));
  }
  return out;
}

template <typename T>
std::vector<T> pick(const std::vector<T>& v, const std::vector<Index>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (Index i : idx) out.push_back(v[static_cast<std::size_t>(i)]);
  return out;
}

inline Matrix pick_rows(const Matrix& m, const std::vector<Index>& idx) {
  Matrix out(static_cast<Index>(idx.size()), m.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Index>(k)) = m.row(idx[k]);
  return out;
}

/// Seed derived from the bits of a point, so tie-breaks do not depend on batch order.
inline std::uint64_t point_seed(std::uint64_t seed, const Vector& z) {
  std::uint64_t h = seed;
  for (Index k = 0; k < z.size(); ++k) {
    double v = z(k) == 0.0 ? 0.0 : z(k);
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h = split_seed(h, bits);
  }
  return h;
}

}  // namespace depthcraft
