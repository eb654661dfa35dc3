#pragma once

#include <string>
#include <vector>

#include "depthcraft/datamodel.hpp"
#include "depthcraft/error.hpp"

namespace depthcraft {

/// Exponent vectors of all monomials in q variables of total degree 1..p.
/// Graded: degree 1 first; within a degree, exponents of earlier variables
/// descend (x, y, x^2, xy, y^2, x^3, x^2y, xy^2, y^3 for q = 2).
inline std::vector<std::vector<int>> monomial_exponents(int q, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> e(static_cast<std::size_t>(q), 0);
  for (int deg = 1; deg <= p; ++deg) {
    // Enumerate compositions of deg into q parts, first part descending.
    auto rec = [&](auto&& self, int pos, int left) -> void {
      if (pos == q - 1) {
        e[static_cast<std::size_t>(pos)] = left;
        out.push_back(e);
        return;
      }
      for (int k = left; k >= 0; --k) {
        e[static_cast<std::size_t>(pos)] = k;
        self(self, pos + 1, left - k);
      }
    };
    rec(rec, 0, deg);
  }
  return out;
}

/// Depth space with every monomial of degree <= p as a column.
struct ExtendedDepthSpace {
  int degree = 1;
  std::vector<std::vector<int>> exponents;  // one per column
  Matrix features;                          // n x r

  Index cols() const { return features.cols(); }

  int total_degree(Index col) const {
    int s = 0;
    for (int e : exponents[static_cast<std::size_t>(col)]) s += e;
    return s;
  }
};

inline Vector extend_row(const Vector& row, const std::vector<std::vector<int>>& exps) {
  Vector out(static_cast<Index>(exps.size()));
  for (std::size_t c = 0; c < exps.size(); ++c) {
    double v = 1.0;
    for (Index k = 0; k < row.size(); ++k) {
      for (int t = 0; t < exps[c][static_cast<std::size_t>(k)]; ++t) v *= row(k);
    }
    out(static_cast<Index>(c)) = v;
  }
  return out;
}

inline ExtendedDepthSpace extend(const Matrix& depths, int p) {
  if (p < 1 || p > 3) throw ParameterError("degree: polynomial extension degree must be 1, 2 or 3");
  ExtendedDepthSpace ext;
  ext.degree = p;
  ext.exponents = monomial_exponents(static_cast<int>(depths.cols()), p);
  ext.features.resize(depths.rows(), static_cast<Index>(ext.exponents.size()));
  for (Index i = 0; i < depths.rows(); ++i) ext.features.row(i) = extend_row(depths.row(i).transpose(), ext.exponents).transpose();
  return ext;
}

/// Human-readable monomial name over variables x, y, z, w, ... (e.g. "x^2y").
inline std::string monomial_name(const std::vector<int>& e) {
  static const char* vars[] = {"x", "y", "z", "w", "v", "u"};
  std::string s;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e[k] == 0) continue;
    s += k < 6 ? vars[k] : "d" + std::to_string(k + 1);
    if (e[k] > 1) s += "^" + std::to_string(e[k]);
  }
  return s;
}

}  // namespace depthcraft
