#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "depthcraft/datamodel.hpp"
#include "depthcraft/lp.hpp"
#include "depthcraft/random.hpp"

namespace testing_support {

using depthcraft::DataMatrix;
using depthcraft::Index;
using depthcraft::Matrix;
using depthcraft::Rng;
using depthcraft::Vector;

inline Matrix normal_matrix(Index n, Index d, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix x(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) x(i, j) = g(rng);
  }
  return x;
}

inline Vector normal_vector(Index d, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(d);
  for (Index j = 0; j < d; ++j) v(j) = g(rng);
  return v;
}

// Well-conditioned random matrix: rotation times a diagonal in [0.5, 2].
inline Matrix random_affine(Index d, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(normal_matrix(d, d, rng));
  Matrix q = qr.householderQ();
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Vector s(d);
  for (Index j = 0; j < d; ++j) s(j) = u(rng);
  return q * s.asDiagonal();
}

inline double orient(const Vector& a, const Vector& b, const Vector& c) {
  return (b(0) - a(0)) * (c(1) - a(1)) - (b(1) - a(1)) * (c(0) - a(0));
}

// Closed triangles containing z, by enumerating all C(n, 3) triples.
inline std::int64_t simplicial_brute_2d(const Vector& z, const Matrix& x) {
  const Index n = x.rows();
  std::int64_t count = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      for (Index k = j + 1; k < n; ++k) {
        Vector a = x.row(i), b = x.row(j), c = x.row(k);
        double area = orient(a, b, c);
        if (area == 0.0) continue;
        double s1 = orient(a, b, z), s2 = orient(b, c, z), s3 = orient(c, a, z);
        bool pos = s1 >= 0 && s2 >= 0 && s3 >= 0;
        bool neg = s1 <= 0 && s2 <= 0 && s3 <= 0;
        if (pos || neg) ++count;
      }
    }
  }
  return count;
}

// Tukey depth in the plane from the definition: the smallest closed
// halfplane through z, over normals perpendicular to each z-to-point
// direction turned slightly either way.
inline Index halfspace_brute_2d(const Vector& z, const Matrix& x) {
  const Index n = x.rows();
  Index best = n;
  auto count = [&](double ux, double uy) {
    Index c = 0;
    for (Index i = 0; i < n; ++i) {
      if ((x(i, 0) - z(0)) * ux + (x(i, 1) - z(1)) * uy >= 0.0) ++c;
    }
    return c;
  };
  for (Index i = 0; i < n; ++i) {
    double dx = x(i, 0) - z(0), dy = x(i, 1) - z(1);
    if (dx == 0.0 && dy == 0.0) continue;
    double base = std::atan2(dy, dx) + std::acos(-1.0) / 2;
    for (double turn : {-1e-7, 1e-7}) {
      for (double flip : {0.0, std::acos(-1.0)}) {
        double a = base + turn + flip;
        best = std::min(best, count(std::cos(a), std::sin(a)));
      }
    }
  }
  return best;
}

// Largest alpha on the grid k / steps for which z lies in the zonoid
// alpha-trimmed region: sum l = 1, sum l x = z, 0 <= l <= 1 / (n alpha).
inline double zonoid_grid(const Vector& z, const Matrix& x, int steps) {
  const Index n = x.rows();
  const Index d = x.cols();
  Matrix a(d + 1, n);
  a.row(0).setOnes();
  a.bottomRows(d) = x.transpose();
  Vector b(d + 1);
  b(0) = 1.0;
  b.tail(d) = z;
  double best = 0.0;
  for (int k = 1; k <= steps; ++k) {
    double alpha = static_cast<double>(k) / steps;
    Vector upper = Vector::Constant(n, 1.0 / (static_cast<double>(n) * alpha));
    if (depthcraft::lp_feasible(a, b, upper)) best = alpha;
  }
  return best;
}

// Fewest errors of any line through the origin of the (f, x) plane, with
// either orientation. Points at the origin count for neither side.
inline Index min_error_brute(const Vector& f, const Vector& x, const std::vector<int>& y) {
  const Index n = f.size();
  std::vector<double> angles;
  for (Index i = 0; i < n; ++i) {
    if (f(i) == 0.0 && x(i) == 0.0) continue;
    // Fold onto the half-plane f > 0 (or f = 0, x > 0) so both rays of a line share one angle.
    bool far = f(i) < 0.0 || (f(i) == 0.0 && x(i) < 0.0);
    angles.push_back(far ? std::atan2(-x(i), -f(i)) : std::atan2(x(i), f(i)));
  }
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end(), [](double a, double b) { return b - a < 1e-12; }), angles.end());
  std::vector<double> cands;
  if (angles.empty()) return 0;
  for (std::size_t i = 0; i + 1 < angles.size(); ++i) cands.push_back(0.5 * (angles[i] + angles[i + 1]));
  cands.push_back(0.5 * (angles.back() + angles.front() + std::acos(-1.0)));
  Index best = n;
  for (double line : cands) {
    double nx = -std::sin(line), ny = std::cos(line);
    Index wrong = 0, nonzero = 0;
    for (Index i = 0; i < n; ++i) {
      if (f(i) == 0.0 && x(i) == 0.0) continue;
      ++nonzero;
      double s = nx * f(i) + ny * x(i);
      if ((s > 0) != (y[static_cast<std::size_t>(i)] > 0)) ++wrong;
    }
    best = std::min({best, wrong, nonzero - wrong});
  }
  return best;
}

// Two-class DD-plot around the curve v = a u + c u^3; odd rows sit delta
// above it with label +1, even rows delta below with label -1.
struct CubicFixture {
  Matrix depths;
  std::vector<int> labels;
};

inline CubicFixture cubic_fixture(Index n, double a, double c, double delta) {
  CubicFixture f;
  f.depths.resize(n, 2);
  for (Index i = 0; i < n; ++i) {
    double u = 0.05 + 0.9 * static_cast<double>(i / 2) / static_cast<double>(n / 2 - 1);
    int s = i % 2 ? 1 : -1;
    f.depths(i, 0) = u;
    f.depths(i, 1) = a * u + c * u * u * u + s * delta;
    f.labels.push_back(s);
  }
  return f;
}

}  // namespace testing_support
