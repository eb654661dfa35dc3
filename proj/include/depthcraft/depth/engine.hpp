#pragma once

#include <atomic>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "depthcraft/datamodel.hpp"
#include "depthcraft/depth/halfspace.hpp"
#include "depthcraft/depth/mahalanobis.hpp"
#include "depthcraft/depth/potential.hpp"
#include "depthcraft/depth/projection.hpp"
#include "depthcraft/depth/simplicial.hpp"
#include "depthcraft/depth/spatial.hpp"
#include "depthcraft/depth/spec.hpp"
#include "depthcraft/depth/zonoid.hpp"
#include "depthcraft/estimators.hpp"
#include "depthcraft/parallel.hpp"

namespace depthcraft {

/// Depths of points w.r.t. each class: entry (i, j) = D(x_i | X_j).
struct DepthSpace {
  Matrix depths;                    // n x q
  std::vector<Index> cardinalities; // n_1..n_q of the reference classes
  std::vector<int> labels;          // labels of the rows, empty if unknown
  DepthSpec spec;
  bool jittered = false;

  Index rows() const { return depths.rows(); }
  int classes() const { return static_cast<int>(depths.cols()); }
};

/// Per-class statistics of a depth function, computed once and frozen
/// (estimates, random directions, pretransform). Evaluation is pure and
/// thread-safe.
class DepthEngine {
 public:
  DepthEngine() = default;

  DepthEngine(const LabeledSample& sample, DepthSpec spec) : spec_(std::move(spec)) {
    for (int j = 1; j <= sample.num_classes(); ++j) classes_.push_back(sample.class_data(j));
    fit();
  }

  DepthEngine(const DataMatrix& data, DepthSpec spec) : spec_(std::move(spec)) {
    classes_.push_back(data);
    fit();
  }

  DepthEngine(std::vector<DataMatrix> classes, DepthSpec spec) : spec_(std::move(spec)), classes_(std::move(classes)) {
    fit();
  }

  const DepthSpec& spec() const { return spec_; }
  int num_classes() const { return static_cast<int>(classes_.size()); }
  Index dim() const { return classes_.empty() ? 0 : classes_.front().cols(); }
  const DataMatrix& class_data(int cls) const { return classes_.at(static_cast<std::size_t>(cls)); }
  const Matrix& directions() const { return directions_; }
  const ScatterEstimate& estimate(int cls) const { return estimates_.at(static_cast<std::size_t>(cls)); }

  std::vector<Index> cardinalities() const {
    std::vector<Index> c;
    for (const auto& x : classes_) c.push_back(x.rows());
    return c;
  }

  /// Depth of z w.r.t. class `cls` (0-based).
  double depth(const Vector& z, int cls, DepthDiagnostics* diag = nullptr) const {
    check_dim(z, dim());
    const auto k = static_cast<std::size_t>(cls);
    const DataMatrix& x = classes_.at(k);
    switch (spec_.notion) {
      case DepthNotion::mahalanobis: return depth_mahalanobis(z, estimates_[k]);
      case DepthNotion::spatial: return depth_spatial(z, spatial_[k]);
      case DepthNotion::spatial_local: return depth_spatial_local(z, spatial_[k], spec_.bandwidth_for(cls));
      case DepthNotion::projection: return projection_[k].depth(z);
      case DepthNotion::halfspace:
        if (spec_.exact) return depth_halfspace_exact(z, x, {spec_.halfspace_cap, spec_.seed}, diag);
        return halfspace_[k].depth(z);
      case DepthNotion::simplicial:
        if (spec_.exact) return depth_simplicial_exact(z, x, {spec_.simplex_cap, spec_.seed}, diag);
        {
          Rng rng(spec_.seed);
          return depth_simplicial_approx(z, x, spec_.simplex_count, rng);
        }
      case DepthNotion::simplicial_volume:
        if (spec_.exact) return depth_simplicial_volume_exact(z, x, estimates_[k], spec_.simplex_cap);
        {
          Rng rng(spec_.seed);
          return depth_simplicial_volume_approx(z, x, estimates_[k], spec_.simplex_count, rng);
        }
      case DepthNotion::zonoid: return depth_zonoid(z, x);
      case DepthNotion::potential: return potential_[k](pretransform(z));
    }
    return 0.0;
  }

  /// Depths of z w.r.t. every class.
  Vector depths(const Vector& z, DepthDiagnostics* diag = nullptr) const {
    Vector out(num_classes());
    for (int j = 0; j < num_classes(); ++j) out(j) = depth(z, j, diag);
    return out;
  }

  /// n x q matrix of depths; rows are evaluated in parallel, the result does
  /// not depend on the number of threads.
  DepthSpace depth_space(const DataMatrix& points) const {
    if (!points.empty()) check_dim(points.row(0), dim());
    DepthSpace ds;
    ds.depths.resize(points.rows(), num_classes());
    ds.cardinalities = cardinalities();
    ds.spec = spec_;
    std::atomic<bool> jittered{false};
    parallel_for(static_cast<std::size_t>(points.rows()), [&](std::size_t i) {
      DepthDiagnostics diag;
      Vector z = points.row(static_cast<Index>(i));
      for (int j = 0; j < num_classes(); ++j) ds.depths(static_cast<Index>(i), j) = depth(z, j, &diag);
      if (diag.jittered) jittered = true;
    });
    ds.jittered = jittered;
    return ds;
  }

  DepthSpace depth_space(const LabeledSample& sample) const {
    DepthSpace ds = depth_space(sample.data());
    ds.labels = sample.labels();
    return ds;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["spec"] = spec_;
    nlohmann::json cls = nlohmann::json::array();
    for (const auto& x : classes_) cls.push_back(matrix_to_json(x.values()));
    j["classes"] = cls;
    j["directions"] = matrix_to_json(directions_);
    nlohmann::json est = nlohmann::json::array();
    for (const auto& e : estimates_) {
      est.push_back({{"kind", to_string(e.kind)}, {"mu", vector_to_json(e.mu)}, {"sigma", matrix_to_json(e.sigma)}});
    }
    j["estimates"] = est;
    return j;
  }

  static DepthEngine from_json(const nlohmann::json& j) {
    DepthEngine e;
    e.spec_ = j.at("spec").get<DepthSpec>();
    for (const auto& c : j.at("classes")) e.classes_.emplace_back(matrix_from_json(c));
    e.directions_ = matrix_from_json(j.at("directions"));
    std::vector<ScatterEstimate> est;
    for (const auto& s : j.at("estimates")) {
      Estimator kind = estimator_from_string(s.at("kind").get<std::string>());
      Vector mu = vector_from_json(s.at("mu"));
      Matrix sigma = matrix_from_json(s.at("sigma"));
      if (kind == Estimator::none) {
        ScatterEstimate id;
        id.mu = mu;
        id.sigma = sigma;
        id.sigma_inv = sigma;
        id.sigma_inv_sqrt = sigma;
        id.kind = kind;
        est.push_back(std::move(id));
      } else {
        est.push_back(make_scatter(std::move(mu), std::move(sigma), kind));
      }
    }
    e.fit(std::move(est));
    return e;
  }

  static nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
      nlohmann::json r = nlohmann::json::array();
      for (Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
      rows.push_back(std::move(r));
    }
    return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"values", rows}};
  }

  static Matrix matrix_from_json(const nlohmann::json& j) {
    Index r = j.at("rows").get<Index>();
    Index c = j.at("cols").get<Index>();
    const auto& v = j.at("values");
    if (!v.is_array() || static_cast<Index>(v.size()) != r) throw SchemaError("matrix: row count mismatch");
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i) {
      const auto& row = v[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Index>(row.size()) != c) throw SchemaError("matrix: column count mismatch");
      for (Index k = 0; k < c; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    return m;
  }

  static nlohmann::json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

  static Vector vector_from_json(const nlohmann::json& j) {
    auto v = j.get<std::vector<double>>();
    return Eigen::Map<Vector>(v.data(), static_cast<Index>(v.size()));
  }

 private:
  Vector pretransform(const Vector& z) const {
    if (!spec_.pretransform) return z;
    return pre_s_ * (z - pre_mu_);
  }

  void fit(std::optional<std::vector<ScatterEstimate>> stored = std::nullopt) {
    if (classes_.empty()) throw ParameterError("depth engine needs at least one class");
    const Index d = classes_.front().cols();
    for (const auto& x : classes_) {
      if (x.cols() != d) throw ParameterError("all classes must have the same dimension");
      if (x.rows() < 1) throw ParameterError("every class needs at least one point");
    }
    spec_.validate(d, num_classes());
    const std::size_t q = classes_.size();

    if (spec_.uses_estimator()) {
      if (stored) {
        estimates_ = std::move(*stored);
        if (estimates_.size() != q) throw SchemaError("depth model: estimate count mismatch");
      } else {
        estimates_.clear();
        for (const auto& x : classes_) estimates_.push_back(estimate_scatter(x, spec_.estimator, spec_.mcd_fraction, spec_.seed));
      }
    }
    if (spec_.uses_directions() && directions_.size() == 0) {
      Rng rng(spec_.seed);
      directions_ = uniform_directions(spec_.num_directions, d, rng);
    }

    spatial_.clear();
    projection_.clear();
    halfspace_.clear();
    potential_.clear();
    switch (spec_.notion) {
      case DepthNotion::spatial:
      case DepthNotion::spatial_local:
        for (std::size_t k = 0; k < q; ++k) spatial_.emplace_back(classes_[k], estimates_[k]);
        break;
      case DepthNotion::projection:
        for (const auto& x : classes_) projection_.emplace_back(x, directions_, spec_.refine);
        break;
      case DepthNotion::halfspace:
        if (!spec_.exact) {
          for (const auto& x : classes_) halfspace_.emplace_back(x, directions_);
        }
        break;
      case DepthNotion::potential: fit_potential(); break;
      default: break;
    }
  }

  void fit_potential() {
    const Index d = dim();
    Index n = 0;
    for (const auto& x : classes_) n += x.rows();
    if (spec_.pretransform) {
      Matrix all(n, d);
      Index r = 0;
      for (const auto& x : classes_) {
        all.middleRows(r, x.rows()) = x.values();
        r += x.rows();
      }
      ScatterEstimate pooled = moment_estimate(DataMatrix(all));
      pre_mu_ = pooled.mu;
      pre_s_ = pooled.sigma_inv_sqrt;
    }
    for (std::size_t k = 0; k < classes_.size(); ++k) {
      const Matrix& x = classes_[k].values();
      Matrix y = x;
      if (spec_.pretransform) y = (x.rowwise() - pre_mu_.transpose()) * pre_s_;
      DataMatrix cls(y);
      Matrix sigma = cls.rows() >= 2 ? moment_estimate(cls).sigma : Matrix::Identity(d, d);
      double prior = static_cast<double>(x.rows()) / static_cast<double>(n);
      potential_.emplace_back(cls, prior, spec_.bandwidth_for(static_cast<int>(k)), sigma);
    }
  }

  DepthSpec spec_;
  std::vector<DataMatrix> classes_;
  Matrix directions_;
  std::vector<ScatterEstimate> estimates_;
  std::vector<SpatialStats> spatial_;
  std::vector<ProjectionStats> projection_;
  std::vector<HalfspaceApproxStats> halfspace_;
  std::vector<PotentialStats> potential_;
  Vector pre_mu_;
  Matrix pre_s_;
};

/// Depth of z w.r.t. one sample under `spec`.
inline double depth(const Vector& z, const DataMatrix& data, const DepthSpec& spec) {
  return DepthEngine(data, spec).depth(z, 0);
}

/// Depths of every query row w.r.t. one sample.
inline Vector depths(const DataMatrix& queries, const DataMatrix& data, const DepthSpec& spec) {
  return DepthEngine(data, spec).depth_space(queries).depths.col(0);
}

/// Depth space of a labeled sample w.r.t. its own classes (points are not
/// removed from their own class).
inline DepthSpace depth_space(const LabeledSample& sample, const DepthSpec& spec) {
  return DepthEngine(sample, spec).depth_space(sample);
}

}  // namespace depthcraft
