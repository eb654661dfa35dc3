#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "depthcraft/datamodel.hpp"
#include "depthcraft/depth/engine.hpp"
#include "depthcraft/depth/zonoid.hpp"
#include "depthcraft/estimators.hpp"
#include "depthcraft/random.hpp"
#include "depthcraft/separators/knn.hpp"
#include "depthcraft/separators/maxdepth.hpp"

namespace depthcraft {

/// Class index returned for points the "ignore" treatment refuses to label.
inline constexpr int kIgnored = -1;

enum class OutsiderMethod { lda, qda, knn, knn_affine, maxdepth_mahalanobis, rand_equal, rand_prop, ignore };

inline std::string to_string(OutsiderMethod m) {
  switch (m) {
    case OutsiderMethod::lda: return "lda";
    case OutsiderMethod::qda: return "qda";
    case OutsiderMethod::knn: return "knn";
    case OutsiderMethod::knn_affine: return "knn-affine";
    case OutsiderMethod::maxdepth_mahalanobis: return "maxdepth-mahalanobis";
    case OutsiderMethod::rand_equal: return "rand-equal";
    case OutsiderMethod::rand_prop: return "rand-prop";
    case OutsiderMethod::ignore: return "ignore";
  }
  return "?";
}

inline OutsiderMethod outsider_method_from_string(const std::string& s) {
  for (auto m : {OutsiderMethod::lda, OutsiderMethod::qda, OutsiderMethod::knn, OutsiderMethod::knn_affine,
                 OutsiderMethod::maxdepth_mahalanobis, OutsiderMethod::rand_equal, OutsiderMethod::rand_prop,
                 OutsiderMethod::ignore}) {
    if (to_string(m) == s) return m;
  }
  throw ParameterError("outsider-method: unknown method '" + s +
                       "' (expected lda, qda, knn, knn-affine, maxdepth-mahalanobis, rand-equal, rand-prop or ignore)");
}

enum class OutsiderMode { zero_depth, convex_hull };

struct OutsiderPolicy {
  std::string name;
  OutsiderMethod method = OutsiderMethod::lda;
  Index k_max = 0;  // knn methods; 0 = default
  Estimator estimator = Estimator::moment;
  double mcd_fraction = 0.75;

  static OutsiderPolicy of(OutsiderMethod m) { return {to_string(m), m}; }
};

/// Flags of the rows whose depths are all zero.
inline std::vector<bool> zero_depth_flags(const Matrix& depths) {
  std::vector<bool> out(static_cast<std::size_t>(depths.rows()));
  for (Index i = 0; i < depths.rows(); ++i) out[static_cast<std::size_t>(i)] = depths.row(i).maxCoeff() < 1e-12;
  return out;
}

/// True if z is outside the convex hull of every class.
inline bool outside_all_hulls(const Vector& z, const std::vector<DataMatrix>& classes) {
  for (const auto& x : classes) {
    if (in_convex_hull(z, x)) return false;
  }
  return true;
}

inline std::vector<bool> detect_outsiders(const DataMatrix& points, const DepthEngine& engine, OutsiderMode mode) {
  std::vector<bool> out(static_cast<std::size_t>(points.rows()));
  if (mode == OutsiderMode::zero_depth) return zero_depth_flags(engine.depth_space(points).depths);
  std::vector<DataMatrix> classes;
  for (int j = 0; j < engine.num_classes(); ++j) classes.push_back(engine.class_data(j));
  for (Index i = 0; i < points.rows(); ++i) out[static_cast<std::size_t>(i)] = outside_all_hulls(points.row(i), classes);
  return out;
}

/// Trained fallback classifier for outsiders. Classes are 0-based.
struct Treatment {
  OutsiderPolicy policy;
  std::vector<Index> class_sizes;
  // lda / qda: per-class means, inverse covariances and constant terms
  std::vector<Vector> means;
  std::vector<Matrix> inverses;
  std::vector<double> constants;
  // knn: one model; knn-affine: whitening plus one model per class pair
  KnnModel knn;
  Matrix whitening;
  std::vector<KnnModel> pair_knn;
  std::vector<std::pair<int, int>> pairs;
  // maxdepth-mahalanobis
  std::vector<ScatterEstimate> estimates;

  int num_classes() const { return static_cast<int>(class_sizes.size()); }

  int classify(const Vector& z, Rng& rng) const {
    const int q = num_classes();
    switch (policy.method) {
      case OutsiderMethod::lda:
      case OutsiderMethod::qda: {
        int best = 0;
        double best_v = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < q; ++j) {
          const auto k = static_cast<std::size_t>(j);
          Vector c = z - means[k];
          double v = constants[k] - 0.5 * c.dot(inverses[k] * c);
          if (v > best_v) {
            best_v = v;
            best = j;
          }
        }
        return best;
      }
      case OutsiderMethod::knn: return knn.classify(z);
      case OutsiderMethod::knn_affine: {
        Vector w = whitening * z;
        std::vector<Index> votes(static_cast<std::size_t>(q), 0);
        for (std::size_t p = 0; p < pairs.size(); ++p) {
          int local = pair_knn[p].classify(w);
          ++votes[static_cast<std::size_t>(local == 0 ? pairs[p].first : pairs[p].second)];
        }
        return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
      }
      case OutsiderMethod::maxdepth_mahalanobis: {
        Vector d(q);
        for (int j = 0; j < q; ++j) d(j) = depth_mahalanobis(z, estimates[static_cast<std::size_t>(j)]);
        return classify_maxdepth(d, rng);
      }
      case OutsiderMethod::rand_equal: {
        std::uniform_int_distribution<int> u(0, q - 1);
        return u(rng);
      }
      case OutsiderMethod::rand_prop: {
        std::discrete_distribution<int> u(class_sizes.begin(), class_sizes.end());
        return u(rng);
      }
      case OutsiderMethod::ignore: return kIgnored;
    }
    return kIgnored;
  }
};

namespace detail {

inline ScatterEstimate class_scatter(Vector mu, Matrix sigma, const std::string& what) {
  try {
    return make_scatter(std::move(mu), std::move(sigma), Estimator::moment);
  } catch (const DegenerateDataError& e) {
    throw DegenerateDataError(what + ": " + e.what());
  }
}

inline Matrix pooled_covariance(const LabeledSample& s) {
  const Index d = s.dim();
  Matrix w = Matrix::Zero(d, d);
  for (int j = 1; j <= s.num_classes(); ++j) {
    Matrix x = s.class_data(j).values();
    Matrix c = x.rowwise() - x.colwise().mean();
    w += c.transpose() * c;
  }
  Index dof = s.size() - s.num_classes();
  if (dof < 1) throw DegenerateDataError("pooled covariance: not enough observations");
  return w / static_cast<double>(dof);
}

}  // namespace detail

inline Treatment train_treatment(const OutsiderPolicy& policy, const LabeledSample& sample) {
  Treatment t;
  t.policy = policy;
  const int q = sample.num_classes();
  t.class_sizes = sample.cardinalities();
  const double n = static_cast<double>(sample.size());
  switch (policy.method) {
    case OutsiderMethod::lda: {
      ScatterEstimate pooled = detail::class_scatter(Vector::Zero(sample.dim()),
                                                     detail::pooled_covariance(sample), "pooled covariance of all classes");
      for (int j = 1; j <= q; ++j) {
        Vector mu = sample.class_data(j).column_means();
        t.means.push_back(mu);
        t.inverses.push_back(pooled.sigma_inv);
        t.constants.push_back(std::log(static_cast<double>(t.class_sizes[static_cast<std::size_t>(j - 1)]) / n));
      }
      break;
    }
    case OutsiderMethod::qda:
      for (int j = 1; j <= q; ++j) {
        DataMatrix x = sample.class_data(j);
        if (x.rows() < 2) throw DegenerateDataError("class " + sample.class_names()[static_cast<std::size_t>(j - 1)] + ": fewer than 2 observations");
        Vector mu = x.column_means();
        ScatterEstimate e = detail::class_scatter(mu, detail::covariance_of(x.values(), mu),
                                                  "class " + sample.class_names()[static_cast<std::size_t>(j - 1)]);
        t.means.push_back(e.mu);
        t.inverses.push_back(e.sigma_inv);
        t.constants.push_back(std::log(static_cast<double>(x.rows()) / n) - 0.5 * e.log_det);
      }
      break;
    case OutsiderMethod::knn: {
      std::vector<int> cls;
      for (int l : sample.labels()) cls.push_back(l - 1);
      t.knn = train_knn(sample.data().values(), cls, q, policy.k_max);
      break;
    }
    case OutsiderMethod::knn_affine: {
      ScatterEstimate pooled = detail::class_scatter(Vector::Zero(sample.dim()),
                                                     detail::pooled_covariance(sample), "pooled covariance of all classes");
      t.whitening = pooled.sigma_inv_sqrt;
      Matrix w = sample.data().values() * t.whitening;
      for (int a = 0; a < q; ++a) {
        for (int b = a + 1; b < q; ++b) {
          std::vector<Index> rows;
          std::vector<int> cls;
          for (Index i = 0; i < sample.size(); ++i) {
            int l = sample.labels()[static_cast<std::size_t>(i)] - 1;
            if (l == a || l == b) {
              rows.push_back(i);
              cls.push_back(l == a ? 0 : 1);
            }
          }
          Index k_max = policy.k_max > 0 ? std::min<Index>(policy.k_max, static_cast<Index>(rows.size()) - 1) : 0;
          t.pair_knn.push_back(train_knn(pick_rows(w, rows), cls, 2, k_max));
          t.pairs.emplace_back(a, b);
        }
      }
      break;
    }
    case OutsiderMethod::maxdepth_mahalanobis:
      for (int j = 1; j <= q; ++j) {
        try {
          t.estimates.push_back(estimate_scatter(sample.class_data(j), policy.estimator, policy.mcd_fraction, 0));
        } catch (const DegenerateDataError& e) {
          throw DegenerateDataError("class " + sample.class_names()[static_cast<std::size_t>(j - 1)] + ": " + e.what());
        }
      }
      break;
    case OutsiderMethod::rand_equal:
    case OutsiderMethod::rand_prop:
    case OutsiderMethod::ignore: break;
  }
  return t;
}

inline void to_json(nlohmann::json& j, const OutsiderPolicy& p) {
  j = nlohmann::json{{"name", p.name},
                     {"method", to_string(p.method)},
                     {"k_max", p.k_max},
                     {"estimator", to_string(p.estimator)},
                     {"mcd_fraction", p.mcd_fraction}};
}

inline void from_json(const nlohmann::json& j, OutsiderPolicy& p) {
  p.name = j.at("name").get<std::string>();
  p.method = outsider_method_from_string(j.at("method").get<std::string>());
  p.k_max = j.value("k_max", Index{0});
  p.estimator = estimator_from_string(j.value("estimator", std::string("moment")));
  p.mcd_fraction = j.value("mcd_fraction", 0.75);
}

inline void to_json(nlohmann::json& j, const Treatment& t) {
  j = nlohmann::json{{"policy", t.policy}, {"class_sizes", t.class_sizes}};
  nlohmann::json means = nlohmann::json::array();
  nlohmann::json inverses = nlohmann::json::array();
  for (std::size_t k = 0; k < t.means.size(); ++k) {
    means.push_back(DepthEngine::vector_to_json(t.means[k]));
    inverses.push_back(DepthEngine::matrix_to_json(t.inverses[k]));
  }
  j["means"] = means;
  j["inverses"] = inverses;
  j["constants"] = t.constants;
  if (t.policy.method == OutsiderMethod::knn) j["knn"] = t.knn;
  if (t.policy.method == OutsiderMethod::knn_affine) {
    j["whitening"] = DepthEngine::matrix_to_json(t.whitening);
    j["pair_knn"] = t.pair_knn;
    j["pairs"] = t.pairs;
  }
  nlohmann::json est = nlohmann::json::array();
  for (const auto& e : t.estimates) {
    est.push_back({{"kind", to_string(e.kind)}, {"mu", DepthEngine::vector_to_json(e.mu)}, {"sigma", DepthEngine::matrix_to_json(e.sigma)}});
  }
  j["estimates"] = est;
}

inline void from_json(const nlohmann::json& j, Treatment& t) {
  t.policy = j.at("policy").get<OutsiderPolicy>();
  t.class_sizes = j.at("class_sizes").get<std::vector<Index>>();
  t.means.clear();
  t.inverses.clear();
  for (const auto& m : j.at("means")) t.means.push_back(DepthEngine::vector_from_json(m));
  for (const auto& m : j.at("inverses")) t.inverses.push_back(DepthEngine::matrix_from_json(m));
  t.constants = j.at("constants").get<std::vector<double>>();
  if (t.policy.method == OutsiderMethod::lda || t.policy.method == OutsiderMethod::qda) {
    if (t.means.size() != t.class_sizes.size() || t.inverses.size() != t.means.size() || t.constants.size() != t.means.size()) {
      throw SchemaError("outsider treatment '" + t.policy.name + "': inconsistent sizes");
    }
  }
  if (t.policy.method == OutsiderMethod::knn) t.knn = j.at("knn").get<KnnModel>();
  if (t.policy.method == OutsiderMethod::knn_affine) {
    t.whitening = DepthEngine::matrix_from_json(j.at("whitening"));
    t.pair_knn = j.at("pair_knn").get<std::vector<KnnModel>>();
    t.pairs = j.at("pairs").get<std::vector<std::pair<int, int>>>();
  }
  t.estimates.clear();
  for (const auto& s : j.at("estimates")) {
    t.estimates.push_back(make_scatter(DepthEngine::vector_from_json(s.at("mu")), DepthEngine::matrix_from_json(s.at("sigma")),
                                       estimator_from_string(s.at("kind").get<std::string>())));
  }
}

}  // namespace depthcraft
