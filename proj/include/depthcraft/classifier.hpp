#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "depthcraft/datamodel.hpp"
#include "depthcraft/depth/engine.hpp"
#include "depthcraft/outsiders.hpp"
#include "depthcraft/parallel.hpp"
#include "depthcraft/separators/alpha.hpp"
#include "depthcraft/separators/knn.hpp"
#include "depthcraft/separators/maxdepth.hpp"
#include "depthcraft/separators/polynomial.hpp"

namespace depthcraft {

inline constexpr int kModelFormatVersion = 1;

enum class SeparatorKind { alpha, polynomial, knn, maxdepth, dknn };
enum class Aggregation { majority, sequent, none };

inline std::string to_string(SeparatorKind k) {
  switch (k) {
    case SeparatorKind::alpha: return "alpha";
    case SeparatorKind::polynomial: return "polynomial";
    case SeparatorKind::knn: return "knn";
    case SeparatorKind::maxdepth: return "maxdepth";
    case SeparatorKind::dknn: return "dknn";
  }
  return "?";
}

inline SeparatorKind separator_from_string(const std::string& s) {
  for (auto k : {SeparatorKind::alpha, SeparatorKind::polynomial, SeparatorKind::knn, SeparatorKind::maxdepth, SeparatorKind::dknn}) {
    if (to_string(k) == s) return k;
  }
  throw ParameterError("separator: unknown separator '" + s + "' (expected alpha, polynomial, knn, maxdepth or dknn)");
}

inline std::string to_string(Aggregation a) {
  switch (a) {
    case Aggregation::majority: return "majority";
    case Aggregation::sequent: return "sequent";
    case Aggregation::none: return "none";
  }
  return "?";
}

inline Aggregation aggregation_from_string(const std::string& s) {
  if (s == "majority") return Aggregation::majority;
  if (s == "sequent") return Aggregation::sequent;
  if (s == "none") return Aggregation::none;
  throw ParameterError("aggregation: unknown method '" + s + "' (expected majority, sequent or none)");
}

/// Binary separators need an aggregation scheme; the others are multiclass.
inline bool is_binary(SeparatorKind k) { return k == SeparatorKind::alpha || k == SeparatorKind::polynomial; }

struct SeparatorSpec {
  SeparatorKind kind = SeparatorKind::alpha;
  int max_degree = 3;
  int folds = 10;
  Index k_max = 0;  // knn, dknn; 0 = default
  PolynomialOptions polynomial;
};

struct TrainConfig {
  DepthSpec depth = DepthSpec::of(DepthNotion::halfspace);
  SeparatorSpec separator;
  Aggregation aggregation = Aggregation::majority;
  std::vector<OutsiderPolicy> outsiders{OutsiderPolicy::of(OutsiderMethod::lda)};
  bool use_convex = false;
  std::uint64_t seed = 0;
};

/// One binary decision: positive score votes for `first`, otherwise for
/// `second` (-1 means "every other class").
struct BinarySeparator {
  int first = 0;
  int second = 1;
  SeparatorKind kind = SeparatorKind::alpha;
  AlphaModel alpha;
  PolynomialModel polynomial;

  double score(const Vector& depth_row) const {
    if (kind == SeparatorKind::alpha) return alpha.score(depth_row);
    Vector dd(2);
    dd << depth_row(first), depth_row(second);
    return polynomial.score(dd);
  }
};

/// Outcome of classification: 0-based class per point or kIgnored.
struct Prediction {
  std::vector<int> classes;
  std::vector<bool> outsider;

  Index outsiders() const { return std::count(outsider.begin(), outsider.end(), true); }
};

class TrainedModel {
 public:
  TrainConfig config;
  std::vector<std::string> class_names;
  std::vector<Index> cardinalities;
  std::optional<DepthEngine> engine;  // empty for models trained on a given depth space
  std::vector<BinarySeparator> binaries;
  KnnModel knn;
  DknnModel dknn;
  std::vector<Treatment> treatments;

  int num_classes() const { return static_cast<int>(class_names.size()); }
  bool ddplot_only() const { return !engine.has_value(); }
  Aggregation aggregation() const { return is_binary(config.separator.kind) ? config.aggregation : Aggregation::none; }

  std::string label(int cls) const {
    return cls == kIgnored ? std::string("Ignored") : class_names.at(static_cast<std::size_t>(cls));
  }

  const Treatment& treatment(const std::string& name) const {
    if (name.empty()) return treatments.front();
    for (const auto& t : treatments) {
      if (t.policy.name == name) return t;
    }
    throw ParameterError("outsider-method: no trained outsider treatment named '" + name + "'");
  }

  /// Decision of the separator(s) for a non-outsider point.
  int decide(const Vector& z, const Vector& depth_row, Rng& rng) const {
    const int q = num_classes();
    switch (config.separator.kind) {
      case SeparatorKind::maxdepth: return classify_maxdepth(depth_row, rng);
      case SeparatorKind::knn: return knn.classify(depth_row);
      case SeparatorKind::dknn: return dknn.classify(z, rng);
      default: break;
    }
    std::vector<Index> votes(static_cast<std::size_t>(q), 0);
    for (const auto& b : binaries) {
      bool positive = b.score(depth_row) > 0.0;
      if (positive) {
        ++votes[static_cast<std::size_t>(b.first)];
      } else if (b.second >= 0) {
        ++votes[static_cast<std::size_t>(b.second)];
      } else {
        for (int c = 0; c < q; ++c) {
          if (c != b.first) ++votes[static_cast<std::size_t>(c)];
        }
      }
    }
    return vote_winner(votes, cardinalities);
  }

  /// Classifies one point given its depth row; z is the point itself (the
  /// depth row again for depth-space models).
  int classify_one(const Vector& z, const Vector& depth_row, const Treatment& treat, bool& is_outsider) const {
    Rng rng(point_seed(config.seed, z));
    if (config.use_convex && engine) {
      std::vector<DataMatrix> cls;
      for (int j = 0; j < engine->num_classes(); ++j) cls.push_back(engine->class_data(j));
      is_outsider = outside_all_hulls(z, cls);
    } else {
      is_outsider = depth_row.maxCoeff() < 1e-12;
    }
    if (is_outsider) return treat.classify(z, rng);
    return decide(z, depth_row, rng);
  }
};

namespace detail {

inline std::vector<int> zero_based(const std::vector<int>& labels) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(l - 1);
  return out;
}

inline void train_separators(TrainedModel& m, const Matrix& depths, const std::vector<int>& cls,
                             const LabeledSample* sample) {
  const TrainConfig& cfg = m.config;
  const int q = m.num_classes();
  const SeparatorSpec& sp = cfg.separator;
  if (!is_binary(sp.kind)) {
    if (sp.kind == SeparatorKind::knn) m.knn = train_knn(depths, cls, q, sp.k_max);
    if (sp.kind == SeparatorKind::dknn) {
      if (!sample) throw UnsupportedError("dknn separator needs the original sample, not a depth space");
      m.dknn = train_dknn(*sample, cfg.depth, sp.k_max, cfg.seed);
    }
    return;
  }
  if (cfg.aggregation == Aggregation::none) {
    throw ParameterError("aggregation: separator '" + to_string(sp.kind) + "' is binary and needs majority or sequent");
  }
  auto train_pair = [&](int first, int second) {
    std::vector<Index> rows;
    std::vector<int> y;
    for (std::size_t i = 0; i < cls.size(); ++i) {
      if (cls[i] == first) {
        rows.push_back(static_cast<Index>(i));
        y.push_back(1);
      } else if (second < 0 || cls[i] == second) {
        rows.push_back(static_cast<Index>(i));
        y.push_back(-1);
      }
    }
    BinarySeparator b;
    b.first = first;
    b.second = second;
    b.kind = sp.kind;
    Matrix sub = pick_rows(depths, rows);
    if (sp.kind == SeparatorKind::alpha) {
      b.alpha = train_alpha_cv(sub, y, sp.max_degree, sp.folds, cfg.seed);
    } else {
      if (second < 0) throw UnsupportedError("polynomial separator works on pairs of classes; use majority aggregation");
      Matrix dd(sub.rows(), 2);
      dd.col(0) = sub.col(first);
      dd.col(1) = sub.col(second);
      PolynomialOptions opt = sp.polynomial;
      opt.max_degree = sp.max_degree;
      opt.folds = sp.folds;
      b.polynomial = train_polynomial(dd, y, opt, cfg.seed);
    }
    m.binaries.push_back(std::move(b));
  };
  if (q == 2) {
    train_pair(0, 1);
  } else if (cfg.aggregation == Aggregation::majority) {
    for (int a = 0; a < q; ++a) {
      for (int b = a + 1; b < q; ++b) train_pair(a, b);
    }
  } else {
    for (int a = 0; a < q; ++a) train_pair(a, -1);
  }
}

}  // namespace detail

/// Trains the full classifier: depth space, separator(s), outsider treatments.
inline TrainedModel train(const LabeledSample& sample, const TrainConfig& config) {
  if (sample.num_classes() < 2) throw ParameterError("training needs at least 2 classes");
  if (config.outsiders.empty()) throw ParameterError("outsider-method: at least one outsider treatment is required");
  TrainedModel m;
  m.config = config;
  m.config.depth.seed = config.seed;
  m.class_names = sample.class_names();
  m.cardinalities = sample.cardinalities();
  m.engine.emplace(sample, m.config.depth);
  DepthSpace ds = m.engine->depth_space(sample);
  detail::train_separators(m, ds.depths, detail::zero_based(sample.labels()), &sample);
  for (const auto& p : config.outsiders) m.treatments.push_back(train_treatment(p, sample));
  return m;
}

/// Trains on a given depth space. Points cannot be classified afterwards,
/// only depth rows; outsider treatments work on the depth rows themselves.
inline TrainedModel train_ddplot(const DepthSpace& space, const std::vector<std::string>& class_names, const TrainConfig& config) {
  if (space.labels.size() != static_cast<std::size_t>(space.rows())) throw ParameterError("depth space: labels required");
  TrainedModel m;
  m.config = config;
  m.config.use_convex = false;
  LabeledSample as_sample(DataMatrix(space.depths), space.labels, class_names);
  if (as_sample.num_classes() != space.classes()) throw ParameterError("depth space: label count differs from column count");
  m.class_names = as_sample.class_names();
  m.cardinalities = as_sample.cardinalities();
  detail::train_separators(m, space.depths, detail::zero_based(space.labels), nullptr);
  for (const auto& p : config.outsiders) m.treatments.push_back(train_treatment(p, as_sample));
  return m;
}

/// Classifies the rows of `points`; outsiders go to the named treatment (the
/// first one if the name is empty).
inline Prediction classify(const TrainedModel& m, const DataMatrix& points, const std::string& policy = "") {
  if (m.ddplot_only()) throw UnsupportedError("model was trained on a depth space; only depth rows can be classified");
  const Treatment& treat = m.treatment(policy);
  if (!points.empty() && points.cols() != m.engine->dim()) {
    throw ParameterError("points have dimension " + std::to_string(points.cols()) + ", model expects " +
                         std::to_string(m.engine->dim()));
  }
  Prediction out;
  out.classes.assign(static_cast<std::size_t>(points.rows()), 0);
  std::vector<char> flag(static_cast<std::size_t>(points.rows()), 0);
  parallel_for(static_cast<std::size_t>(points.rows()), [&](std::size_t i) {
    Vector z = points.row(static_cast<Index>(i));
    bool o = false;
    out.classes[i] = m.classify_one(z, m.engine->depths(z), treat, o);
    flag[i] = o ? 1 : 0;
  });
  out.outsider.assign(flag.begin(), flag.end());
  return out;
}

/// Classifies rows of a depth space (for depth-space models).
inline Prediction classify_depths(const TrainedModel& m, const Matrix& depths, const std::string& policy = "") {
  if (m.config.separator.kind == SeparatorKind::dknn) throw UnsupportedError("dknn needs points, not depth rows");
  const Treatment& treat = m.treatment(policy);
  Prediction out;
  for (Index i = 0; i < depths.rows(); ++i) {
    Vector row = depths.row(i).transpose();
    bool o = false;
    out.classes.push_back(m.classify_one(row, row, treat, o));
    out.outsider.push_back(o);
  }
  return out;
}

inline std::vector<std::string> labels_of(const TrainedModel& m, const Prediction& p) {
  std::vector<std::string> out;
  for (int c : p.classes) out.push_back(m.label(c));
  return out;
}

// ---- serialization ----

inline nlohmann::json model_to_json(const TrainedModel& m) {
  using nlohmann::json;
  json classes{{"names", m.class_names}, {"cardinalities", m.cardinalities}};
  classes["engine"] = m.engine ? m.engine->to_json() : json(nullptr);

  const SeparatorSpec& sp = m.config.separator;
  json seps{{"kind", to_string(sp.kind)},
            {"aggregation", to_string(m.aggregation())},
            {"max_degree", sp.max_degree},
            {"folds", sp.folds},
            {"k_max", sp.k_max},
            {"polynomial_starts", sp.polynomial.starts},
            {"polynomial_smoothing", sp.polynomial.smoothing},
            {"polynomial_iterations", sp.polynomial.iterations},
            {"seed", m.config.seed}};
  json bins = json::array();
  for (const auto& b : m.binaries) {
    json e{{"first", b.first}, {"second", b.second}};
    if (b.kind == SeparatorKind::alpha) {
      e["alpha"] = b.alpha;
    } else {
      e["polynomial"] = b.polynomial;
    }
    bins.push_back(std::move(e));
  }
  seps["binary"] = bins;
  if (sp.kind == SeparatorKind::knn) seps["knn"] = m.knn;
  if (sp.kind == SeparatorKind::dknn) seps["dknn"] = {{"k", m.dknn.k}, {"cv_errors", m.dknn.cv_errors}};

  json outs{{"use_convex", m.config.use_convex}, {"treatments", m.treatments}};
  return json{{"format_version", kModelFormatVersion},
              {"depth_spec", m.config.depth},
              {"classes", classes},
              {"separators", seps},
              {"outsiders", outs},
              {"label_map", m.class_names}};
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("format_version")) throw SchemaError("model file: missing format_version");
  if (!j.at("format_version").is_number_integer()) throw SchemaError("model file: format_version must be an integer");
  int version = j.at("format_version").get<int>();
  if (version > kModelFormatVersion) {
    throw MigrationError("model file has format version " + std::to_string(version) + " but this build reads version " +
                         std::to_string(kModelFormatVersion) + "; upgrade depthcraft to load it");
  }
  if (version < kModelFormatVersion) {
    throw MigrationError("model file has obsolete format version " + std::to_string(version) +
                         " and no migration is available; retrain the model");
  }
  try {
    TrainedModel m;
    m.config.depth = j.at("depth_spec").get<DepthSpec>();
    const auto& classes = j.at("classes");
    m.class_names = classes.at("names").get<std::vector<std::string>>();
    m.cardinalities = classes.at("cardinalities").get<std::vector<Index>>();
    if (m.class_names.size() != m.cardinalities.size() || m.class_names.size() < 2) {
      throw SchemaError("model file: class table is inconsistent");
    }
    if (j.at("label_map").get<std::vector<std::string>>() != m.class_names) throw SchemaError("model file: label_map differs from classes");
    if (!classes.at("engine").is_null()) m.engine = DepthEngine::from_json(classes.at("engine"));
    if (m.engine && m.engine->num_classes() != m.num_classes()) throw SchemaError("model file: depth statistics do not match classes");

    const auto& seps = j.at("separators");
    SeparatorSpec& sp = m.config.separator;
    sp.kind = separator_from_string(seps.at("kind").get<std::string>());
    m.config.aggregation = aggregation_from_string(seps.at("aggregation").get<std::string>());
    sp.max_degree = seps.at("max_degree").get<int>();
    sp.folds = seps.at("folds").get<int>();
    sp.k_max = seps.at("k_max").get<Index>();
    sp.polynomial.starts = seps.at("polynomial_starts").get<int>();
    sp.polynomial.smoothing = seps.at("polynomial_smoothing").get<double>();
    sp.polynomial.iterations = seps.at("polynomial_iterations").get<int>();
    m.config.seed = seps.at("seed").get<std::uint64_t>();
    const int q = m.num_classes();
    for (const auto& e : seps.at("binary")) {
      BinarySeparator b;
      b.first = e.at("first").get<int>();
      b.second = e.at("second").get<int>();
      b.kind = sp.kind;
      if (b.first < 0 || b.first >= q || b.second >= q || b.second < -1) throw SchemaError("model file: separator class out of range");
      if (sp.kind == SeparatorKind::alpha) {
        b.alpha = e.at("alpha").get<AlphaModel>();
        if (b.alpha.dims != q) throw SchemaError("model file: alpha separator dimension mismatch");
      } else if (sp.kind == SeparatorKind::polynomial) {
        b.polynomial = e.at("polynomial").get<PolynomialModel>();
      } else {
        throw SchemaError("model file: binary separator for a multiclass rule");
      }
      m.binaries.push_back(std::move(b));
    }
    if (is_binary(sp.kind)) {
      std::size_t expected = q == 2 ? 1 : (m.config.aggregation == Aggregation::majority ? static_cast<std::size_t>(q * (q - 1) / 2)
                                                                                        : static_cast<std::size_t>(q));
      if (m.binaries.size() != expected) throw SchemaError("model file: wrong number of binary separators");
    }
    if (sp.kind == SeparatorKind::knn) m.knn = seps.at("knn").get<KnnModel>();
    if (sp.kind == SeparatorKind::dknn) {
      if (!m.engine) throw SchemaError("model file: dknn model without training data");
      m.dknn.k = seps.at("dknn").at("k").get<Index>();
      m.dknn.cv_errors = seps.at("dknn").at("cv_errors").get<std::vector<double>>();
      m.dknn.spec = m.config.depth;
      std::vector<Index> sizes;
      Index n = 0;
      for (int c = 0; c < q; ++c) n += m.engine->class_data(c).rows();
      Matrix all(n, m.engine->dim());
      std::vector<int> labels;
      Index r = 0;
      for (int c = 0; c < q; ++c) {
        const Matrix& x = m.engine->class_data(c).values();
        all.middleRows(r, x.rows()) = x;
        r += x.rows();
        labels.insert(labels.end(), static_cast<std::size_t>(x.rows()), c + 1);
      }
      m.dknn.sample = LabeledSample(DataMatrix(all), labels, m.class_names);
    }

    const auto& outs = j.at("outsiders");
    m.config.use_convex = outs.at("use_convex").get<bool>();
    m.treatments = outs.at("treatments").get<std::vector<Treatment>>();
    if (m.treatments.empty()) throw SchemaError("model file: no outsider treatments");
    m.config.outsiders.clear();
    for (const auto& t : m.treatments) {
      if (t.num_classes() != q) throw SchemaError("model file: outsider treatment class count mismatch");
      m.config.outsiders.push_back(t.policy);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("model file: ") + e.what());
  }
}

inline std::string model_to_string(const TrainedModel& m) { return model_to_json(m).dump(1) + "\n"; }

inline void save_model(const TrainedModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write model file '" + path + "'");
  out << model_to_string(m);
  if (!out) throw ParameterError("failed writing model file '" + path + "'");
}

inline TrainedModel load_model_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("model file is not valid JSON: ") + e.what());
  }
  return model_from_json(j);
}

inline TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_model_from_string(ss.str());
}

}  // namespace depthcraft
