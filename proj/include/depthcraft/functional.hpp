#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "depthcraft/classifier.hpp"
#include "depthcraft/datamodel.hpp"
#include "depthcraft/outsiders.hpp"
#include "depthcraft/random.hpp"
#include "depthcraft/separators/common.hpp"

namespace depthcraft {

/// One observed function: strictly increasing arguments and their values.
struct Curve {
  std::vector<double> args;
  std::vector<double> vals;

  void validate(std::size_t index) const {
    const std::string where = "function " + std::to_string(index) + ": ";
    if (args.size() != vals.size()) throw ParameterError(where + "args and vals differ in length");
    if (args.size() < 2) throw ParameterError(where + "needs at least 2 points");
    for (std::size_t k = 0; k < args.size(); ++k) {
      if (!std::isfinite(args[k]) || !std::isfinite(vals[k])) throw ParameterError(where + "non-finite entry");
      if (k > 0 && !(args[k] > args[k - 1])) throw ParameterError(where + "args must be strictly increasing");
    }
  }
};

class FunctionalSample {
 public:
  FunctionalSample() = default;

  /// `labels` are 1-based; may be empty for unlabeled data.
  FunctionalSample(std::vector<Curve> curves, std::vector<int> labels = {}, std::vector<std::string> class_names = {})
      : curves_(std::move(curves)), labels_(std::move(labels)), class_names_(std::move(class_names)) {
    for (std::size_t i = 0; i < curves_.size(); ++i) curves_[i].validate(i);
    if (!labels_.empty() && labels_.size() != curves_.size()) throw ParameterError("functional sample: label count mismatch");
    int q = 0;
    for (int l : labels_) {
      if (l < 1) throw ParameterError("functional sample: labels must be positive");
      q = std::max(q, l);
    }
    if (class_names_.empty()) {
      for (int j = 1; j <= q; ++j) class_names_.push_back(std::to_string(j));
    }
  }

  const std::vector<Curve>& curves() const { return curves_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  std::size_t size() const { return curves_.size(); }
  bool labeled() const { return !labels_.empty(); }
  int num_classes() const { return static_cast<int>(class_names_.size()); }

  /// Smallest first argument; becomes the time origin.
  double origin() const {
    double o = std::numeric_limits<double>::infinity();
    for (const auto& c : curves_) o = std::min(o, c.args.front());
    return o;
  }

  /// Length of the common interval [0, T] after shifting to the origin.
  double horizon() const {
    double t = -std::numeric_limits<double>::infinity();
    for (const auto& c : curves_) t = std::max(t, c.args.back());
    return t - origin();
  }

  FunctionalSample subset(const std::vector<Index>& idx) const {
    std::vector<Curve> c;
    std::vector<int> l;
    for (Index i : idx) {
      c.push_back(curves_[static_cast<std::size_t>(i)]);
      if (labeled()) l.push_back(labels_[static_cast<std::size_t>(i)]);
    }
    FunctionalSample s;
    s.curves_ = std::move(c);
    s.labels_ = std::move(l);
    s.class_names_ = class_names_;
    return s;
  }

 private:
  std::vector<Curve> curves_;
  std::vector<int> labels_;
  std::vector<std::string> class_names_;
};

enum class Instance { average, values };

inline std::string to_string(Instance i) { return i == Instance::average ? "average" : "values"; }

inline Instance instance_from_string(const std::string& s) {
  if (s == "average" || s == "avr") return Instance::average;
  if (s == "values" || s == "val") return Instance::values;
  throw ParameterError("adc-instance: unknown value '" + s + "' (expected average or values)");
}

struct LSSpec {
  int L = 1;
  int S = 1;
  Instance instance = Instance::average;

  int dim() const { return L + S; }
  void validate() const {
    if (L < 0 || S < 0) throw ParameterError("num-fcn/num-der: interval counts must be non-negative");
    if (L + S < 2) throw ParameterError("num-fcn + num-der must be at least 2");
  }
  bool operator==(const LSSpec& o) const { return L == o.L && S == o.S && instance == o.instance; }
};

// ---- piecewise-linear interpolant ----

namespace detail {

/// Value of the interpolant with constant extension outside the arguments.
inline double curve_value(const std::vector<double>& a, const std::vector<double>& v, double t) {
  if (t <= a.front()) return v.front();
  if (t >= a.back()) return v.back();
  auto it = std::upper_bound(a.begin(), a.end(), t);
  std::size_t k = static_cast<std::size_t>(it - a.begin());
  double w = (t - a[k - 1]) / (a[k] - a[k - 1]);
  return v[k - 1] + w * (v[k] - v[k - 1]);
}

/// Slope of the interpolant at t (right derivative; 0 outside the arguments).
inline double curve_slope(const std::vector<double>& a, const std::vector<double>& v, double t) {
  if (t < a.front() || t >= a.back()) return 0.0;
  auto it = std::upper_bound(a.begin(), a.end(), t);
  std::size_t k = static_cast<std::size_t>(it - a.begin());
  return (v[k] - v[k - 1]) / (a[k] - a[k - 1]);
}

/// Exact integral of the interpolant over [lo, hi].
inline double curve_integral(const std::vector<double>& a, const std::vector<double>& v, double lo, double hi) {
  std::vector<double> knots{lo};
  auto first = std::upper_bound(a.begin(), a.end(), lo);
  for (auto it = first; it != a.end() && *it < hi; ++it) knots.push_back(*it);
  knots.push_back(hi);
  double total = 0.0;
  for (std::size_t k = 1; k < knots.size(); ++k) {
    double h = knots[k] - knots[k - 1];
    total += 0.5 * h * (curve_value(a, v, knots[k - 1]) + curve_value(a, v, knots[k]));
  }
  return total;
}

}  // namespace detail

/// LS-transform of one curve whose arguments are already shifted to the
/// common origin, on [0, T].
inline Vector ls_transform_curve(const Curve& c, double origin, double T, const LSSpec& spec) {
  spec.validate();
  if (!(T > 0.0)) throw ParameterError("functional data: the common interval has zero length");
  std::vector<double> a = c.args;
  for (double& t : a) t -= origin;
  const std::vector<double>& v = c.vals;
  Vector out(spec.dim());
  for (int l = 0; l < spec.L; ++l) {
    double lo = T * l / spec.L;
    double hi = T * (l + 1) / spec.L;
    out(l) = spec.instance == Instance::average ? detail::curve_integral(a, v, lo, hi)
                                                : detail::curve_value(a, v, 0.5 * (lo + hi));
  }
  for (int s = 0; s < spec.S; ++s) {
    double lo = T * s / spec.S;
    double hi = T * (s + 1) / spec.S;
    out(spec.L + s) = spec.instance == Instance::average
                          ? detail::curve_value(a, v, hi) - detail::curve_value(a, v, lo)
                          : detail::curve_slope(a, v, 0.5 * (lo + hi));
  }
  return out;
}

/// n x (L+S) matrix of LS features over [0, T] starting at `origin`.
inline DataMatrix ls_transform(const FunctionalSample& sample, const LSSpec& spec, double origin, double T) {
  Matrix x(static_cast<Index>(sample.size()), spec.dim());
  for (std::size_t i = 0; i < sample.size(); ++i) x.row(static_cast<Index>(i)) = ls_transform_curve(sample.curves()[i], origin, T, spec).transpose();
  return DataMatrix(std::move(x));
}

inline DataMatrix ls_transform(const FunctionalSample& sample, const LSSpec& spec) {
  return ls_transform(sample, spec, sample.origin(), sample.horizon());
}

// ---- Vapnik-Chervonenkis bound ----

/// log of sum_{k=0}^{m} C(N, k), with the sum clamped to 2^N when m >= N.
inline double log_binomial_sum(Index N, Index m) {
  if (m >= N) return static_cast<double>(N) * std::numbers::ln2;
  double top = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  for (Index k = 0; k <= m; ++k) {
    double t = std::lgamma(static_cast<double>(N) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
               std::lgamma(static_cast<double>(N - k) + 1.0);
    terms.push_back(t);
    top = std::max(top, t);
  }
  double s = 0.0;
  for (double t : terms) s += std::exp(t - top);
  return top + std::log(s);
}

/// eps + sqrt((ln(2 sum_{k<dim} C(n-1, k)) - ln eta) / (2n)) with eta = 1/n.
inline double vc_bound_value(double eps, Index n, int dim) {
  double log_sum = log_binomial_sum(n - 1, dim - 1);
  double eta = 1.0 / static_cast<double>(n);
  return eps + std::sqrt((std::numbers::ln2 + log_sum - std::log(eta)) / (2.0 * static_cast<double>(n)));
}

/// Empirical risk of LDA on the data; 1 if LDA cannot be fitted.
inline double lda_training_error(const LabeledSample& s) {
  try {
    Treatment t = train_treatment(OutsiderPolicy::of(OutsiderMethod::lda), s);
    Rng rng(0);
    Index wrong = 0;
    for (Index i = 0; i < s.size(); ++i) {
      if (t.classify(s.data().row(i), rng) != s.labels()[static_cast<std::size_t>(i)] - 1) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(s.size());
  } catch (const DegenerateDataError&) {
    return 1.0;
  }
}

inline double vc_bound(const FunctionalSample& sample, const LSSpec& spec) {
  if (sample.num_classes() != 2) throw ParameterError("VC bound needs exactly 2 classes");
  DataMatrix x = ls_transform(sample, spec);
  LabeledSample s(x, sample.labels(), sample.class_names());
  return vc_bound_value(lda_training_error(s), static_cast<Index>(sample.size()), spec.dim());
}

// ---- multivariate stage ----

enum class FunctionalClassifier { ddalpha, maxdepth, knn_affine, lda, qda };

inline std::string to_string(FunctionalClassifier c) {
  switch (c) {
    case FunctionalClassifier::ddalpha: return "ddalpha";
    case FunctionalClassifier::maxdepth: return "maxdepth";
    case FunctionalClassifier::knn_affine: return "knn-affine";
    case FunctionalClassifier::lda: return "lda";
    case FunctionalClassifier::qda: return "qda";
  }
  return "?";
}

inline FunctionalClassifier functional_classifier_from_string(const std::string& s) {
  for (auto c : {FunctionalClassifier::ddalpha, FunctionalClassifier::maxdepth, FunctionalClassifier::knn_affine,
                 FunctionalClassifier::lda, FunctionalClassifier::qda}) {
    if (to_string(c) == s) return c;
  }
  throw ParameterError("classifier-type: unknown classifier '" + s + "' (expected ddalpha, maxdepth, knn-affine, lda or qda)");
}

/// Classifier trained on LS features: a depth-based model or a plain treatment.
struct MultivariateModel {
  FunctionalClassifier kind = FunctionalClassifier::ddalpha;
  std::optional<TrainedModel> depth_model;
  std::optional<Treatment> plain;
  std::uint64_t seed = 0;

  std::vector<int> predict(const DataMatrix& x) const {
    if (depth_model) return classify(*depth_model, x).classes;
    std::vector<int> out;
    for (Index i = 0; i < x.rows(); ++i) {
      Vector z = x.row(i);
      Rng rng(point_seed(seed, z));
      out.push_back(plain->classify(z, rng));
    }
    return out;
  }
};

inline MultivariateModel train_multivariate(const LabeledSample& s, FunctionalClassifier kind, const TrainConfig& base) {
  MultivariateModel m;
  m.kind = kind;
  m.seed = base.seed;
  switch (kind) {
    case FunctionalClassifier::ddalpha:
    case FunctionalClassifier::maxdepth: {
      TrainConfig cfg = base;
      cfg.separator.kind = kind == FunctionalClassifier::ddalpha ? SeparatorKind::alpha : SeparatorKind::maxdepth;
      m.depth_model = train(s, cfg);
      break;
    }
    case FunctionalClassifier::knn_affine: m.plain = train_treatment(OutsiderPolicy::of(OutsiderMethod::knn_affine), s); break;
    case FunctionalClassifier::lda: m.plain = train_treatment(OutsiderPolicy::of(OutsiderMethod::lda), s); break;
    case FunctionalClassifier::qda: m.plain = train_treatment(OutsiderPolicy::of(OutsiderMethod::qda), s); break;
  }
  return m;
}

struct FunctionalConfig {
  std::vector<LSSpec> candidates;  // empty: every (L, S) up to max_dimension
  int max_dimension = 0;           // 0: min(25, ceil(median curve length / 2))
  Instance instance = Instance::average;
  bool complete_cv = false;
  double keep_fraction = 0.3;
  int min_keep = 3;
  int folds = 10;
  FunctionalClassifier classifier = FunctionalClassifier::ddalpha;
  TrainConfig multivariate = [] {
    TrainConfig c;
    c.depth = DepthSpec::of(DepthNotion::spatial);
    return c;
  }();
  std::uint64_t seed = 0;
};

struct CandidateResult {
  LSSpec spec;
  double vc = std::numeric_limits<double>::quiet_NaN();
  double cv_error = std::numeric_limits<double>::quiet_NaN();  // NaN if not cross-validated
};

struct FunctionalModel {
  LSSpec spec;
  double origin = 0.0;
  double horizon = 1.0;
  std::vector<std::string> class_names;
  MultivariateModel classifier;
  std::vector<CandidateResult> candidates;
  double cv_error = std::numeric_limits<double>::quiet_NaN();
};

/// Candidates with L, S >= 0 and 2 <= L + S <= max_dim, ordered by L + S then S.
inline std::vector<LSSpec> enumerate_candidates(int max_dim, Instance instance) {
  std::vector<LSSpec> out;
  for (int total = 2; total <= max_dim; ++total) {
    for (int s = 0; s <= total; ++s) out.push_back({total - s, s, instance});
  }
  return out;
}

inline int default_max_dimension(const FunctionalSample& sample) {
  std::vector<std::size_t> len;
  for (const auto& c : sample.curves()) len.push_back(c.args.size());
  std::sort(len.begin(), len.end());
  double med = len.size() % 2 == 1 ? static_cast<double>(len[len.size() / 2])
                                   : 0.5 * static_cast<double>(len[len.size() / 2 - 1] + len[len.size() / 2]);
  return std::max(2, std::min(25, static_cast<int>(std::ceil(med / 2.0))));
}

/// Stratified k-fold error of the multivariate classifier on one LS candidate.
/// Candidates whose classifier cannot be fitted get error 1.
inline double functional_cv_error(const FunctionalSample& sample, const LSSpec& spec, const FunctionalConfig& cfg) {
  const double origin = sample.origin();
  const double T = sample.horizon();
  DataMatrix x = ls_transform(sample, spec, origin, T);
  const Index n = static_cast<Index>(sample.size());
  int k = std::min<int>(cfg.folds, static_cast<int>(n));
  std::vector<int> fold = stratified_folds(sample.labels(), k, cfg.seed);
  Index wrong = 0;
  for (int f = 0; f < k; ++f) {
    std::vector<Index> tr, te;
    for (Index i = 0; i < n; ++i) (fold[static_cast<std::size_t>(i)] == f ? te : tr).push_back(i);
    if (te.empty()) continue;
    try {
      LabeledSample train_s(x.select(tr), pick(sample.labels(), tr), sample.class_names());
      MultivariateModel m = train_multivariate(train_s, cfg.classifier, cfg.multivariate);
      std::vector<int> pred = m.predict(x.select(te));
      for (std::size_t t = 0; t < te.size(); ++t) {
        if (pred[t] != sample.labels()[static_cast<std::size_t>(te[t])] - 1) ++wrong;
      }
    } catch (const Error&) {
      return 1.0;
    }
  }
  return static_cast<double>(wrong) / static_cast<double>(n);
}

/// Selects (L, S) by complete or VC-reduced cross-validation and trains the
/// final classifier on the winning transform.
inline FunctionalModel train_functional(const FunctionalSample& sample, const FunctionalConfig& cfg) {
  if (!sample.labeled()) throw ParameterError("functional training needs labels");
  if (sample.num_classes() < 2) throw ParameterError("functional training needs at least 2 classes");
  std::vector<LSSpec> cands = cfg.candidates;
  if (cands.empty()) {
    int max_dim = cfg.max_dimension > 0 ? cfg.max_dimension : default_max_dimension(sample);
    cands = enumerate_candidates(max_dim, cfg.instance);
  }
  if (cands.empty()) throw ParameterError("max-num-intervals: no (L, S) candidates to choose from");
  for (const auto& c : cands) c.validate();

  FunctionalModel model;
  model.origin = sample.origin();
  model.horizon = sample.horizon();
  model.class_names = sample.class_names();
  for (const auto& c : cands) model.candidates.push_back({c});

  std::vector<std::size_t> evaluate;
  if (cands.size() == 1) {
    evaluate = {};
  } else if (cfg.complete_cv || sample.num_classes() != 2) {
    for (std::size_t i = 0; i < cands.size(); ++i) evaluate.push_back(i);
  } else {
    for (auto& c : model.candidates) c.vc = vc_bound(sample, c.spec);
    std::vector<std::size_t> order(cands.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return model.candidates[a].vc < model.candidates[b].vc; });
    std::size_t keep = static_cast<std::size_t>(std::ceil(cfg.keep_fraction * static_cast<double>(cands.size())));
    keep = std::min(cands.size(), std::max<std::size_t>(keep, static_cast<std::size_t>(cfg.min_keep)));
    evaluate.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
    std::sort(evaluate.begin(), evaluate.end());
  }
  std::size_t best = 0;
  if (!evaluate.empty()) {
    for (std::size_t i : evaluate) model.candidates[i].cv_error = functional_cv_error(sample, cands[i], cfg);
    best = evaluate.front();
    for (std::size_t i : evaluate) {
      const auto& a = model.candidates[i];
      const auto& b = model.candidates[best];
      if (a.cv_error < b.cv_error ||
          (a.cv_error == b.cv_error && (a.spec.dim() < b.spec.dim() || (a.spec.dim() == b.spec.dim() && a.spec.S < b.spec.S)))) {
        best = i;
      }
    }
  }
  model.spec = cands[best];
  model.cv_error = model.candidates[best].cv_error;
  DataMatrix x = ls_transform(sample, model.spec, model.origin, model.horizon);
  model.classifier = train_multivariate(LabeledSample(x, sample.labels(), sample.class_names()), cfg.classifier, cfg.multivariate);
  return model;
}

struct FunctionalPrediction {
  std::vector<int> classes;
  bool extended = false;  // some function reaches beyond the training interval
};

inline FunctionalPrediction classify_functional(const FunctionalModel& m, const FunctionalSample& curves) {
  FunctionalPrediction out;
  if (curves.size() == 0) return out;
  for (const auto& c : curves.curves()) {
    if (c.args.front() < m.origin || c.args.back() > m.origin + m.horizon) out.extended = true;
  }
  out.classes = m.classifier.predict(ls_transform(curves, m.spec, m.origin, m.horizon));
  return out;
}

// ---- file formats ----

/// Parses a JSON list of {"args": [...], "vals": [...], "label": ...}. Labels
/// are mapped to 1..q in order of first occurrence.
inline FunctionalSample parse_functional_json(const nlohmann::json& j) {
  if (!j.is_array()) throw FormatError("functional data: expected a JSON list of observations");
  std::vector<Curve> curves;
  std::vector<int> labels;
  std::vector<std::string> names;
  std::map<std::string, int> remap;
  bool any_label = false;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& o = j[i];
    try {
      Curve c{o.at("args").get<std::vector<double>>(), o.at("vals").get<std::vector<double>>()};
      curves.push_back(std::move(c));
      if (o.contains("label") && !o.at("label").is_null()) {
        any_label = true;
        const auto& l = o.at("label");
        std::string key = l.is_string() ? l.get<std::string>() : l.dump();
        auto [it, inserted] = remap.emplace(key, static_cast<int>(names.size()) + 1);
        if (inserted) names.push_back(key);
        labels.push_back(it->second);
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("functional data: observation " + std::to_string(i) + ": " + e.what());
    }
  }
  if (any_label && labels.size() != curves.size()) throw FormatError("functional data: some observations lack a label");
  return FunctionalSample(std::move(curves), std::move(labels), std::move(names));
}

inline FunctionalSample load_functional_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
  return parse_functional_json(j);
}

inline nlohmann::json functional_to_json(const FunctionalSample& s) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    nlohmann::json o{{"args", s.curves()[i].args}, {"vals", s.curves()[i].vals}};
    if (s.labeled()) o["label"] = s.class_names()[static_cast<std::size_t>(s.labels()[i] - 1)];
    out.push_back(std::move(o));
  }
  return out;
}

inline nlohmann::json functional_model_to_json(const FunctionalModel& m) {
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& c : m.candidates) {
    cands.push_back({{"L", c.spec.L},
                     {"S", c.spec.S},
                     {"vc", std::isnan(c.vc) ? nlohmann::json(nullptr) : nlohmann::json(c.vc)},
                     {"cv_error", std::isnan(c.cv_error) ? nlohmann::json(nullptr) : nlohmann::json(c.cv_error)}});
  }
  nlohmann::json clf{{"kind", to_string(m.classifier.kind)}, {"seed", m.classifier.seed}};
  if (m.classifier.depth_model) clf["model"] = model_to_json(*m.classifier.depth_model);
  if (m.classifier.plain) clf["treatment"] = *m.classifier.plain;
  return {{"format_version", kModelFormatVersion},
          {"kind", "functional"},
          {"ls", {{"L", m.spec.L}, {"S", m.spec.S}, {"instance", to_string(m.spec.instance)}}},
          {"origin", m.origin},
          {"horizon", m.horizon},
          {"label_map", m.class_names},
          {"cv_error", std::isnan(m.cv_error) ? nlohmann::json(nullptr) : nlohmann::json(m.cv_error)},
          {"candidates", cands},
          {"classifier", clf}};
}

inline FunctionalModel functional_model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("format_version")) throw SchemaError("functional model: missing format_version");
  int version = j.at("format_version").get<int>();
  if (version != kModelFormatVersion) {
    throw MigrationError("functional model has format version " + std::to_string(version) + ", this build reads version " +
                         std::to_string(kModelFormatVersion));
  }
  try {
    if (j.at("kind").get<std::string>() != "functional") throw SchemaError("not a functional model file");
    FunctionalModel m;
    const auto& ls = j.at("ls");
    m.spec = {ls.at("L").get<int>(), ls.at("S").get<int>(), instance_from_string(ls.at("instance").get<std::string>())};
    m.spec.validate();
    m.origin = j.at("origin").get<double>();
    m.horizon = j.at("horizon").get<double>();
    m.class_names = j.at("label_map").get<std::vector<std::string>>();
    if (!j.at("cv_error").is_null()) m.cv_error = j.at("cv_error").get<double>();
    for (const auto& c : j.at("candidates")) {
      CandidateResult r;
      r.spec = {c.at("L").get<int>(), c.at("S").get<int>(), m.spec.instance};
      if (!c.at("vc").is_null()) r.vc = c.at("vc").get<double>();
      if (!c.at("cv_error").is_null()) r.cv_error = c.at("cv_error").get<double>();
      m.candidates.push_back(r);
    }
    const auto& clf = j.at("classifier");
    m.classifier.kind = functional_classifier_from_string(clf.at("kind").get<std::string>());
    m.classifier.seed = clf.at("seed").get<std::uint64_t>();
    if (clf.contains("model")) m.classifier.depth_model = model_from_json(clf.at("model"));
    if (clf.contains("treatment")) m.classifier.plain = clf.at("treatment").get<Treatment>();
    if (!m.classifier.depth_model && !m.classifier.plain) throw SchemaError("functional model: no classifier");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("functional model: ") + e.what());
  }
}

// ---- generator ----

struct FunctionalGeneratorSpec {
  Index points = 51;     // grid points per curve on [0, 1]
  double shift = 0.03;   // phase shift of class 2
  double offset_sd = 0.5;
  double noise_sd = 0.4;
  std::uint64_t seed = 0;
};

/// Two classes of noisy sine curves: class 2 is phase-shifted; every curve
/// gets a random vertical offset and amplitude.
inline FunctionalSample generate_functional(const FunctionalGeneratorSpec& spec, Index n_per_class) {
  if (spec.points < 2 || n_per_class < 1) throw ParameterError("functional generator: need points >= 2 and n >= 1");
  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Curve> curves;
  std::vector<int> labels;
  for (int cls = 1; cls <= 2; ++cls) {
    for (Index i = 0; i < n_per_class; ++i) {
      Curve c;
      double offset = spec.offset_sd * normal(rng);
      double amp = 1.0 + 0.2 * normal(rng);
      double phase = cls == 2 ? spec.shift : 0.0;
      for (Index k = 0; k < spec.points; ++k) {
        double t = static_cast<double>(k) / static_cast<double>(spec.points - 1);
        c.args.push_back(t);
        c.vals.push_back(offset + amp * std::sin(2.0 * std::numbers::pi * (t - phase)) + spec.noise_sd * normal(rng));
      }
      curves.push_back(std::move(c));
      labels.push_back(cls);
    }
  }
  return FunctionalSample(std::move(curves), std::move(labels));
}

}  // namespace depthcraft
