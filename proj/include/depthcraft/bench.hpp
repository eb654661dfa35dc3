#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "depthcraft/classifier.hpp"
#include "depthcraft/datamodel.hpp"
#include "depthcraft/depth/engine.hpp"
#include "depthcraft/depth/zonoid.hpp"
#include "depthcraft/separators/maxdepth.hpp"

namespace depthcraft {

/// Error accounting of one test run. Ignored outsiders are not part of the
/// error denominator: error = incorrect / (correct + incorrect).
struct TestReport {
  Index correct = 0;
  Index incorrect = 0;
  Index ignored = 0;
  Index outsiders = 0;
  double train_seconds = 0.0;

  Index classified() const { return correct + incorrect; }
  double error() const { return classified() == 0 ? 0.0 : static_cast<double>(incorrect) / static_cast<double>(classified()); }

  TestReport& operator+=(const TestReport& o) {
    correct += o.correct;
    incorrect += o.incorrect;
    ignored += o.ignored;
    outsiders += o.outsiders;
    train_seconds += o.train_seconds;
    return *this;
  }
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Scores predictions against 1-based labels.
inline TestReport score(const Prediction& p, const std::vector<int>& labels) {
  TestReport r;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (p.outsider[i]) ++r.outsiders;
    if (p.classes[i] == kIgnored) {
      ++r.ignored;
    } else if (p.classes[i] == labels[i] - 1) {
      ++r.correct;
    } else {
      ++r.incorrect;
    }
  }
  return r;
}

inline double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace detail

/// Trains on `learn` and tests on the rows of `test` with 1-based labels.
inline TestReport holdout_test(const LabeledSample& learn, const DataMatrix& test, const std::vector<int>& labels,
                               const TrainConfig& cfg, const std::string& policy = "") {
  if (learn.dim() != test.cols()) throw ParameterError("learn and test samples differ in dimension");
  if (static_cast<Index>(labels.size()) != test.rows()) throw ParameterError("test labels do not match test rows");
  for (int l : labels) {
    if (l < 1 || l > learn.num_classes()) throw ParameterError("test sample has classes unknown to the learn sample");
  }
  auto t0 = std::chrono::steady_clock::now();
  TrainedModel m = train(learn, cfg);
  double secs = detail::seconds_since(t0);
  TestReport r = detail::score(classify(m, test, policy), labels);
  r.train_seconds = secs;
  return r;
}

inline TestReport holdout_test(const LabeledSample& learn, const LabeledSample& test, const TrainConfig& cfg,
                               const std::string& policy = "") {
  return holdout_test(learn, test.data(), test.labels(), cfg, policy);
}

struct FoldResult {
  int fold = 0;
  Index tested = 0;
  TestReport report;
  bool skipped = false;
  std::string warning;
};

struct CvReport {
  std::vector<FoldResult> folds;
  TestReport total;
  double error() const { return total.error(); }
};

/// Cross-validation with stride folds: fold f holds out observations i with
/// i % numchunks == f. numchunks = n gives leave-one-out.
inline CvReport cv_error(const LabeledSample& sample, Index numchunks, const TrainConfig& cfg, const std::string& policy = "") {
  const Index n = sample.size();
  if (numchunks < 2 || numchunks > n) throw ParameterError("numchunks: must be in 2.." + std::to_string(n));
  CvReport rep;
  for (Index f = 0; f < numchunks; ++f) {
    std::vector<Index> tr, te;
    for (Index i = 0; i < n; ++i) (i % numchunks == f ? te : tr).push_back(i);
    FoldResult fr;
    fr.fold = static_cast<int>(f);
    fr.tested = static_cast<Index>(te.size());
    std::vector<Index> counts(static_cast<std::size_t>(sample.num_classes()), 0);
    for (Index i : tr) ++counts[static_cast<std::size_t>(sample.labels()[static_cast<std::size_t>(i)] - 1)];
    if (std::count(counts.begin(), counts.end(), 0) > 0) {
      fr.skipped = true;
      fr.warning = "fold " + std::to_string(f) + " leaves a class without training points; skipped";
    } else {
      LabeledSample learn = sample.subset(tr);
      fr.report = holdout_test(learn, sample.data().select(te), pick(sample.labels(), te), cfg, policy);
      rep.total += fr.report;
    }
    rep.folds.push_back(fr);
  }
  return rep;
}

struct PartitionReport {
  std::vector<double> errors;
  std::vector<double> times;
  double mean = 0.0;
  double sd = 0.0;
  double time_mean = 0.0;
  double time_sd = 0.0;
};

/// Repeated random splitting: each round removes `size` points (a fraction
/// if below 1), trains on the rest and tests on the removed ones.
inline PartitionReport partition_error(const LabeledSample& sample, double size, int times, const TrainConfig& cfg,
                                       std::uint64_t seed, const std::string& policy = "") {
  const Index n = sample.size();
  Index m = size < 1.0 ? static_cast<Index>(std::llround(size * static_cast<double>(n))) : static_cast<Index>(std::llround(size));
  if (!(size > 0.0) || m < 1 || m >= n) throw ParameterError("size: must leave at least one test and one training point");
  if (times < 1) throw ParameterError("times: must be at least 1");
  PartitionReport rep;
  for (int r = 0; r < times; ++r) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(r)));
    std::vector<Index> te, tr;
    for (int attempt = 0;; ++attempt) {
      te = random_subset(n, m, rng);
      tr.clear();
      std::size_t k = 0;
      for (Index i = 0; i < n; ++i) {
        if (k < te.size() && te[k] == i) {
          ++k;
        } else {
          tr.push_back(i);
        }
      }
      std::vector<Index> counts(static_cast<std::size_t>(sample.num_classes()), 0);
      for (Index i : tr) ++counts[static_cast<std::size_t>(sample.labels()[static_cast<std::size_t>(i)] - 1)];
      if (std::count(counts.begin(), counts.end(), 0) == 0) break;
      if (attempt > 1000) throw ParameterError("size: too large, training classes keep emptying");
    }
    TestReport t = holdout_test(sample.subset(tr), sample.data().select(te), pick(sample.labels(), te), cfg, policy);
    rep.errors.push_back(t.error());
    rep.times.push_back(t.train_seconds);
  }
  rep.mean = detail::mean_of(rep.errors);
  rep.sd = detail::sd_of(rep.errors);
  rep.time_mean = detail::mean_of(rep.times);
  rep.time_sd = detail::sd_of(rep.times);
  return rep;
}

// ---- convex hull membership ----

/// Membership oracle for the convex hull of a point set. In the plane the
/// hull polygon is built once; in higher dimension each query solves the
/// feasibility LP.
class HullOracle {
 public:
  explicit HullOracle(const DataMatrix& data) : data_(data) {
    if (data.cols() == 2) build_polygon();
  }

  bool contains(const Vector& z) const {
    if (data_.cols() != 2) return in_convex_hull(z, data_);
    const std::size_t m = hull_.size();
    if (m < 3) return in_convex_hull(z, data_);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& a = hull_[i];
      const auto& b = hull_[(i + 1) % m];
      double c = (b[0] - a[0]) * (z(1) - a[1]) - (b[1] - a[1]) * (z(0) - a[0]);
      if (c < 0.0) return false;
    }
    return true;
  }

  /// Hull vertices in counter-clockwise order (plane only).
  const std::vector<std::array<double, 2>>& polygon() const { return hull_; }

 private:
  void build_polygon() {
    std::vector<std::array<double, 2>> p;
    for (Index i = 0; i < data_.rows(); ++i) p.push_back({data_.values()(i, 0), data_.values()(i, 1)});
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() < 3) return;
    auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a, const std::array<double, 2>& b) {
      return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<std::array<double, 2>> h(2 * p.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0.0) --k;
      h[k++] = p[i];
    }
    for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
      while (k >= t && cross(h[k - 2], h[k - 1], p[i - 1]) <= 0.0) --k;
      h[k++] = p[i - 1];
    }
    h.resize(k - 1);
    hull_ = std::move(h);
  }

  DataMatrix data_;
  std::vector<std::array<double, 2>> hull_;
};

// ---- max-depth experiment ----

struct MaxDepthExperiment {
  double df = std::numeric_limits<double>::infinity();
  Index n = 100;  // training points per class
  std::vector<DepthSpec> depths;
  int reps = 10;
  Index test_points = 1000;
  std::uint64_t seed = 0;
};

struct MaxDepthRow {
  std::string depth;
  std::vector<double> errors;
  double mean = 0.0;
  double sd = 0.0;
};

inline std::string depth_label(const DepthSpec& s) {
  std::string out = to_string(s.notion);
  if (s.uses_estimator()) out += "-" + to_string(s.estimator);
  if (s.uses_directions() || s.notion == DepthNotion::simplicial) out += s.exact ? "-exact" : "-approx";
  return out;
}

/// Test points from the generating model, kept only inside the convex hull
/// of the pooled training sample; classes are drawn with equal probability.
inline LabeledSample sample_inside_hull(const GeneratorSpec& gen, const DataMatrix& pooled, Index count) {
  HullOracle hull(pooled);
  TwoClassGenerator g(gen);
  Rng coin(split_seed(gen.seed, 7));
  std::bernoulli_distribution flip(0.5);
  Matrix x(count, pooled.cols());
  std::vector<int> labels;
  Index attempts = 0;
  while (static_cast<Index>(labels.size()) < count) {
    if (++attempts > 1000000) throw DegenerateDataError("rejection sampling inside the convex hull stalled after 10^6 attempts");
    int cls = flip(coin) ? 2 : 1;
    Vector z = g.draw(cls);
    if (!hull.contains(z)) continue;
    x.row(static_cast<Index>(labels.size())) = z.transpose();
    labels.push_back(cls);
  }
  return LabeledSample(DataMatrix(std::move(x)), std::move(labels));
}

/// Average error of the max-depth rule per depth over repeated samples.
inline std::vector<MaxDepthRow> run_maxdepth_experiment(const MaxDepthExperiment& ex) {
  if (ex.depths.empty()) throw ParameterError("depths: at least one depth is required");
  if (ex.reps < 1 || ex.n < 2 || ex.test_points < 1) throw ParameterError("reps, n and test-points must be positive");
  std::vector<MaxDepthRow> rows;
  for (const auto& d : ex.depths) rows.push_back(MaxDepthRow{depth_label(d), {}, 0.0, 0.0});
  for (int r = 0; r < ex.reps; ++r) {
    GeneratorSpec gen = GeneratorSpec::with_df(ex.df, split_seed(ex.seed, static_cast<std::uint64_t>(2 * r)));
    LabeledSample train_s = generate_two_class(gen, ex.n);
    GeneratorSpec test_gen = gen;
    test_gen.seed = split_seed(ex.seed, static_cast<std::uint64_t>(2 * r + 1));
    LabeledSample test = sample_inside_hull(test_gen, train_s.data(), ex.test_points);
    for (std::size_t k = 0; k < ex.depths.size(); ++k) {
      DepthSpec spec = ex.depths[k];
      DepthEngine engine(train_s, spec);
      DepthSpace ds = engine.depth_space(test.data());
      Index wrong = 0;
      for (Index i = 0; i < test.size(); ++i) {
        Rng rng(point_seed(spec.seed, test.data().row(i)));
        if (classify_maxdepth(ds.depths.row(i).transpose(), rng) != test.labels()[static_cast<std::size_t>(i)] - 1) ++wrong;
      }
      rows[k].errors.push_back(static_cast<double>(wrong) / static_cast<double>(test.size()));
    }
  }
  for (auto& row : rows) {
    row.mean = detail::mean_of(row.errors);
    row.sd = detail::sd_of(row.errors);
  }
  return rows;
}

// ---- timing ----

struct TimingConfig {
  std::vector<Index> dims{2, 3, 4, 5};
  std::vector<Index> sizes{50, 100, 250, 500, 1000};
  std::vector<DepthSpec> depths;
  Index points_per_cell = 10;
  double budget_seconds = 10.0;  // per point; slower cells are marked incomplete
  std::uint64_t seed = 0;
};

struct TimingCell {
  std::string depth;
  Index dim = 0;
  Index n = 0;
  double seconds = std::numeric_limits<double>::quiet_NaN();  // median per-point time
  bool complete = false;
  std::string note;
};

/// Wall-clock time per depth evaluation (median of 3 batches) on standard
/// normal data. Statistics of the sample are computed before timing starts.
inline std::vector<TimingCell> time_depths(const TimingConfig& cfg) {
  if (cfg.points_per_cell < 1) throw ParameterError("points-per-cell: must be positive");
  std::vector<TimingCell> out;
  for (const auto& spec : cfg.depths) {
    bool over_budget = false;
    for (Index d : cfg.dims) {
      over_budget = false;
      for (Index n : cfg.sizes) {
        TimingCell cell{depth_label(spec), d, n, std::numeric_limits<double>::quiet_NaN(), false, {}};
        if (over_budget) {
          cell.note = "skipped: smaller cell exceeded the time budget";
          out.push_back(cell);
          continue;
        }
        Rng rng(split_seed(cfg.seed, static_cast<std::uint64_t>(d * 100003 + n)));
        std::normal_distribution<double> normal(0.0, 1.0);
        Matrix x(n, d);
        for (Index i = 0; i < n; ++i) {
          for (Index k = 0; k < d; ++k) x(i, k) = normal(rng);
        }
        Matrix q(cfg.points_per_cell, d);
        for (Index i = 0; i < q.rows(); ++i) {
          for (Index k = 0; k < d; ++k) q(i, k) = 0.5 * normal(rng);
        }
        try {
          DepthEngine engine(DataMatrix(x), spec);
          std::vector<double> batches;
          double sink = 0.0;
          for (int b = 0; b < 3; ++b) {
            auto t0 = std::chrono::steady_clock::now();
            for (Index i = 0; i < q.rows(); ++i) sink += engine.depth(q.row(i).transpose(), 0);
            batches.push_back(detail::seconds_since(t0) / static_cast<double>(q.rows()));
            if (batches.back() > cfg.budget_seconds) break;
          }
          std::sort(batches.begin(), batches.end());
          cell.seconds = batches[batches.size() / 2];
          cell.complete = batches.size() == 3 && cell.seconds <= cfg.budget_seconds;
          if (!cell.complete) {
            cell.note = "incomplete: exceeded the time budget";
            over_budget = true;
          }
          if (!(sink >= 0.0)) cell.note = "invalid depth values";
        } catch (const SizeError& e) {
          cell.note = std::string("incomplete: ") + e.what();
          over_budget = true;
        }
        out.push_back(cell);
      }
    }
  }
  return out;
}

// ---- report writers ----

inline void write_timing_csv(std::ostream& out, const std::vector<TimingCell>& cells) {
  out << "depth,d,n,seconds_per_point,complete\n";
  for (const auto& c : cells) {
    out << c.depth << ',' << c.dim << ',' << c.n << ',' << (std::isnan(c.seconds) ? std::string("NA") : detail::format_double(c.seconds))
        << ',' << (c.complete ? "true" : "false") << '\n';
  }
}

inline void write_maxdepth_csv(std::ostream& out, const std::vector<MaxDepthRow>& rows) {
  out << "depth,rep,error\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.errors.size(); ++i) out << r.depth << ',' << i << ',' << detail::format_double(r.errors[i]) << '\n';
  }
}

inline nlohmann::json to_json(const TestReport& r) {
  return {{"error", r.error()},  {"correct", r.correct},     {"incorrect", r.incorrect},
          {"ignored", r.ignored}, {"outsiders", r.outsiders}, {"train_seconds", r.train_seconds}};
}

inline void write_cv_csv(std::ostream& out, const CvReport& rep) {
  out << "fold,tested,correct,incorrect,ignored,outsiders,skipped\n";
  for (const auto& f : rep.folds) {
    out << f.fold << ',' << f.tested << ',' << f.report.correct << ',' << f.report.incorrect << ',' << f.report.ignored << ','
        << f.report.outsiders << ',' << (f.skipped ? "true" : "false") << '\n';
  }
}

}  // namespace depthcraft
