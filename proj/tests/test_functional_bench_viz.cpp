#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "depthcraft/bench.hpp"
#include "depthcraft/functional.hpp"
#include "depthcraft/viz.hpp"
#include "support.hpp"

using namespace depthcraft;
using namespace testing_support;

namespace {

Curve random_curve(Rng& rng, Index points) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> t{0.0, 1.0};
  while (static_cast<Index>(t.size()) < points) t.push_back(u(rng));
  std::sort(t.begin(), t.end());
  Curve c;
  c.args = t;
  for (double x : t) c.vals.push_back(std::sin(6.0 * x) + u(rng));
  return c;
}

// Integral and value of the interpolant computed directly from the knots.
double knot_integral(const Curve& c, double lo, double hi) {
  const int steps = 200000;
  double h = (hi - lo) / steps, s = 0.0;
  for (int k = 0; k < steps; ++k) s += detail::curve_value(c.args, c.vals, lo + (k + 0.5) * h);
  return s * h;
}

LabeledSample two_blobs(Index per_class, double gap, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x = normal_matrix(2 * per_class, 2, rng);
  std::vector<int> labels;
  for (Index i = 0; i < 2 * per_class; ++i) {
    if (i >= per_class) x(i, 0) += gap;
    labels.push_back(i < per_class ? 1 : 2);
  }
  return LabeledSample(DataMatrix(x), labels);
}

}  // namespace

// ---- LS transform ----

TEST(LsTransform, ExactOnLinearCurves) {
  Curve c;
  for (int k = 0; k <= 10; ++k) {
    double t = 2.0 + 0.3 * k;
    c.args.push_back(t);
    c.vals.push_back(1.5 - 0.7 * (t - 2.0));
  }
  const double T = 3.0;
  Vector f = ls_transform_curve(c, 2.0, T, LSSpec{3, 2, Instance::average});
  for (int l = 0; l < 3; ++l) {
    double lo = T * l / 3, hi = T * (l + 1) / 3;
    EXPECT_NEAR(f(l), 1.5 * (hi - lo) - 0.35 * (hi * hi - lo * lo), 1e-12);
  }
  for (int s = 0; s < 2; ++s) EXPECT_NEAR(f(3 + s), -0.7 * T / 2, 1e-12);

  Vector g = ls_transform_curve(c, 2.0, T, LSSpec{2, 2, Instance::values});
  EXPECT_NEAR(g(0), 1.5 - 0.7 * 0.75, 1e-12);
  EXPECT_NEAR(g(1), 1.5 - 0.7 * 2.25, 1e-12);
  EXPECT_NEAR(g(2), -0.7, 1e-12);
  EXPECT_NEAR(g(3), -0.7, 1e-12);
}

TEST(LsTransform, IntegralsMatchNumericalIntegration) {
  Rng rng(101);
  for (int t = 0; t < 5; ++t) {
    Curve c = random_curve(rng, 15);
    Vector f = ls_transform_curve(c, 0.0, 1.0, LSSpec{4, 3, Instance::average});
    for (int l = 0; l < 4; ++l) EXPECT_NEAR(f(l), knot_integral(c, l / 4.0, (l + 1) / 4.0), 1e-9);
    for (int s = 0; s < 3; ++s) {
      double lo = s / 3.0, hi = (s + 1) / 3.0;
      EXPECT_NEAR(f(4 + s), detail::curve_value(c.args, c.vals, hi) - detail::curve_value(c.args, c.vals, lo), 1e-12);
    }
  }
}

TEST(LsTransform, IsLinearInTheValues) {
  Rng rng(102);
  Curve a = random_curve(rng, 12);
  Curve b = a;
  for (double& v : b.vals) v = std::cos(v);
  Curve mix = a;
  for (std::size_t k = 0; k < mix.vals.size(); ++k) mix.vals[k] = 2.0 * a.vals[k] - 3.0 * b.vals[k];
  for (Instance inst : {Instance::average, Instance::values}) {
    LSSpec spec{3, 3, inst};
    Vector fa = ls_transform_curve(a, 0.0, 1.0, spec), fb = ls_transform_curve(b, 0.0, 1.0, spec);
    Vector fm = ls_transform_curve(mix, 0.0, 1.0, spec);
    EXPECT_LE((fm - (2.0 * fa - 3.0 * fb)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LsTransform, ConstantExtensionBeyondTheArguments) {
  Curve c{{0.5, 1.0}, {2.0, 4.0}};
  Vector f = ls_transform_curve(c, 0.0, 1.0, LSSpec{2, 0, Instance::average});
  EXPECT_NEAR(f(0), 1.0, 1e-12);  // flat at 2 on [0, 0.5]
  EXPECT_NEAR(f(1), 1.5, 1e-12);  // mean 3 on [0.5, 1]
}

TEST(LsTransform, ValidatesSpec) {
  Curve c{{0, 1}, {0, 1}};
  EXPECT_THROW(ls_transform_curve(c, 0.0, 1.0, LSSpec{1, 0}), ParameterError);
  EXPECT_THROW(ls_transform_curve(c, 0.0, 1.0, LSSpec{-1, 3}), ParameterError);
  EXPECT_THROW(FunctionalSample({Curve{{0, 0}, {1, 2}}}), ParameterError);
  EXPECT_THROW(FunctionalSample({Curve{{0, 1, 2}, {1, 2}}}), ParameterError);
}

// ---- VC bound and candidates ----

TEST(VcBound, BinomialSums) {
  EXPECT_NEAR(log_binomial_sum(10, 3), std::log(176.0), 1e-12);
  EXPECT_NEAR(log_binomial_sum(5, 5), 5 * std::log(2.0), 1e-12);
  EXPECT_NEAR(log_binomial_sum(5, 9), 5 * std::log(2.0), 1e-12);
  EXPECT_NEAR(log_binomial_sum(7, 0), 0.0, 1e-12);
}

TEST(VcBound, Value) {
  double expect = 0.1 + std::sqrt((std::log(2.0) + std::log(1.0 + 49.0 + 1176.0) + std::log(50.0)) / 100.0);
  EXPECT_NEAR(vc_bound_value(0.1, 50, 3), expect, 1e-12);
}

TEST(VcBound, GrowsWithDimension) {
  for (int d = 2; d < 20; ++d) EXPECT_LT(vc_bound_value(0.0, 60, d), vc_bound_value(0.0, 60, d + 1));
}

TEST(Candidates, EnumerationOrder) {
  auto c = enumerate_candidates(3, Instance::average);
  std::vector<std::pair<int, int>> ls;
  for (const auto& s : c) ls.emplace_back(s.L, s.S);
  EXPECT_EQ(ls, (std::vector<std::pair<int, int>>{{2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}}));
  EXPECT_EQ(enumerate_candidates(25, Instance::values).size(), 348u);
}

TEST(Candidates, DefaultMaxDimension) {
  FunctionalGeneratorSpec g;
  g.points = 21;
  EXPECT_EQ(default_max_dimension(generate_functional(g, 3)), 11);
  g.points = 200;
  EXPECT_EQ(default_max_dimension(generate_functional(g, 3)), 25);
}

// ---- functional classifier ----

TEST(Functional, LearnsWellSeparatedCurves) {
  FunctionalGeneratorSpec g;
  g.shift = 0.2;
  g.noise_sd = 0.1;
  g.points = 31;
  g.seed = 1;
  FunctionalSample learn = generate_functional(g, 20);
  g.seed = 2;
  FunctionalSample test = generate_functional(g, 40);
  FunctionalConfig cfg;
  cfg.max_dimension = 4;
  cfg.seed = 3;
  FunctionalModel m = train_functional(learn, cfg);
  FunctionalPrediction p = classify_functional(m, test);
  Index wrong = 0;
  for (std::size_t i = 0; i < p.classes.size(); ++i) wrong += p.classes[i] + 1 != test.labels()[i];
  EXPECT_LE(static_cast<double>(wrong) / test.size(), 0.1);
  EXPECT_FALSE(p.extended);
}

TEST(Functional, ReducedCvKeepsTheVcShortlist) {
  FunctionalGeneratorSpec g;
  g.points = 21;
  g.seed = 4;
  FunctionalSample s = generate_functional(g, 15);
  FunctionalConfig cfg;
  cfg.max_dimension = 5;
  cfg.classifier = FunctionalClassifier::lda;
  FunctionalModel m = train_functional(s, cfg);
  std::size_t evaluated = 0;
  double worst_kept = -1.0, best_dropped = 1e9;
  for (const auto& c : m.candidates) {
    ASSERT_FALSE(std::isnan(c.vc));
    if (std::isnan(c.cv_error)) {
      best_dropped = std::min(best_dropped, c.vc);
    } else {
      ++evaluated;
      worst_kept = std::max(worst_kept, c.vc);
    }
  }
  EXPECT_EQ(evaluated, static_cast<std::size_t>(std::ceil(0.3 * m.candidates.size())));
  EXPECT_LE(worst_kept, best_dropped);
}

TEST(Functional, CompleteCvPicksTheMinimum) {
  FunctionalGeneratorSpec g;
  g.points = 21;
  g.seed = 5;
  FunctionalSample s = generate_functional(g, 15);
  FunctionalConfig cfg;
  cfg.max_dimension = 4;
  cfg.complete_cv = true;
  cfg.classifier = FunctionalClassifier::lda;
  FunctionalModel m = train_functional(s, cfg);
  double best = 2.0;
  for (const auto& c : m.candidates) {
    ASSERT_FALSE(std::isnan(c.cv_error));
    best = std::min(best, c.cv_error);
  }
  EXPECT_EQ(m.cv_error, best);
}

TEST(Functional, ModelRoundTrip) {
  FunctionalGeneratorSpec g;
  g.points = 21;
  g.seed = 6;
  FunctionalSample s = generate_functional(g, 12);
  for (auto kind : {FunctionalClassifier::ddalpha, FunctionalClassifier::knn_affine}) {
    FunctionalConfig cfg;
    cfg.max_dimension = 3;
    cfg.classifier = kind;
    FunctionalModel m = train_functional(s, cfg);
    std::string text = functional_model_to_json(m).dump();
    FunctionalModel back = functional_model_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(functional_model_to_json(back).dump(), text);
    EXPECT_EQ(classify_functional(back, s).classes, classify_functional(m, s).classes);
  }
}

TEST(Functional, SampleJsonRoundTrip) {
  FunctionalGeneratorSpec g;
  g.points = 11;
  FunctionalSample s = generate_functional(g, 4);
  FunctionalSample back = parse_functional_json(functional_to_json(s));
  EXPECT_EQ(back.labels(), s.labels());
  EXPECT_EQ(back.curves()[3].vals, s.curves()[3].vals);
}

TEST(Functional, NeedsLabels) {
  FunctionalSample s({Curve{{0, 1}, {0, 1}}, Curve{{0, 1}, {1, 1}}});
  EXPECT_THROW(train_functional(s, FunctionalConfig{}), ParameterError);
}

// ---- cross-validation and partition ----

TEST(Bench, StrideFolds) {
  LabeledSample s = two_blobs(10, 3.0, 201);
  TrainConfig cfg;
  cfg.depth = DepthSpec::of(DepthNotion::mahalanobis);
  CvReport r = cv_error(s, 3, cfg);
  ASSERT_EQ(r.folds.size(), 3u);
  EXPECT_EQ(r.folds[0].tested, 7);
  EXPECT_EQ(r.folds[1].tested, 7);
  EXPECT_EQ(r.folds[2].tested, 6);
  EXPECT_EQ(r.total.correct + r.total.incorrect + r.total.ignored, 20);
}

TEST(Bench, LeaveOneOutMatchesManualLoop) {
  LabeledSample s = two_blobs(8, 1.5, 202);
  TrainConfig cfg;
  cfg.depth = DepthSpec::of(DepthNotion::spatial);
  cfg.separator.kind = SeparatorKind::knn;
  CvReport r = cv_error(s, s.size(), cfg);
  Index wrong = 0;
  for (Index i = 0; i < s.size(); ++i) {
    std::vector<Index> rest;
    for (Index k = 0; k < s.size(); ++k) {
      if (k != i) rest.push_back(k);
    }
    TrainedModel m = train(s.subset(rest), cfg);
    wrong += classify(m, s.data().select({i})).classes[0] + 1 != s.labels()[static_cast<std::size_t>(i)];
  }
  EXPECT_EQ(r.total.incorrect, wrong);
}

TEST(Bench, FoldWithoutAClassIsSkipped) {
  Matrix x(4, 1);
  x << 0, 1, 2, 3;
  LabeledSample s(DataMatrix(x), {1, 1, 1, 2});
  CvReport r = cv_error(s, 4, TrainConfig{});
  EXPECT_TRUE(r.folds[3].skipped);
  EXPECT_FALSE(r.folds[3].warning.empty());
}

TEST(Bench, NumchunksRange) {
  LabeledSample s = two_blobs(5, 3.0, 203);
  EXPECT_THROW(cv_error(s, 1, TrainConfig{}), ParameterError);
  EXPECT_THROW(cv_error(s, 11, TrainConfig{}), ParameterError);
}

TEST(Bench, PartitionIsReproducible) {
  LabeledSample s = two_blobs(20, 2.0, 204);
  TrainConfig cfg;
  cfg.depth = DepthSpec::of(DepthNotion::mahalanobis);
  PartitionReport a = partition_error(s, 0.25, 5, cfg, 9);
  PartitionReport b = partition_error(s, 10, 5, cfg, 9);
  ASSERT_EQ(a.errors.size(), 5u);
  EXPECT_EQ(a.errors, b.errors);
  double mean = 0.0;
  for (double e : a.errors) mean += e / 5.0;
  EXPECT_NEAR(a.mean, mean, 1e-15);
  EXPECT_THROW(partition_error(s, 40, 1, cfg, 9), ParameterError);
  EXPECT_THROW(partition_error(s, 0.3, 0, cfg, 9), ParameterError);
}

TEST(Bench, HoldoutCountsOutsiders) {
  LabeledSample learn = two_blobs(15, 3.0, 205);
  Matrix far(3, 2);
  far << 50, 50, -40, 0, 0, 60;
  TrainConfig cfg;
  cfg.outsiders = {OutsiderPolicy::of(OutsiderMethod::ignore)};
  TestReport r = holdout_test(learn, DataMatrix(far), {1, 2, 1}, cfg);
  EXPECT_EQ(r.outsiders, 3);
  EXPECT_EQ(r.ignored, 3);
  EXPECT_EQ(r.classified(), 0);
}

TEST(Bench, HullOracleAgreesWithLp) {
  Rng rng(206);
  DataMatrix pts(normal_matrix(40, 2, rng));
  HullOracle hull(pts);
  for (int t = 0; t < 300; ++t) {
    Vector z = normal_vector(2, rng) * 2.0;
    EXPECT_EQ(hull.contains(z), in_convex_hull(z, pts)) << t;
  }
  for (Index i = 0; i < pts.rows(); ++i) EXPECT_TRUE(hull.contains(pts.row(i)));
}

TEST(Bench, MaxDepthExperimentShape) {
  MaxDepthExperiment ex;
  ex.n = 40;
  ex.reps = 2;
  ex.test_points = 50;
  ex.depths = {DepthSpec::of(DepthNotion::mahalanobis), DepthSpec::of(DepthNotion::spatial)};
  auto rows = run_maxdepth_experiment(ex);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].depth, "mahalanobis-moment");
  for (const auto& r : rows) {
    ASSERT_EQ(r.errors.size(), 2u);
    for (double e : r.errors) EXPECT_TRUE(e >= 0.0 && e <= 1.0);
  }
  auto again = run_maxdepth_experiment(ex);
  EXPECT_EQ(again[1].errors, rows[1].errors);
}

TEST(Bench, TimingCells) {
  TimingConfig cfg;
  cfg.dims = {2, 3};
  cfg.sizes = {20, 30};
  cfg.points_per_cell = 2;
  cfg.depths = {DepthSpec::of(DepthNotion::zonoid), DepthSpec::of(DepthNotion::mahalanobis)};
  auto cells = time_depths(cfg);
  EXPECT_EQ(cells.size(), 8u);
  for (const auto& c : cells) {
    EXPECT_TRUE(c.complete) << c.depth << " " << c.note;
    EXPECT_GE(c.seconds, 0.0);
  }
  std::ostringstream csv;
  write_timing_csv(csv, cells);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "depth,d,n,seconds_per_point,complete");
}

// ---- visualisation ----

TEST(Viz, MarchingSquaresCircle) {
  Grid g{linspace(-1, 1, 81), linspace(-1, 1, 81), Matrix(81, 81)};
  for (Index i = 0; i < 81; ++i) {
    for (Index j = 0; j < 81; ++j) g.value(i, j) = 1.0 - std::hypot(g.xs[static_cast<std::size_t>(i)], g.ys[static_cast<std::size_t>(j)]);
  }
  auto lines = marching_squares(g, 0.5);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_TRUE(is_closed(lines[0]));
  for (const auto& p : lines[0]) EXPECT_NEAR(std::hypot(p[0], p[1]), 0.5, 0.01);
}

TEST(Viz, MarchingSquaresSeparateLoops) {
  Grid g{linspace(-2, 2, 101), linspace(-1, 1, 51), Matrix(101, 51)};
  for (Index i = 0; i < 101; ++i) {
    for (Index j = 0; j < 51; ++j) {
      double x = g.xs[static_cast<std::size_t>(i)], y = g.ys[static_cast<std::size_t>(j)];
      g.value(i, j) = std::max(1.0 - std::hypot(x - 1, y), 1.0 - std::hypot(x + 1, y));
    }
  }
  auto lines = marching_squares(g, 0.6);
  ASSERT_EQ(lines.size(), 2u);
  for (const auto& l : lines) EXPECT_TRUE(is_closed(l));
}

TEST(Viz, ContourLevels) {
  EXPECT_EQ(contour_levels(0.25, 0.9), (std::vector<double>{0.25}));
  auto lv = contour_levels(3, 0.8);
  ASSERT_EQ(lv.size(), 3u);
  EXPECT_NEAR(lv[0], 0.2, 1e-15);
  EXPECT_NEAR(lv[2], 0.6, 1e-15);
  EXPECT_THROW(contour_levels(0.0, 1.0), ParameterError);
}

TEST(Viz, DepthContoursAreClosed) {
  Rng rng(301);
  DataMatrix x(normal_matrix(60, 2, rng));
  for (auto notion : {DepthNotion::halfspace, DepthNotion::zonoid, DepthNotion::mahalanobis}) {
    ContourResult r = contour_grid(x, DepthSpec::of(notion), 60, 4);
    ASSERT_EQ(r.lines.size(), 4u);
    for (const auto& level : r.lines) {
      ASSERT_FALSE(level.empty());
      for (const auto& l : level) EXPECT_TRUE(is_closed(l)) << to_string(notion);
    }
  }
}

TEST(Viz, ContourArguments) {
  Rng rng(302);
  EXPECT_THROW(contour_grid(DataMatrix(normal_matrix(20, 3, rng)), DepthSpec{}, 50, 5), UnsupportedError);
  EXPECT_THROW(contour_grid(DataMatrix(normal_matrix(20, 2, rng)), DepthSpec{}, 5, 5), ParameterError);
}

TEST(Viz, SvgIsDeterministic) {
  Rng rng(303);
  DataMatrix x(normal_matrix(40, 2, rng));
  ContourResult r = contour_grid(x, DepthSpec::of(DepthNotion::spatial), 40, 3);
  std::ostringstream a, b;
  write_contours_svg(a, r);
  write_contours_svg(b, r);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str().find("<svg"), std::string::npos);
  EXPECT_NE(a.str().find("</svg>"), std::string::npos);

  Grid s = surface_grid(x, DepthSpec::of(DepthNotion::spatial), 20, 15);
  EXPECT_EQ(s.value.rows(), 20);
  EXPECT_EQ(s.value.cols(), 15);
  std::ostringstream c;
  write_surface_svg(c, s, x.values());
  EXPECT_NE(c.str().find("</svg>"), std::string::npos);
}

TEST(Viz, SeparationGridIsASignBand) {
  LabeledSample s = two_blobs(20, 2.0, 304);
  TrainConfig cfg;
  cfg.depth = DepthSpec::of(DepthNotion::mahalanobis);
  TrainedModel m = train(s, cfg);
  Grid g = separation_grid(m, 50);
  std::set<double> values(g.value.data(), g.value.data() + g.value.size());
  EXPECT_EQ(values, (std::set<double>{-1.0, 1.0}));
  std::ostringstream out;
  write_ddplot_svg(out, m.engine->depth_space(s), &m);
  EXPECT_NE(out.str().find("</svg>"), std::string::npos);
}
