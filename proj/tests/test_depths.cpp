#include <gtest/gtest.h>

#include <cmath>

#include "depthcraft/depth/engine.hpp"
#include "depthcraft/parallel.hpp"
#include "support.hpp"

using namespace depthcraft;
using namespace testing_support;

namespace {

DepthSpec spec_of(DepthNotion n, bool exact = true) {
  DepthSpec s = DepthSpec::of(n);
  if (n != DepthNotion::projection) s.exact = exact;
  s.seed = 17;
  return s;
}

}  // namespace

TEST(Mahalanobis, ClosedForm) {
  Rng rng(1);
  Matrix x = normal_matrix(40, 3, rng);
  ScatterEstimate e = moment_estimate(DataMatrix(x));
  for (int t = 0; t < 20; ++t) {
    Vector z = normal_vector(3, rng);
    Vector diff = z - e.mu;
    double expect = 1.0 / (1.0 + diff.dot(e.sigma.inverse() * diff));
    EXPECT_NEAR(depth(z, DataMatrix(x), spec_of(DepthNotion::mahalanobis)), expect, 1e-12);
  }
}

TEST(Spatial, MatchesDirectSumOfUnitVectors) {
  Rng rng(2);
  Matrix x = normal_matrix(30, 2, rng);
  ScatterEstimate e = moment_estimate(DataMatrix(x));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(e.sigma);
  Matrix root = eig.operatorInverseSqrt();
  for (int t = 0; t < 20; ++t) {
    Vector z = normal_vector(2, rng);
    Vector sum = Vector::Zero(2);
    for (Index i = 0; i < x.rows(); ++i) {
      Vector v = root * (z - x.row(i).transpose());
      sum += v / v.norm();
    }
    EXPECT_NEAR(depth(z, DataMatrix(x), spec_of(DepthNotion::spatial)), 1.0 - sum.norm() / 30.0, 1e-12);
  }
}

TEST(Spatial, EstimatorNoneUsesIdentityScatter) {
  Matrix x(4, 2);
  x << 1, 0, -1, 0, 0, 1, 0, -1;
  DepthSpec s = spec_of(DepthNotion::spatial);
  s.estimator = Estimator::none;
  EXPECT_NEAR(depth(Vector::Zero(2), DataMatrix(x), s), 1.0, 1e-15);
  Vector z(2);
  z << 100, 0;
  EXPECT_LT(depth(z, DataMatrix(x), s), 0.01);
}

TEST(Halfspace, OneDimensionalClosedForm) {
  Rng rng(3);
  Matrix x = normal_matrix(25, 1, rng);
  for (int t = 0; t < 30; ++t) {
    Vector z = normal_vector(1, rng);
    Index le = (x.array() <= z(0)).count(), ge = (x.array() >= z(0)).count();
    EXPECT_DOUBLE_EQ(depth(z, DataMatrix(x), spec_of(DepthNotion::halfspace)), static_cast<double>(std::min(le, ge)) / 25.0);
  }
}

TEST(Halfspace, PlaneMatchesDefinition) {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    Index n = 3 + static_cast<Index>(t % 18);
    Matrix x = normal_matrix(n, 2, rng);
    Vector z = 0.7 * normal_vector(2, rng);
    double got = depth_halfspace_exact(z, DataMatrix(x));
    EXPECT_EQ(got, static_cast<double>(halfspace_brute_2d(z, x)) / static_cast<double>(n)) << "trial " << t;
  }
}

TEST(Halfspace, DataPointCountsItself) {
  Matrix x(3, 2);
  x << 0, 0, 1, 0, 0, 1;
  EXPECT_NEAR(depth_halfspace_exact(Vector::Zero(2), DataMatrix(x)), 1.0 / 3.0, 1e-15);
}

TEST(Halfspace, ApproximationBoundsExactFromAbove) {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    Matrix x = normal_matrix(25, 3, rng);
    Vector z = 0.5 * normal_vector(3, rng);
    double exact = depth_halfspace_exact(z, DataMatrix(x));
    Rng r(static_cast<std::uint64_t>(t));
    EXPECT_LE(exact, depth_halfspace_approx(z, DataMatrix(x), 500, r));
  }
}

TEST(Halfspace, ExactIsCappedInThreeDimensions) {
  Rng rng(6);
  Matrix x = normal_matrix(100, 3, rng);
  try {
    depth(Vector::Zero(3), DataMatrix(x), spec_of(DepthNotion::halfspace));
    FAIL() << "expected SizeError";
  } catch (const SizeError& e) {
    EXPECT_NE(std::string(e.what()).find("--approx"), std::string::npos);
  }
}

TEST(Simplicial, OneDimensionalIntervalCount) {
  Rng rng(7);
  Matrix x = normal_matrix(15, 1, rng);
  for (int t = 0; t < 20; ++t) {
    Vector z = normal_vector(1, rng);
    Index below = (x.array() < z(0)).count(), above = (x.array() > z(0)).count();
    double expect = static_cast<double>(below * above) / (15.0 * 14.0 / 2.0);
    EXPECT_NEAR(depth(z, DataMatrix(x), spec_of(DepthNotion::simplicial)), expect, 1e-15);
  }
}

TEST(Simplicial, PlaneSweepMatchesEnumeration) {
  Rng rng(8);
  for (int t = 0; t < 60; ++t) {
    Index n = 3 + static_cast<Index>(t % 20);
    Matrix x = normal_matrix(n, 2, rng);
    Vector z = 0.5 * normal_vector(2, rng);
    SimplexCount c = simplicial_count_exact(z, DataMatrix(x));
    EXPECT_EQ(c.inside, simplicial_brute_2d(z, x));
    EXPECT_EQ(c.total, n * (n - 1) * (n - 2) / 6);
  }
}

TEST(Simplicial, PlaneSweepAtADataPoint) {
  Rng rng(9);
  Matrix x = normal_matrix(12, 2, rng);
  for (Index i = 0; i < 12; ++i) {
    Vector z = x.row(i);
    EXPECT_EQ(simplicial_count_exact(z, DataMatrix(x)).inside, simplicial_brute_2d(z, x)) << "point " << i;
  }
}

TEST(Simplicial, ApproximationConvergesToExact) {
  Rng rng(10);
  Matrix x = normal_matrix(14, 3, rng);
  Vector z = 0.2 * normal_vector(3, rng);
  double exact = depth_simplicial_exact(z, DataMatrix(x));
  Rng r(3);
  EXPECT_NEAR(depth_simplicial_approx(z, DataMatrix(x), 40000, r), exact, 0.01);
}

TEST(SimplicialVolume, DeepestNearTheCentreAndBounded) {
  Rng rng(11);
  Matrix x = normal_matrix(20, 2, rng);
  DepthSpec s = spec_of(DepthNotion::simplicial_volume);
  Vector centre = x.colwise().mean().transpose();
  Vector far = centre + Vector::Constant(2, 6.0);
  double dc = depth(centre, DataMatrix(x), s), df = depth(far, DataMatrix(x), s);
  EXPECT_GT(dc, df);
  EXPECT_GT(dc, 0.0);
  EXPECT_LE(dc, 1.0);
}

TEST(Zonoid, OneAtTheMeanZeroOutsideTheHull) {
  Rng rng(12);
  Matrix x = normal_matrix(30, 3, rng);
  Vector mean = x.colwise().mean().transpose();
  EXPECT_NEAR(depth_zonoid(mean, DataMatrix(x)), 1.0, 1e-9);
  Vector out = x.colwise().maxCoeff().transpose() + Vector::Ones(3);
  EXPECT_EQ(depth_zonoid(out, DataMatrix(x)), 0.0);
}

TEST(Zonoid, AgreesWithTheFeasibilityGrid) {
  Rng rng(13);
  for (int t = 0; t < 15; ++t) {
    Matrix x = normal_matrix(8, 2, rng);
    Vector z = 0.4 * normal_vector(2, rng);
    double got = depth_zonoid(z, DataMatrix(x));
    double grid = zonoid_grid(z, x, 200);
    EXPECT_GE(got + 1e-9, grid);
    EXPECT_LE(got, grid + 1.0 / 200 + 1e-9);
  }
}

TEST(Zonoid, TwoPointClosedForm) {
  Matrix x(2, 1);
  x << 0, 1;
  // z = t: the weight on the far point is max(t, 1 - t), depth = 1 / (2 max).
  Vector z(1);
  z << 0.25;
  EXPECT_NEAR(depth_zonoid(z, DataMatrix(x)), 1.0 / 1.5, 1e-12);
}

TEST(Projection, OneDimensionalIsExact) {
  Matrix x(5, 1);
  x << 1, 2, 4, 7, 11;
  // median 4, MAD = median(|x - 4|) = median(3, 2, 0, 3, 7) = 3
  Vector z(1);
  z << 10;
  Rng r(1);
  EXPECT_NEAR(depth_projection(z, DataMatrix(x), 10, false, r), 1.0 / (1.0 + 2.0), 1e-12);
}

TEST(Projection, MoreDirectionsNeverIncreaseTheDepth) {
  Rng rng(14);
  Matrix x = normal_matrix(40, 3, rng);
  for (int t = 0; t < 10; ++t) {
    Vector z = normal_vector(3, rng);
    Rng a(static_cast<std::uint64_t>(t)), b(static_cast<std::uint64_t>(t));
    EXPECT_GE(depth_projection(z, DataMatrix(x), 100, false, a), depth_projection(z, DataMatrix(x), 1000, false, b));
  }
}

TEST(Projection, RefinementNeverIncreasesTheDepth) {
  Rng rng(15);
  Matrix x = normal_matrix(40, 3, rng);
  for (int t = 0; t < 10; ++t) {
    Vector z = normal_vector(3, rng);
    Rng a(static_cast<std::uint64_t>(t)), b(static_cast<std::uint64_t>(t));
    EXPECT_GE(depth_projection(z, DataMatrix(x), 50, false, a) + 1e-12, depth_projection(z, DataMatrix(x), 50, true, b));
  }
}

TEST(Projection, ExactIsRejected) {
  DepthSpec s = DepthSpec::of(DepthNotion::projection);
  s.exact = true;
  EXPECT_THROW(s.validate(), ParameterError);
}

TEST(Potential, MatchesKernelSum) {
  Rng rng(16);
  Matrix x = normal_matrix(12, 2, rng);
  Matrix sigma = moment_estimate(DataMatrix(x)).sigma;
  const double h = 0.7;
  Matrix hinv = (h * h * sigma).inverse();
  double c = 1.0 / (2 * std::acos(-1.0) * std::sqrt((h * h * sigma).determinant()));
  Vector z = normal_vector(2, rng);
  double sum = 0;
  for (Index i = 0; i < 12; ++i) {
    Vector d = z - x.row(i).transpose();
    sum += c * std::exp(-0.5 * d.dot(hinv * d));
  }
  EXPECT_NEAR(potential(z, DataMatrix(x), 0.4, h), 0.4 * sum / 12.0, 1e-12);
}

TEST(SpatialLocal, NonNegativeAndVanishingFarAway) {
  Rng rng(17);
  Matrix x = normal_matrix(30, 2, rng);
  DepthSpec s = spec_of(DepthNotion::spatial_local);
  s.bandwidth = {0.5};
  Vector far = Vector::Constant(2, 50.0);
  EXPECT_GE(depth(Vector::Zero(2), DataMatrix(x), s), 0.0);
  EXPECT_NEAR(depth(far, DataMatrix(x), s), 0.0, 1e-12);
}

TEST(AllNotions, BoundedNotionsStayInUnitIntervalAndVanishFarAway) {
  Rng rng(18);
  Matrix x = normal_matrix(40, 2, rng);
  Vector far = Vector::Constant(2, 1e4);
  for (const auto& [notion, name] : notion_names()) {
    DepthSpec s = spec_of(notion);
    if (notion == DepthNotion::simplicial) s.exact = true;
    for (int t = 0; t < 10; ++t) {
      Vector z = normal_vector(2, rng);
      double v = depth(z, DataMatrix(x), s);
      EXPECT_GE(v, 0.0) << name;
      if (s.bounded()) {
        EXPECT_LE(v, 1.0) << name;
      }
    }
    EXPECT_LT(depth(far, DataMatrix(x), s), 1e-3) << name;
  }
}

TEST(Engine, DeterministicGivenSeedAndIndependentOfThreads) {
  Rng rng(19);
  LabeledSample s(DataMatrix(normal_matrix(60, 3, rng)), std::vector<int>(60, 1));
  DataMatrix q(normal_matrix(40, 3, rng));
  for (DepthNotion n : {DepthNotion::projection, DepthNotion::halfspace, DepthNotion::simplicial}) {
    DepthSpec spec = DepthSpec::of(n);
    spec.exact = false;
    spec.seed = 77;
    set_thread_count(1);
    Matrix a = DepthEngine(s, spec).depth_space(q).depths;
    set_thread_count(3);
    Matrix b = DepthEngine(s, spec).depth_space(q).depths;
    set_thread_count(0);
    EXPECT_TRUE(a == b) << to_string(n);
  }
}

TEST(Engine, JsonRoundTripReproducesDepths) {
  Rng rng(20);
  Matrix x = normal_matrix(50, 2, rng);
  std::vector<int> labels(50);
  for (int i = 0; i < 50; ++i) labels[static_cast<std::size_t>(i)] = 1 + i % 2;
  LabeledSample s(DataMatrix(x), labels);
  DataMatrix q(normal_matrix(20, 2, rng));
  for (const auto& [notion, name] : notion_names()) {
    DepthSpec spec = DepthSpec::of(notion);
    spec.seed = 3;
    if (notion == DepthNotion::halfspace || notion == DepthNotion::simplicial) spec.exact = false;
    spec.estimator = notion == DepthNotion::mahalanobis ? Estimator::mcd : Estimator::moment;
    DepthEngine e(s, spec);
    DepthEngine back = DepthEngine::from_json(nlohmann::json::parse(e.to_json().dump()));
    EXPECT_TRUE(e.depth_space(q).depths == back.depth_space(q).depths) << name;
  }
}

TEST(Engine, DepthSpaceShapeAndLabels) {
  auto s = generate_two_class(GeneratorSpec::with_df(5, 2), 30);
  DepthEngine e(s, spec_of(DepthNotion::mahalanobis));
  DepthSpace ds = e.depth_space(s);
  EXPECT_EQ(ds.rows(), 60);
  EXPECT_EQ(ds.classes(), 2);
  EXPECT_EQ(ds.labels, s.labels());
  EXPECT_EQ(ds.cardinalities, (std::vector<Index>{30, 30}));
}

TEST(Engine, DimensionMismatchIsAnError) {
  Rng rng(21);
  DepthEngine e(DataMatrix(normal_matrix(20, 2, rng)), spec_of(DepthNotion::mahalanobis));
  EXPECT_THROW(e.depth(Vector::Zero(3), 0), ParameterError);
}
