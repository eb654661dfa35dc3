#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "depthcraft/datamodel.hpp"
#include "depthcraft/estimators.hpp"
#include "depthcraft/lp.hpp"
#include "depthcraft/optim.hpp"
#include "depthcraft/parallel.hpp"
#include "support.hpp"

using namespace depthcraft;
using testing_support::normal_matrix;

// ---- data model ----

TEST(Csv, LabeledWithHeaderRemapsLabelsInOrderOfFirstOccurrence) {
  std::istringstream in("a,b,cls\n1,2,dog\n3,4,cat\n5,6,dog\n");
  LabeledSample s = read_labeled_csv(in);
  ASSERT_EQ(s.size(), 3);
  EXPECT_EQ(s.labels(), (std::vector<int>{1, 2, 1}));
  EXPECT_EQ(s.class_names(), (std::vector<std::string>{"dog", "cat"}));
  EXPECT_EQ(s.cardinalities(), (std::vector<Index>{2, 1}));
  EXPECT_DOUBLE_EQ(s.data().values()(1, 1), 4.0);
}

TEST(Csv, HeaderlessMatrix) {
  std::istringstream in("1.5,2\n-3,4e2\n");
  DataMatrix m = read_matrix_csv(in);
  ASSERT_EQ(m.rows(), 2);
  EXPECT_DOUBLE_EQ(m.values()(1, 1), 400.0);
}

TEST(Csv, RaggedRowIsAnError) {
  std::istringstream in("1,2\n3\n");
  EXPECT_THROW(read_matrix_csv(in), ParameterError);
}

TEST(Csv, NonNumericCellIsAnError) {
  std::istringstream in("1,2,a\n3,x,b\n");
  EXPECT_THROW(read_labeled_csv(in), ParameterError);
}

TEST(Csv, WriteReadRoundTripIsExact) {
  Rng rng(4);
  LabeledSample s = generate_two_class(GeneratorSpec::with_df(3.0, 9), 20);
  std::stringstream io;
  write_labeled_csv(io, s);
  LabeledSample back = read_labeled_csv(io);
  EXPECT_EQ(back.labels(), s.labels());
  EXPECT_TRUE(back.data().values() == s.data().values());
}

TEST(DataMatrix, RejectsNonFiniteValues) {
  Matrix m(2, 2);
  m << 1, 2, std::nan(""), 4;
  EXPECT_THROW(DataMatrix{m}, ParameterError);
}

TEST(LabeledSample, EmptyClassIsRejected) {
  Matrix m = Matrix::Zero(3, 2);
  EXPECT_THROW(LabeledSample(DataMatrix(m), {1, 1, 3}), ParameterError);
}

TEST(Generator, DeterministicAndClassOrdered) {
  auto a = generate_two_class(GeneratorSpec::with_df(5.0, 3), 50);
  auto b = generate_two_class(GeneratorSpec::with_df(5.0, 3), 50);
  EXPECT_TRUE(a.data().values() == b.data().values());
  EXPECT_EQ(a.labels()[49], 1);
  EXPECT_EQ(a.labels()[50], 2);
}

TEST(Generator, GaussianMomentsMatchTheModel) {
  auto s = generate_two_class(GeneratorSpec::with_df(std::numeric_limits<double>::infinity(), 1), 20000);
  ScatterEstimate e1 = moment_estimate(s.class_data(1));
  ScatterEstimate e2 = moment_estimate(s.class_data(2));
  EXPECT_NEAR(e1.mu(0), 0.0, 0.03);
  EXPECT_NEAR(e2.mu(1), 1.0, 0.05);
  EXPECT_NEAR(e1.sigma(0, 1), 1.0, 0.06);
  EXPECT_NEAR(e1.sigma(1, 1), 4.0, 0.15);
}

TEST(Random, SplitSeedGivesDistinctStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(split_seed(42, s));
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(Random, SubsetIsSortedAndDistinct) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    auto s = random_subset(10, 4, rng);
    ASSERT_EQ(s.size(), 4u);
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LT(s[i - 1], s[i]);
    EXPECT_GE(s.front(), 0);
    EXPECT_LT(s.back(), 10);
  }
}

TEST(Random, DirectionsAreUnitAndNested) {
  Rng a(7), b(7);
  Matrix u = uniform_directions(50, 3, a);
  Matrix v = uniform_directions(20, 3, b);
  for (Index k = 0; k < u.rows(); ++k) EXPECT_NEAR(u.row(k).norm(), 1.0, 1e-12);
  EXPECT_TRUE(u.topRows(20) == v);
}

TEST(Parallel, ResultIndependentOfThreadCount) {
  std::vector<double> one(1000), many(1000);
  set_thread_count(1);
  parallel_for(one.size(), [&](std::size_t i) { one[i] = std::sin(static_cast<double>(i)); });
  set_thread_count(4);
  parallel_for(many.size(), [&](std::size_t i) { many[i] = std::sin(static_cast<double>(i)); });
  set_thread_count(0);
  EXPECT_EQ(one, many);
}

// ---- estimators ----

TEST(Moment, MatchesTextbookFormulas) {
  Matrix x(4, 2);
  x << 0, 0, 2, 0, 0, 2, 2, 2;
  ScatterEstimate e = moment_estimate(DataMatrix(x));
  EXPECT_DOUBLE_EQ(e.mu(0), 1.0);
  EXPECT_NEAR(e.sigma(0, 0), 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(e.sigma(0, 1), 0.0, 1e-12);
  EXPECT_NEAR((e.sigma * e.sigma_inv - Matrix::Identity(2, 2)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((e.sigma_inv_sqrt * e.sigma_inv_sqrt - e.sigma_inv).norm(), 0.0, 1e-12);
}

TEST(Moment, SingularScatterIsDegenerate) {
  Matrix x(4, 2);
  x << 0, 0, 1, 1, 2, 2, 3, 3;
  EXPECT_THROW(moment_estimate(DataMatrix(x)), DegenerateDataError);
}

TEST(Mcd, IgnoresAClusterOfOutliers) {
  Rng rng(11);
  Matrix x = normal_matrix(100, 2, rng);
  for (Index i = 0; i < 20; ++i) x.row(i) << 20.0 + 0.1 * static_cast<double>(i % 5), 20.0 + 0.1 * static_cast<double>(i / 5);
  Rng r2(3);
  McdResult res = mcd(DataMatrix(x), 0.75, r2);
  EXPECT_LT(res.estimate.mu.norm(), 0.5);
  for (Index i : res.subset) EXPECT_GE(i, 20);
  ScatterEstimate mom = moment_estimate(DataMatrix(x));
  EXPECT_GT(mom.mu.norm(), 5.0);
}

TEST(Mcd, ConsistentAtTheNormalModel) {
  Rng rng(5);
  Matrix x = normal_matrix(2000, 2, rng);
  Rng r2(6);
  ScatterEstimate e = mcd_estimate(DataMatrix(x), 0.75, r2);
  EXPECT_NEAR(e.sigma(0, 0), 1.0, 0.15);
  EXPECT_NEAR(e.sigma(1, 1), 1.0, 0.15);
  EXPECT_NEAR(e.sigma(0, 1), 0.0, 0.1);
}

TEST(Mcd, FullSubsetIsTheMomentEstimate) {
  Rng rng(5);
  Matrix x = normal_matrix(30, 2, rng);
  Rng r2(1);
  ScatterEstimate e = mcd_estimate(DataMatrix(x), 1.0, r2);
  ScatterEstimate m = moment_estimate(DataMatrix(x));
  EXPECT_NEAR((e.sigma - m.sigma).norm(), 0.0, 1e-12);
}

TEST(Mcd, FractionOutOfRange) {
  Rng rng(5);
  Matrix x = normal_matrix(30, 2, rng);
  EXPECT_THROW(mcd(DataMatrix(x), 0.4, rng), ParameterError);
}

TEST(Chi2, MedianMatchesKnownValues) {
  EXPECT_NEAR(chi2_median(1), 0.454936423119573, 1e-9);
  EXPECT_NEAR(chi2_median(2), 2.0 * std::log(2.0), 1e-9);
  EXPECT_NEAR(chi2_median(5), 4.35146019109553, 1e-8);
}

// ---- LP ----

TEST(Lp, SolvesASmallProgram) {
  // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
  Vector c(4);
  c << -1, -1, 0, 0;
  Matrix a(2, 4);
  a << 1, 2, 1, 0, 3, 1, 0, 1;
  Vector b(2);
  b << 4, 6;
  Vector up = Vector::Constant(4, std::numeric_limits<double>::infinity());
  LpResult r = solve_lp(c, a, b, up);
  ASSERT_EQ(r.status, LpStatus::optimal);
  EXPECT_NEAR(r.x(0), 1.6, 1e-10);
  EXPECT_NEAR(r.x(1), 1.2, 1e-10);
  EXPECT_NEAR(r.objective, -2.8, 1e-10);
}

TEST(Lp, UpperBoundsAreHonoured) {
  Vector c(2);
  c << -1, -2;
  Matrix a(1, 2);
  a << 1, 1;
  Vector b(1);
  b << 1.5;
  Vector up(2);
  up << 1, 1;
  LpResult r = solve_lp(c, a, b, up);
  ASSERT_EQ(r.status, LpStatus::optimal);
  EXPECT_NEAR(r.x(1), 1.0, 1e-12);
  EXPECT_NEAR(r.x(0), 0.5, 1e-12);
}

TEST(Lp, DetectsInfeasibleAndUnbounded) {
  Matrix a(1, 2);
  a << 1, 1;
  Vector b(1);
  b << 3;
  Vector up = Vector::Ones(2);
  EXPECT_FALSE(lp_feasible(a, b, up));
  EXPECT_EQ(solve_lp(Vector::Zero(2), a, b, up).status, LpStatus::infeasible);

  Matrix a2(1, 2);
  a2 << 1, -1;
  Vector b2(1);
  b2 << 0;
  Vector c2(2);
  c2 << -1, 0;
  Vector inf = Vector::Constant(2, std::numeric_limits<double>::infinity());
  EXPECT_EQ(solve_lp(c2, a2, b2, inf).status, LpStatus::unbounded);
}

TEST(Lp, BealeCyclingExampleTerminates) {
  // Classic degenerate problem that cycles under pure Dantzig pricing.
  Vector c(7);
  c << -0.75, 150, -0.02, 6, 0, 0, 0;
  Matrix a(3, 7);
  a << 0.25, -60, -0.04, 9, 1, 0, 0,  //
      0.5, -90, -0.02, 3, 0, 1, 0,    //
      0, 0, 1, 0, 0, 0, 1;
  Vector b(3);
  b << 0, 0, 1;
  Vector up = Vector::Constant(7, std::numeric_limits<double>::infinity());
  LpOptions opt;
  opt.degenerate_switch = 0;
  LpResult r = solve_lp(c, a, b, up, opt);
  ASSERT_EQ(r.status, LpStatus::optimal);
  EXPECT_NEAR(r.objective, -0.05, 1e-9);
}

TEST(Lp, RandomFeasibleProgramsSatisfyConstraints) {
  Rng rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    Matrix a = normal_matrix(3, 8, rng);
    Vector x0(8);
    for (Index j = 0; j < 8; ++j) x0(j) = u(rng);
    Vector b = a * x0;
    Vector c = testing_support::normal_vector(8, rng);
    Vector up = Vector::Ones(8);
    LpResult r = solve_lp(c, a, b, up);
    ASSERT_EQ(r.status, LpStatus::optimal);
    EXPECT_LT((a * r.x - b).norm(), 1e-8);
    EXPECT_GE(r.x.minCoeff(), -1e-10);
    EXPECT_LE(r.x.maxCoeff(), 1.0 + 1e-10);
    EXPECT_LE(r.objective, c.dot(x0) + 1e-9);
  }
}

// ---- Nelder-Mead ----

TEST(NelderMead, FindsTheRosenbrockMinimum) {
  auto f = [](const Eigen::VectorXd& v) { return 100 * std::pow(v(1) - v(0) * v(0), 2) + std::pow(1 - v(0), 2); };
  Eigen::VectorXd start(2);
  start << -1.2, 1.0;
  NelderMeadResult r = nelder_mead(f, start, 0.5, 5000, 1e-16);
  EXPECT_NEAR(r.x(0), 1.0, 1e-3);
  EXPECT_NEAR(r.x(1), 1.0, 2e-3);
}

TEST(NelderMead, NeverReturnsWorseThanTheStart) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd s = testing_support::normal_vector(3, rng);
    auto f = [](const Eigen::VectorXd& v) { return std::abs(v(0)) + std::sin(3 * v(1)) + v(2) * v(2); };
    NelderMeadResult r = nelder_mead(f, s, 0.3, 200);
    EXPECT_LE(r.value, f(s));
  }
}
