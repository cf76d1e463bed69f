#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "support/generators.hpp"

namespace gaussot {
namespace {

using testing::Gen;

Matrix diag2(double a, double b) { return Eigen::Vector2d(a, b).asDiagonal(); }

TEST(BruteForce, ScalarCase) {
  const PsdMatrix a(Matrix::Constant(1, 1, 1.0)), b(Matrix::Constant(1, 1, 4.0));
  const BruteForceResult r = theta_brute_force(a, b);
  EXPECT_NEAR(r.v_hat, 2.0, 1e-3);
  EXPECT_LE(r.v_hat, 2.0 + 1e-9);
  EXPECT_TRUE(r.feasible);
  EXPECT_DOUBLE_EQ(r.grid_best, 2.0);  // the box corner theta = 2 is on the grid
}

TEST(BruteForce, DegeneratePairHasManyMaximizers) {
  const BruteForceResult r = theta_brute_force(PsdMatrix(diag2(1, 0)), PsdMatrix(diag2(0, 1)));
  EXPECT_LE(std::abs(r.v_hat), 1e-3);
  EXPECT_TRUE(r.feasible);
  std::size_t distinct_rho = 0;
  for (const Matrix& t : r.near_maximizers) {
    EXPECT_EQ(t(0, 0), 0.0);
    EXPECT_EQ(t(1, 0), 0.0);
    EXPECT_EQ(t(1, 1), 0.0);
    ++distinct_rho;
  }
  EXPECT_GE(distinct_rho, 2u);
  EXPECT_EQ(r.grid_points, 21u);  // only theta_01 has a nonzero box
}

TEST(BruteForce, RandomSpdPairsMatchClosedForm) {
  Gen g(61);
  for (int k = 0; k < 4; ++k) {
    const PsdMatrix a = g.spd(2), b = g.spd(2);
    const BruteForceResult r = theta_brute_force(a, b);
    const double v = v_closed_form(a, b);
    EXPECT_LE(std::abs(r.v_hat - v), 1e-3 * std::max(1.0, v));
    EXPECT_LE(r.grid_best, v + 1e-9);
    EXPECT_NEAR(r.v_hat, r.theta_hat.trace(), 1e-15 * std::max(1.0, v));
    Matrix gamma(4, 4);
    gamma << a.matrix(), r.theta_hat, r.theta_hat.transpose(), b.matrix();
    EXPECT_TRUE(is_psd(SymMatrix(gamma), 1e-9).psd);
  }
}

TEST(BruteForce, SingularInputs) {
  Gen g(62);
  for (int k = 0; k < 3; ++k) {
    const PsdMatrix a = g.singular(2, 1), b = k == 0 ? g.spd(2) : g.singular(2, 1);
    const BruteForceResult r = theta_brute_force(a, b);
    const double v = v_closed_form(a, b);
    EXPECT_LE(std::abs(r.v_hat - v), 1e-3 * std::max(1.0, v));
    EXPECT_LE(r.grid_best, v + 1e-9);
  }
}

TEST(BruteForce, RejectsLargeDimension) {
  Gen g(63);
  try {
    theta_brute_force(g.spd(3), g.spd(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnsupportedDimension);
  }
}

TEST(Assignment, SmallKnownInstance) {
  Matrix cost(3, 3);
  cost << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  const Assignment a = solve_assignment(cost);
  EXPECT_DOUBLE_EQ(a.total_cost, 5.0);
  EXPECT_EQ(a.column_of_row, (std::vector<Index>{1, 0, 2}));
}

TEST(Assignment, MatchesExhaustiveSearch) {
  Gen g(64);
  for (int k = 0; k < 30; ++k) {
    const Index n = g.integer(1, 7);
    Matrix cost(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) cost(i, j) = g.uniform(-5, 5);
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double total = 0;
      for (Index i = 0; i < n; ++i) total += cost(i, perm[static_cast<std::size_t>(i)]);
      best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const Assignment a = solve_assignment(cost);
    EXPECT_NEAR(a.total_cost, best, 1e-12);
    std::vector<Index> cols = a.column_of_row;
    std::sort(cols.begin(), cols.end());
    for (Index i = 0; i < n; ++i) EXPECT_EQ(cols[static_cast<std::size_t>(i)], i);
  }
}

TEST(EmpiricalW2, Examples) {
  Gen g(65);
  const SampleCloud x(g.normals().matrix(30, 3));
  EXPECT_EQ(empirical_w2_squared(x, x), 0.0);
  Matrix a(2, 1), b(2, 1);
  a << 0, 1;
  b << 11, 10;
  EXPECT_DOUBLE_EQ(empirical_w2_squared(SampleCloud(a), SampleCloud(b)), 100.0);
}

TEST(EmpiricalW2, MatchesSortedMatchingInOneDimension) {
  Gen g(66);
  for (int k = 0; k < 10; ++k) {
    const Index n = g.integer(1, 60);
    Matrix x = g.normals().matrix(n, 1), y = 2.0 * g.normals().matrix(n, 1);
    const double got = empirical_w2_squared(SampleCloud(x), SampleCloud(y));
    std::sort(x.data(), x.data() + n);
    std::sort(y.data(), y.data() + n);
    EXPECT_NEAR(got, (x - y).squaredNorm() / static_cast<double>(n), 1e-12);
  }
}

TEST(EmpiricalW2, Validation) {
  Gen g(67);
  const SampleCloud x(g.normals().matrix(5, 2));
  EXPECT_THROW(empirical_w2_squared(x, SampleCloud(g.normals().matrix(6, 2))), Error);
  EXPECT_THROW(empirical_w2_squared(x, SampleCloud(g.normals().matrix(5, 3))), Error);
  EXPECT_THROW(SampleCloud(Matrix(0, 2)), Error);
  Matrix bad = Matrix::Zero(2, 2);
  bad(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(SampleCloud{bad}, Error);
}

TEST(EmpiricalW2, BiasShrinksWithSampleSize) {
  Gen g(68);
  const GaussianLaw mu = g.law(g.spd(2)), nu = g.law(g.spd(2));
  const double truth = w2_squared(mu, nu);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t n : {25u, 100u, 400u}) {
    std::vector<double> errs;
    for (std::uint64_t s = 0; s < 25; ++s)
      errs.push_back(empirical_w2_squared(sample_law(mu, n, 100 + s), sample_law(nu, n, 900 + s)) - truth);
    std::nth_element(errs.begin(), errs.begin() + 12, errs.end());
    EXPECT_LT(errs[12], previous) << "n = " << n;
    previous = errs[12];
  }
  const SampleCloud a = sample_law(mu, 40, 7), b = sample_law(mu, 40, 7);
  EXPECT_EQ(empirical_w2_squared(a, b), 0.0);
}

TEST(CouplingCostMc, Examples) {
  Gen g(69);
  const GaussianLaw law = g.law(g.spd(3));
  const CouplingSamples same = sample_coupling(optimal_coupling(law, law), law, law, 100, 3);
  const McCost c = coupling_cost_mc(same);
  EXPECT_EQ(c.mean_cost, 0.0);
  EXPECT_EQ(c.std_error, 0.0);
  EXPECT_THROW(coupling_cost_mc(Matrix::Zero(1, 2), Matrix::Zero(1, 2)), Error);

  Matrix xs(2, 1), ys(2, 1);
  xs << 0, 0;
  ys << 1, 3;
  const McCost hand = coupling_cost_mc(xs, ys);
  EXPECT_DOUBLE_EQ(hand.mean_cost, 5.0);
  EXPECT_DOUBLE_EQ(hand.std_error, 4.0);
}

TEST(CouplingCostMc, OptimalAndProductCouplings) {
  Gen g(70);
  const GaussianLaw mu = g.law(g.spd(3)), nu = g.law(g.spd(3));
  const OptimalCoupling c = optimal_coupling(mu, nu);
  const McCost opt = coupling_cost_mc(sample_coupling(c, mu, nu, 100000, 11));
  EXPECT_LE(std::abs(opt.mean_cost - c.w2_squared), 3 * opt.std_error);
  const McCost prod = coupling_cost_mc(sample_product_coupling(mu, nu, 100000, 12));
  EXPECT_GE(prod.mean_cost, c.w2_squared - 3 * prod.std_error);
  EXPECT_GE(prod.mean_cost - opt.mean_cost, -3 * std::hypot(opt.std_error, prod.std_error));
}

TEST(SampleLaw, MomentsConverge) {
  Gen g(71);
  const GaussianLaw law = g.law(g.singular(3, 2));
  const SampleCloud s = sample_law(law, 50000, 5);
  const Vector mean = s.points().colwise().mean().transpose();
  const Matrix centered = s.points().rowwise() - mean.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(s.size() - 1);
  EXPECT_LE((mean - law.mean).norm(), 0.05 * std::max(1.0, law.cov.matrix().norm()));
  EXPECT_LE((cov - law.cov.matrix()).norm(), 0.05 * std::max(1.0, law.cov.matrix().norm()));
  EXPECT_THROW(sample_law(law, 0, 1), Error);
}

}  // namespace
}  // namespace gaussot
