#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "support/generators.hpp"

namespace gaussot {
namespace {

using testing::Gen;

Matrix diag2(double a, double b) { return Eigen::Vector2d(a, b).asDiagonal(); }

TEST(SymMatrix, SymmetrizesOnConstruction) {
  Matrix a(2, 2);
  a << 1.0, 2.0, 2.5, 3.0;
  const SymMatrix s(a);
  EXPECT_EQ(s(0, 1), s(1, 0));
  EXPECT_DOUBLE_EQ(s(0, 1), 2.25);
}

TEST(SymMatrix, RandomInputsAreBitSymmetric) {
  Gen g(11);
  for (int k = 0; k < 20; ++k) {
    const Index d = g.integer(1, 7);
    const SymMatrix s(g.normals().matrix(d, d));
    EXPECT_TRUE(s.matrix() == s.matrix().transpose());
  }
}

TEST(SymMatrix, RejectsBadShapes) {
  EXPECT_THROW(SymMatrix(Matrix(2, 3)), Error);
  EXPECT_THROW(SymMatrix(Matrix(0, 0)), Error);
  Matrix a = Matrix::Identity(2, 2);
  a(0, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    SymMatrix s(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
}

TEST(SymEigen, IdentityGivesIdentityVectors) {
  const EigenSystem e = sym_eigen(SymMatrix::identity(2));
  EXPECT_EQ(e.values, Eigen::Vector2d(1, 1));
  EXPECT_TRUE(e.vectors.isApprox(Matrix::Identity(2, 2)));
}

TEST(SymEigen, DiagonalInput) {
  const EigenSystem e = sym_eigen(SymMatrix(diag2(3, 1)));
  EXPECT_DOUBLE_EQ(e.values(0), 3.0);
  EXPECT_DOUBLE_EQ(e.values(1), 1.0);
  EXPECT_TRUE(e.vectors.isApprox(Matrix::Identity(2, 2)));
}

TEST(SymEigen, TwoByTwoHandComputed) {
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  const EigenSystem e = sym_eigen(SymMatrix(a));
  EXPECT_NEAR(e.values(0), 3.0, 1e-14);
  EXPECT_NEAR(e.values(1), 1.0, 1e-14);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(e.vectors(0, 0)), r, 1e-14);
  EXPECT_NEAR(e.vectors(0, 0), e.vectors(1, 0), 1e-14);
  EXPECT_NEAR(e.vectors(0, 1), -e.vectors(1, 1), 1e-14);
  EXPECT_LE((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - a).norm(), 1e-13);
}

TEST(SymEigen, PropertiesOnRandomInputs) {
  Gen g(12);
  for (int k = 0; k < 50; ++k) {
    const Index d = g.integer(1, 8);
    const SymMatrix a(g.normals().matrix(d, d));
    const EigenSystem e = sym_eigen(a);
    for (Index i = 1; i < d; ++i) EXPECT_GE(e.values(i - 1), e.values(i));
    EXPECT_LE((e.vectors.transpose() * e.vectors - Matrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(testing::rel_frob(e.vectors * e.values.asDiagonal() * e.vectors.transpose(), a.matrix()), 1e-10);
    for (Index j = 0; j < d; ++j) {
      Index arg = 0;
      e.vectors.col(j).cwiseAbs().maxCoeff(&arg);
      EXPECT_GE(e.vectors(arg, j), 0.0);
    }
    const EigenSystem again = sym_eigen(a);
    EXPECT_TRUE(again.values == e.values);
    EXPECT_TRUE(again.vectors == e.vectors);
  }
}

TEST(PsdMatrix, AcceptsTinyNegativeEigenvalues) {
  EXPECT_NO_THROW(PsdMatrix(diag2(1.0, -1e-12)));
  try {
    PsdMatrix p(diag2(1.0, -1e-3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPsd);
  }
}

TEST(SqrtPsd, Examples) {
  EXPECT_TRUE(sqrt_psd(PsdMatrix(Matrix::Identity(3, 3))).matrix().isApprox(Matrix::Identity(3, 3)));
  const Matrix r = sqrt_psd(PsdMatrix(diag2(4, 9))).matrix();
  EXPECT_NEAR((r - diag2(2, 3)).norm(), 0.0, 1e-14);
}

TEST(SqrtPsd, ClampsRoundoffNegatives) {
  const Matrix r = sqrt_psd(PsdMatrix(diag2(4, -1e-13))).matrix();
  EXPECT_NEAR(r(0, 0), 2.0, 1e-14);
  EXPECT_EQ(r(1, 1), 0.0);
}

TEST(SqrtPsd, SquaresBackOnRandomInputs) {
  Gen g(13);
  for (int k = 0; k < 50; ++k) {
    const Index d = g.integer(1, 8);
    const PsdMatrix s = k % 2 ? g.spd(d) : (d > 1 ? g.singular(d) : g.spd(d));
    const PsdMatrix r = sqrt_psd(s);
    EXPECT_LE(testing::rel_frob(r.matrix() * r.matrix(), s.matrix()), 1e-9);
    EXPECT_TRUE(is_psd(r.sym(), 1e-12).psd);
  }
  const Matrix a = Gen(3).normals().matrix(3, 3);
  const PsdMatrix s(Matrix(a * a.transpose()));
  const Matrix r = sqrt_psd(s).matrix();
  EXPECT_LE((r * r - s.matrix()).norm() / s.matrix().norm(), 1e-9);
}

TEST(SqrtPsd, CommutesWithOrthogonalConjugation) {
  Gen g(14);
  for (int k = 0; k < 50; ++k) {
    const Index d = g.integer(1, 8);
    const PsdMatrix s = g.spd(d);
    const Matrix o = g.orthogonal(d);
    const Matrix lhs = sqrt_psd(PsdMatrix(Matrix(o.transpose() * s.matrix() * o))).matrix();
    const Matrix rhs = o.transpose() * sqrt_psd(s).matrix() * o;
    EXPECT_LE(testing::rel_frob(lhs, rhs), 1e-9);
  }
}

TEST(InvSqrtPsd, Examples) {
  EXPECT_TRUE(inv_sqrt_psd(PsdMatrix(Matrix::Identity(2, 2))).matrix().isApprox(Matrix::Identity(2, 2)));
  EXPECT_NEAR((inv_sqrt_psd(PsdMatrix(diag2(4, 9))).matrix() - diag2(0.5, 1.0 / 3.0)).norm(), 0.0, 1e-15);
  try {
    inv_sqrt_psd(PsdMatrix(diag2(1, 0)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularMatrix);
  }
}

TEST(InvSqrtPsd, WhitensConditionedInputs) {
  Gen g(15);
  for (int k = 0; k < 50; ++k) {
    const Index d = g.integer(1, 8);
    const PsdMatrix s = g.spd(d, 0.1, 10.0);
    const Matrix r = inv_sqrt_psd(s).matrix();
    EXPECT_LE((r * s.matrix() * r - Matrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(IsPsd, Examples) {
  EXPECT_TRUE(is_psd(SymMatrix::identity(2), 0.0).psd);
  Matrix a(2, 2);
  a << 1, 2, 2, 1;
  const PsdCheck c = is_psd(SymMatrix(a), 1e-12);
  EXPECT_FALSE(c.psd);
  EXPECT_NEAR(c.min_eigenvalue, -1.0, 1e-14);
}

TEST(IsPsd, ToleranceIsRelativeToLargestEigenvalue) {
  EXPECT_TRUE(is_psd(SymMatrix(diag2(100.0, -5e-8)), 1e-9).psd);
  EXPECT_FALSE(is_psd(SymMatrix(diag2(1.0, -5e-8)), 1e-9).psd);
}

}  // namespace
}  // namespace gaussot
