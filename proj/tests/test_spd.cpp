#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fedlinucb/spd.hpp"
#include "test_util.hpp"

using namespace fedlinucb;
using fedlinucb::testing::random_psd;
using fedlinucb::testing::random_vector;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// Unit-scale PSD matrix of rank <= d, so determinants stay O(1).
Matrix normalized_psd(std::mt19937_64& gen, int d) {
  std::uniform_int_distribution<int> rank(1, d);
  const int r = rank(gen);
  return random_psd(gen, d, r) / static_cast<double>(r);
}

}  // namespace

TEST(SpdDet, Identity) { EXPECT_DOUBLE_EQ(spd_det(SpdMatrix::scaled_identity(2, 1.0)), 1.0); }

TEST(SpdDet, Diagonal) {
  EXPECT_NEAR(spd_det(SpdMatrix(diag2(10, 1))), 10.0, 1e-12);
  EXPECT_NEAR(spd_det(SpdMatrix(diag2(19, 1))), 19.0, 1e-12);
}

TEST(SpdDet, RejectsIndefinite) {
  EXPECT_THROW(SpdMatrix(diag2(1, -1)), NumericalDomainError);
  EXPECT_THROW(SpdMatrix(diag2(1, 0)), NumericalDomainError);
}

TEST(SpdDet, RejectsAsymmetric) {
  Matrix m = diag2(2, 2);
  m(0, 1) = 0.5;
  EXPECT_THROW(SpdMatrix{m}, NumericalDomainError);
}

TEST(SpdDet, FactorReproducesMatrix) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix m = random_psd(gen, 5, 5) + Matrix::Identity(5, 5);
    const SpdMatrix s(m);
    EXPECT_NEAR(s.det(), m.determinant(), 1e-8 * m.determinant());
    EXPECT_NEAR(std::exp(s.log_det()), s.det(), 1e-8 * s.det());
  }
}

TEST(InvNorm, Examples) {
  EXPECT_DOUBLE_EQ(inv_norm(SpdMatrix::scaled_identity(2, 1.0), vec2(3, 0)), 3.0);
  EXPECT_NEAR(inv_norm(SpdMatrix(diag2(10, 1)), vec2(3, 0)), 3.0 / std::sqrt(10.0), 1e-12);
  EXPECT_NEAR(inv_norm(SpdMatrix(diag2(10, 1)), vec2(0, 1.0 / std::sqrt(10.0))), 0.316227766016838, 1e-12);
}

TEST(InvNorm, DimensionMismatch) {
  EXPECT_THROW(inv_norm(SpdMatrix::scaled_identity(2, 1.0), Vector::Zero(3)), DimensionError);
}

TEST(SolveEstimate, Examples) {
  const Vector z = solve_estimate(SpdMatrix::scaled_identity(2, 1.0), Vector::Zero(2));
  EXPECT_EQ(z, Vector::Zero(2));
  const Vector t = solve_estimate(SpdMatrix(diag2(10, 1)), vec2(3, 0));
  EXPECT_NEAR(t(0), 0.3, 1e-14);
  EXPECT_EQ(t(1), 0.0);
}

TEST(SolveEstimate, RidgeLimitOfTwoArmScenario) {
  // diag(1 + 18n, 1) against (3n, 0): first coordinate 3n/(1+18n) -> 1/6.
  double prev = 0.0;
  for (double n : {1.0, 10.0, 1e3, 1e6}) {
    const Vector t = solve_estimate(SpdMatrix(diag2(1 + 18 * n, 1)), vec2(3 * n, 0));
    EXPECT_NEAR(t(0), 3 * n / (1 + 18 * n), 1e-14);
    EXPECT_GT(t(0), prev);
    prev = t(0);
  }
  EXPECT_NEAR(prev, 1.0 / 6.0, 1e-6);
}

TEST(SolveEstimate, ResidualSmall) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 6;
    const SpdMatrix m(random_psd(gen, d, d) + 0.1 * Matrix::Identity(d, d));
    const Vector b = random_vector(gen, d);
    const Vector th = solve_estimate(m, b);
    EXPECT_LE((m.matrix() * th - b).norm(), 1e-8 * (b.norm() + 1));
  }
}

TEST(SolveEstimate, DimensionMismatch) {
  EXPECT_THROW(solve_estimate(SpdMatrix::scaled_identity(2, 1.0), Vector::Zero(1)), DimensionError);
}

TEST(DeterminantProperties, SuperadditiveDifference) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + trial % 6;
    const Matrix a = normalized_psd(gen, d), b = normalized_psd(gen, d), c = normalized_psd(gen, d);
    const double lhs = psd_det(a + b + c) + psd_det(a);
    const double rhs = psd_det(a + b) + psd_det(a + c);
    ASSERT_GE(lhs, rhs - 1e-8) << "trial " << trial << " d=" << d;
  }
}

TEST(DeterminantProperties, SubmultiplicativeRatio) {
  std::mt19937_64 gen(4048);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + trial % 6;
    const Matrix a = normalized_psd(gen, d), b = normalized_psd(gen, d), c = normalized_psd(gen, d);
    const double lhs = psd_det(a + b + c) * psd_det(a);
    const double rhs = psd_det(a + b) * psd_det(a + c);
    ASSERT_LE(lhs, rhs + 1e-8 * std::max(1.0, rhs)) << "trial " << trial << " d=" << d;
  }
}

TEST(DeterminantProperties, NormRatioUnderLoewnerOrder) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + trial % 6;
    const Matrix bm = normalized_psd(gen, d) + 0.05 * Matrix::Identity(d, d);
    const Matrix am = bm + normalized_psd(gen, d);
    const SpdMatrix a(am), b(bm);
    const Vector x = random_vector(gen, d);
    const double ratio = std::sqrt(a.det() / b.det());
    ASSERT_LE(inv_norm(a, x), inv_norm(b, x) * ratio + 1e-8);
    // Direct form: ||x||_A <= ||x||_B sqrt(det A / det B).
    const double na = std::sqrt(x.dot(am * x)), nb = std::sqrt(x.dot(bm * x));
    ASSERT_LE(na, nb * ratio * (1 + 1e-10) + 1e-8);
  }
}

TEST(DeterminantProperties, MatrixDeterminantLemma) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + trial % 6;
    const Matrix am = random_psd(gen, d, d) + Matrix::Identity(d, d);
    const Vector x = random_vector(gen, d);
    const SpdMatrix a(am);
    const SpdMatrix ax(Matrix(am + x * x.transpose()));
    const double n = inv_norm(a, x);
    const double expected = a.det() * (1 + n * n);
    ASSERT_NEAR(ax.det(), expected, 1e-8 * expected);
  }
}

TEST(MinEigenvalue, Diagonal) {
  EXPECT_NEAR(min_eigenvalue(diag2(3, -2)), -2.0, 1e-14);
  EXPECT_NEAR(psd_det(diag2(1, 0)), 0.0, 1e-15);
}
