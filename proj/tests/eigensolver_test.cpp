#include "buckle/eigensolver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace buckle;

namespace {

SpMat tridiagonal(int n, double diag, double off) {
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, diag);
    if (i + 1 < n) {
      t.emplace_back(i, i + 1, off);
      t.emplace_back(i + 1, i, off);
    }
  }
  SpMat m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat diagonal(const std::vector<double>& d) {
  std::vector<Eigen::Triplet<double>> t;
  for (size_t i = 0; i < d.size(); ++i) t.emplace_back(i, i, d[i]);
  SpMat m(d.size(), d.size());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

TEST(Eigensolver, DiscreteLaplacianSpectrum) {
  const int n = 200;
  const SpMat A = tridiagonal(n, 2.0, -1.0);
  const SpMat B = tridiagonal(n, 1.0, 0.0);
  EigenOptions o;
  o.tolerance = 1e-10;
  const auto pairs = solve_smallest(A, B, 5, o);
  ASSERT_EQ(pairs.size(), 5u);
  for (int k = 0; k < 5; ++k) {
    const double exact = 2.0 - 2.0 * std::cos((k + 1) * std::numbers::pi / (n + 1));
    EXPECT_NEAR(pairs[k].value, exact, 1e-10 * exact);
    EXPECT_LE(pairs[k].residual, 1e-10);
    EXPECT_NEAR(pairs[k].vector.dot(B * pairs[k].vector), 1.0, 1e-12);
  }
  EXPECT_NEAR(pairs[0].vector.dot(B * pairs[1].vector), 0.0, 1e-12);
  EXPECT_NEAR(spectral_gap(pairs), (pairs[1].value - pairs[0].value) / pairs[0].value, 1e-15);
}

TEST(Eigensolver, GeneralizedProblemWithMassMatrix) {
  // A x = mu B x with A = tridiag(-1, 2, -1) and B = tridiag(1, 4, 1) / 6 (1D linear FE)
  const int n = 150;
  const double h = 1.0 / (n + 1);
  const SpMat A = tridiagonal(n, 2.0 / h, -1.0 / h);
  const SpMat B = tridiagonal(n, 4.0 * h / 6.0, h / 6.0);
  EigenOptions o;
  o.tolerance = 1e-10;
  const auto pairs = solve_smallest(A, B, 3, o);
  for (int k = 1; k <= 3; ++k) {
    const double c = std::cos(k * std::numbers::pi * h);
    const double exact = 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
    EXPECT_NEAR(pairs[k - 1].value, exact, 1e-9 * exact);
  }
}

TEST(Eigensolver, RepeatedEigenvaluesShareACluster) {
  const SpMat A = diagonal({1.0, 3.0, 3.0, 5.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0});
  const SpMat B = diagonal(std::vector<double>(10, 1.0));
  const auto pairs = solve_smallest(A, B, 4);
  EXPECT_NEAR(pairs[1].value, 3.0, 1e-12);
  EXPECT_NEAR(pairs[2].value, 3.0, 1e-12);
  EXPECT_EQ(pairs[1].cluster, pairs[2].cluster);
  EXPECT_NE(pairs[0].cluster, pairs[1].cluster);
  EXPECT_NE(pairs[3].cluster, pairs[1].cluster);
}

TEST(Eigensolver, DeterministicForFixedSeed) {
  const SpMat A = tridiagonal(120, 2.0, -1.0);
  const SpMat B = tridiagonal(120, 1.0, 0.0);
  const auto a = solve_smallest(A, B, 3);
  const auto b = solve_smallest(A, B, 3);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(a[k].value, b[k].value);
    EXPECT_EQ((a[k].vector - b[k].vector).norm(), 0.0);
  }
}

TEST(Eigensolver, ShiftDoesNotChangeTheAnswer) {
  const SpMat A = tridiagonal(100, 2.0, -1.0);
  const SpMat B = tridiagonal(100, 1.0, 0.0);
  EigenOptions o;
  o.tolerance = 1e-10;
  const double plain = solve_smallest(A, B, 1, o)[0].value;
  o.shift = -0.05;
  EXPECT_NEAR(solve_smallest(A, B, 1, o)[0].value, plain, 1e-12);
}

TEST(Eigensolver, RejectsBadInput) {
  const SpMat A = tridiagonal(10, 2.0, -1.0);
  EXPECT_THROW(solve_smallest(A, tridiagonal(9, 1.0, 0.0), 1), std::invalid_argument);
  EXPECT_THROW(solve_smallest(A, A, 0), std::invalid_argument);
  EXPECT_THROW(solve_smallest(A, A, 11), std::invalid_argument);
  EigenOptions o;
  o.tolerance = 0.0;
  EXPECT_THROW(solve_smallest(A, A, 1, o), std::invalid_argument);
}

TEST(Eigensolver, InertiaTest) {
  EXPECT_TRUE(is_positive_definite(tridiagonal(50, 2.0, -1.0)));
  EXPECT_FALSE(is_positive_definite(tridiagonal(50, 1.0, -1.0)));
  EXPECT_FALSE(is_positive_definite(diagonal({1.0, -1.0, 2.0})));
}
