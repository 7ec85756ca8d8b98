#include "buckle/disc_oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace buckle;

namespace {

// int_0^R f(r) 2 pi r dr by composite Simpson
double radial_integral(const std::function<double(double)>& f, double R, int n = 4000) {
  const double h = R / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * f(r) * 2.0 * std::numbers::pi * r;
  }
  return s * h / 3.0;
}

}  // namespace

TEST(Bessel, AgreesWithStandardLibrary) {
  for (int n : {0, 1, 2})
    for (double x = 0.0; x <= 50.0; x += 0.173) EXPECT_NEAR(bessel_j(n, x), std::cyl_bessel_j(n, x), 1e-12) << n << " " << x;
}

TEST(Bessel, RootsAreZerosOfTheStandardFunction) {
  EXPECT_NEAR(bessel_root(1, 1), 3.8317059702075123, 1e-13);
  EXPECT_NEAR(bessel_root(0, 1), 2.4048255576957728, 1e-13);
  for (int n : {0, 1})
    for (int k : {1, 2, 3}) EXPECT_NEAR(std::cyl_bessel_j(n, bessel_root(n, k)), 0.0, 1e-13);
  EXPECT_LT(bessel_root(1, 1), bessel_root(1, 2));
}

TEST(DiscOracle, BucklingEigenpair) {
  const RadialSolution u = disc_buckling(1.0);
  EXPECT_NEAR(u.eigenvalue, 14.681970642123893, 1e-10);
  EXPECT_GT(u.amplitude, 0.0);
  // clamped: u = 0 and du/dr = 0 at r = R
  EXPECT_NEAR(u.value(Vec2(1.0, 0.0)), 0.0, 1e-14);
  EXPECT_NEAR(u.gradient(Vec2(0.0, 1.0)).norm(), 0.0, 1e-13);
  const double grad2 = radial_integral([&](double r) { return u.gradient(Vec2(r, 0.0)).squaredNorm(); }, 1.0);
  EXPECT_NEAR(grad2, 1.0, 1e-10);
  for (double r : {0.1, 0.5, 0.9}) EXPECT_NEAR(u.ode_residual(r), 0.0, 1e-10);
}

TEST(DiscOracle, BoundaryLaplacianConstantAndWIdentity) {
  for (double R : {1.0, 2.0}) {
    const RadialSolution u = disc_buckling(R);
    const double c0 = disc_c0(R);
    // c0 = sqrt(2 Lambda / (2 |Omega|)) = j11 / (R^2 sqrt(pi))
    EXPECT_NEAR(c0, bessel_root(1, 1) / (R * R * std::sqrt(std::numbers::pi)), 1e-12);
    EXPECT_NEAR(u.laplacian(Vec2(R, 0.0)), c0, 1e-11);
    for (double r : {0.0, 0.3 * R, 0.8 * R}) EXPECT_NEAR(disc_w_identity(R, r), c0, 1e-11);
  }
}

TEST(DiscOracle, DirichletModesAreNormalized) {
  const RadialSolution d1 = disc_dirichlet(1.0, 1);
  EXPECT_NEAR(d1.eigenvalue, 5.783185962946784, 1e-10);
  EXPECT_NEAR(radial_integral([&](double r) { return std::pow(d1.value(Vec2(r, 0.0)), 2); }, 1.0), 1.0, 1e-10);
  EXPECT_GT(d1.value(Vec2(0.0, 0.0)), 0.0);
  const RadialSolution d2 = disc_dirichlet(1.0, 2);
  EXPECT_NEAR(d2.eigenvalue, disc_buckling(1.0).eigenvalue, 1e-12);  // Payne equality on the ball
  // the J1 cos(th) mode: int u^2 = (pi) int_0^1 f(r)^2 r dr with u = f(r) cos th
  const double m = radial_integral([&](double r) { return std::pow(d2.value(Vec2(r, 0.0)), 2); }, 1.0) / 2.0;
  EXPECT_NEAR(m, 1.0, 1e-10);
}

TEST(DiscOracle, ScalingLaw) {
  EXPECT_NEAR(disc_buckling(2.0).eigenvalue * 4.0, disc_buckling(1.0).eigenvalue, 1e-12);
  EXPECT_THROW(disc_buckling(0.0), std::invalid_argument);
}
