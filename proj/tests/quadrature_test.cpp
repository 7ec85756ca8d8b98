#include "buckle/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace buckle;

TEST(GaussLegendre, IntegratesPolynomialsUpToDegree2nMinus1) {
  for (int n = 1; n <= 10; ++n) {
    const GaussRule g = gauss_legendre(n);
    ASSERT_EQ(g.nodes.size(), static_cast<size_t>(n));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
      const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      EXPECT_NEAR(s, exact, 1e-14) << "n=" << n << " p=" << p;
    }
  }
}

TEST(GaussLegendre, CompositeRuleIntegratesSmoothFunction) {
  const GaussRule g = composite_gauss(0.0, 2.0 * M_PI, 8, 32);
  double s = 0.0;
  for (size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::exp(std::cos(g.nodes[i]));
  // 2 pi I_0(1)
  EXPECT_NEAR(s, 2.0 * M_PI * std::cyl_bessel_i(0.0, 1.0), 1e-13);
}

TEST(TriangleRule, WeightsSumToOneAndPointsAreBarycentric) {
  for (int d : {1, 2, 3, 4, 5}) {
    const TriangleRule& r = triangle_rule(d);
    EXPECT_NEAR(std::accumulate(r.weights.begin(), r.weights.end(), 0.0), 1.0, 1e-14);
    for (const auto& p : r.points) {
      EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-14);
      for (double l : p) EXPECT_GE(l, 0.0);
    }
  }
}

TEST(TriangleRule, ExactForMonomialsOfItsDegree) {
  // Reference triangle (0,0), (1,0), (0,1): int x^a y^b = a! b! / (a + b + 2)!
  auto exact = [](int a, int b) { return std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 3.0); };
  for (int d : {1, 2, 4, 5}) {
    const TriangleRule& r = triangle_rule(d);
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        double s = 0.0;
        for (size_t i = 0; i < r.points.size(); ++i)
          s += 0.5 * r.weights[i] * std::pow(r.points[i][1], a) * std::pow(r.points[i][2], b);
        EXPECT_NEAR(s, exact(a, b), 1e-15) << "degree " << d << " monomial " << a << "," << b;
      }
  }
}

TEST(TriangleRule, RejectsUnsupportedDegree) { EXPECT_THROW(triangle_rule(9), std::invalid_argument); }
