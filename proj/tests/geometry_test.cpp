#include "buckle/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace buckle;

namespace {

constexpr double kPi = std::numbers::pi;

double fd_derivative(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

}  // namespace

TEST(TrigSeries, DerivativesMatchFiniteDifferences) {
  TrigSeries s;
  s.constant = 0.3;
  s.cos_coeffs = {0.1, -0.2, 0.05};
  s.sin_coeffs = {0.0, 0.4};
  for (double th : {0.0, 0.7, 2.1, 4.5}) {
    for (int order = 0; order < 3; ++order) {
      const double fd = fd_derivative([&](double t) { return s.eval(t, order); }, th);
      EXPECT_NEAR(s.eval(th, order + 1), fd, 1e-7);
    }
  }
  EXPECT_DOUBLE_EQ(TrigSeries::mode(-2, 3.0).value(kPi / 4), 3.0);
  EXPECT_DOUBLE_EQ(TrigSeries::mode(3, 2.0).value(0.0), 2.0);
}

TEST(BoundaryCurve, DiscAreaPerimeterCurvature) {
  const BoundaryCurve c = make_disc(2.0);
  EXPECT_NEAR(volume(c), 4 * kPi, 1e-12);
  EXPECT_NEAR(perimeter(c), 4 * kPi, 1e-12);
  EXPECT_NEAR(flux_of_position(c), 8 * kPi, 1e-12);
  for (double th : {0.0, 1.0, 3.0}) {
    const BoundaryGeometry g = c.frame(th);
    EXPECT_NEAR(g.curvature, 0.5, 1e-14);
    EXPECT_NEAR((g.normal - g.point / 2.0).norm(), 0.0, 1e-14);
  }
  EXPECT_THROW(make_disc(-1.0), GeometryError);
}

TEST(BoundaryCurve, EllipsePerimeterMatchesEllipticIntegral) {
  const double a = 1.5, b = 1.0;
  const BoundaryCurve c = make_ellipse(a, b);
  const double k = std::sqrt(1.0 - (b * b) / (a * a));
  EXPECT_NEAR(perimeter(c), 4.0 * a * std::comp_ellint_2(k), 1e-11);
  EXPECT_NEAR(volume(c), kPi * a * b, 1e-12);
  // curvature at the end of the major axis is a / b^2
  EXPECT_NEAR(c.frame(0.0).curvature, a / (b * b), 1e-12);
}

TEST(BoundaryCurve, FourierAreaFormula) {
  // area = pi (1 + (1/2) sum a_k^2 + b_k^2) for r = 1 + sum a_k cos + b_k sin
  const BoundaryCurve c = make_fourier_domain({0.0, 0.1, 0.05}, {0.0, 0.0, -0.07});
  const double expected = kPi * (1.0 + 0.5 * (0.01 + 0.0025 + 0.0049));
  EXPECT_NEAR(volume(c), expected, 1e-12);
  EXPECT_EQ(make_fourier_domain({0.0, 0.1}, {}).symmetry(), Symmetry::quadrant);
  EXPECT_EQ(make_fourier_domain({0.0, 0.0, 0.1}, {}).symmetry(), Symmetry::none);
  EXPECT_EQ(make_disc(1.0).symmetry(), Symmetry::octant);
}

TEST(BoundaryCurve, FrameIsOrthonormalAndCurvatureMatchesNormalTurning) {
  const BoundaryCurve c = make_fourier_domain({0.0, 0.12, 0.04}, {0.0, 0.03});
  for (double th = 0.0; th < 2 * kPi; th += 0.37) {
    const BoundaryGeometry g = c.frame(th);
    EXPECT_NEAR(g.normal.norm(), 1.0, 1e-14);
    EXPECT_NEAR(g.normal.dot(g.tangent), 0.0, 1e-14);
    EXPECT_NEAR(cross(g.normal, g.tangent), 1.0, 1e-14);  // outward normal, ccw tangent
    // d nu / ds = H tau
    const Vec2 dn = c.normal_derivative(th, 1) / g.speed;
    EXPECT_NEAR((dn - g.curvature * g.tangent).norm(), 0.0, 1e-12);
  }
}

TEST(BoundaryCurve, StarCoordinatesInvertTheRadialMap) {
  for (const BoundaryCurve& c :
       {make_disc(1.3), make_ellipse(1.4, 0.8), make_fourier_domain({0.0, 0.1}, {0.0, 0.0, 0.05}, 1.2)}) {
    for (double th : {0.2, 1.9, 4.0})
      for (double s : {0.3, 0.8, 1.0}) {
        const auto sc = c.star_coordinates(s * c.point(th));
        ASSERT_TRUE(sc.has_value());
        EXPECT_NEAR(sc->first, s, 1e-13);
        EXPECT_NEAR(sc->second, th, 1e-13);
      }
  }
}

TEST(BoundaryCurve, TextRoundTripIsExact) {
  const BoundaryCurve c = make_fourier_domain({0.0, 0.1 / 3.0}, {0.0, 0.0, 1e-3 / 7.0}, 1.0 / 3.0);
  const BoundaryCurve back = curve_from_text(curve_to_text(c));
  EXPECT_EQ(curve_to_text(back), curve_to_text(c));
  for (double th : {0.0, 1.0, 2.5}) EXPECT_EQ(back.point(th), c.point(th));
}

TEST(PerturbationField, VolumeProjectionKillsBothOrders) {
  const BoundaryCurve c = make_ellipse(1.3, 0.9);
  TrigSeries g = TrigSeries::mode(2);
  g.constant = 0.4;
  const PerturbationField f = project_volume_preserving(make_normal_field(c, g));
  EXPECT_NEAR(volume_first_order(f), 0.0, 1e-12);
  EXPECT_NEAR(volume_second_order(f), 0.0, 1e-12);
  // the area of the mapped domain then changes only at third order
  const double a0 = volume(c);
  const double d1 = volume(map_domain(c, f, 0.02)) - a0;
  const double d2 = volume(map_domain(c, f, 0.01)) - a0;
  EXPECT_LT(std::abs(d1), 1e-4);
  EXPECT_NEAR(d1 / d2, 8.0, 0.5);
}

TEST(PerturbationField, InflationScalesTheDisc) {
  const BoundaryCurve c = make_disc(1.0);
  TrigSeries one;
  one.constant = 1.0;
  const PerturbationField f = make_normal_field(c, one);
  EXPECT_NEAR(volume(map_domain(c, f, 0.1)), kPi * 1.21, 1e-12);
  EXPECT_NEAR(volume_first_order(f), 2 * kPi, 1e-12);
}

TEST(PerturbationField, InteriorExtensionMatchesBoundaryTrace) {
  const BoundaryCurve c = make_fourier_domain({0.0, 0.1}, {});
  const PerturbationField f = make_normal_field(c, TrigSeries::mode(3));
  for (double th : {0.1, 2.0, 5.0}) {
    EXPECT_NEAR((f.v(c.point(th)) - f.v_trace(th)).norm(), 0.0, 1e-12);
    EXPECT_NEAR(f.normal_component(th), std::cos(3 * th), 1e-12);
  }
  EXPECT_NEAR(f.v(Vec2(0.1, 0.05)).norm(), 0.0, 1e-15);
}

TEST(PerturbationField, NormalVelocityMatchesFiniteDifferences) {
  const BoundaryCurve c = make_ellipse(1.2, 0.9);
  const PerturbationField f = make_normal_field(c, TrigSeries::mode(2, 0.3));
  for (double th : {0.3, 1.7, 3.9}) {
    const auto [formula, fd] = normal_derivative_check(c, f, th, 1e-5);
    EXPECT_NEAR((formula - fd).norm(), 0.0, 1e-7);
  }
}

TEST(PerturbationField, TangentialGradientIsTangent) {
  const BoundaryCurve c = make_ellipse(1.2, 0.9);
  for (double th : {0.3, 1.7}) {
    const Vec2 g = tangential_gradient(c, th, 2.0);
    EXPECT_NEAR(g.dot(c.normal(th)), 0.0, 1e-14);
    EXPECT_NEAR(g.norm(), 2.0 / c.frame(th).speed, 1e-14);
  }
}

TEST(PerturbationField, MapDomainRejectsSelfIntersection) {
  const BoundaryCurve c = make_disc(1.0);
  const PerturbationField f = make_normal_field(c, TrigSeries::mode(8));
  EXPECT_NO_THROW(map_domain(c, f, 0.9));  // r = 1 + 0.9 cos 8th stays positive
  EXPECT_THROW(map_domain(c, f, 1.5), GeometryError);
}
