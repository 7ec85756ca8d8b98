#include "buckle/mesher.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

using namespace buckle;

namespace {

std::set<std::pair<double, double>> node_set(const Mesh& m) {
  std::set<std::pair<double, double>> s;
  for (const auto& p : m.nodes) s.emplace(p.x() + 0.0, p.y() + 0.0);
  return s;
}

}  // namespace

TEST(Mesher, DiscMeshIsValidAndBoundaryNodesLieOnTheCurve) {
  const BoundaryCurve c = make_disc(1.0);
  const Mesh m = triangulate(c, 0.1);
  EXPECT_NO_THROW(validate_mesh(m, c));
  EXPECT_GE(m.min_angle_degrees(), 20.0);
  EXPECT_LE(m.max_edge_length(), 2.0 * 0.1);
  for (const auto& e : m.boundary) EXPECT_NEAR(m.nodes[e.a].norm(), 1.0, 1e-14);
  // Euler characteristic of a disc: V - E + F = 1
  const size_t V = m.nodes.size(), F = m.triangles.size(), Eb = m.boundary.size();
  const size_t E = (3 * F + Eb) / 2;
  EXPECT_EQ(static_cast<long>(V) - static_cast<long>(E) + static_cast<long>(F), 1);
}

TEST(Mesher, AreaConvergesQuadratically) {
  const BoundaryCurve c = make_ellipse(1.5, 1.0);
  const double exact = std::numbers::pi * 1.5;
  const Mesh m0 = triangulate(c, 0.1);
  const Mesh m1 = refine(m0, c);
  const Mesh m2 = refine(m1, c);
  const double e0 = exact - m0.area(), e1 = exact - m1.area(), e2 = exact - m2.area();
  EXPECT_GT(e2, 0.0);  // inscribed polygon
  EXPECT_NEAR(std::log2(e0 / e1), 2.0, 0.2);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
  EXPECT_EQ(m1.triangles.size(), 4 * m0.triangles.size());
  EXPECT_EQ(m1.boundary.size(), 2 * m0.boundary.size());
  EXPECT_NO_THROW(validate_mesh(m2, c));
}

TEST(Mesher, SymmetricMeshIsInvariantUnderItsReflections) {
  const Mesh m = triangulate(make_disc(1.0), 0.15);
  const auto s = node_set(m);
  for (const auto& p : m.nodes) {
    EXPECT_TRUE(s.count({p.x() + 0.0, -p.y() + 0.0})) << p.transpose();
    EXPECT_TRUE(s.count({-p.x() + 0.0, p.y() + 0.0})) << p.transpose();
    EXPECT_TRUE(s.count({p.y() + 0.0, p.x() + 0.0})) << p.transpose();
  }
  const Mesh q = triangulate(make_fourier_domain({0.0, 0.1}, {}), 0.15);
  const auto sq = node_set(q);
  for (const auto& p : q.nodes) EXPECT_TRUE(sq.count({p.x() + 0.0, -p.y() + 0.0}));
}

TEST(Mesher, UnsymmetricMeshingOfATranslatedDomainIsTranslated) {
  const BoundaryCurve c = make_fourier_domain({0.0, 0.1, 0.05}, {0.0, 0.0, 0.03});
  const PerturbationField shift = make_translation_field(c, 1);
  MeshOptions plain;
  plain.use_symmetry = false;
  const Mesh a = triangulate(map_domain(c, shift, 0.0), 0.1, plain);
  const Mesh b = triangulate(map_domain(c, shift, 0.25), 0.1, plain);
  ASSERT_EQ(a.nodes.size(), b.nodes.size());
  ASSERT_EQ(a.triangles, b.triangles);
  double worst = 0.0;
  for (size_t i = 0; i < a.nodes.size(); ++i)
    worst = std::max(worst, (b.nodes[i] - a.nodes[i] - Vec2(0.25, 0.0)).norm());
  EXPECT_LT(worst, 1e-12);
}

TEST(Mesher, TextRoundTripIsBitExact) {
  const BoundaryCurve c = make_ellipse(1.2, 0.7);
  const Mesh m = triangulate(c, 0.13);
  const std::string text = mesh_to_text(m);
  const Mesh back = mesh_from_text(text);
  EXPECT_EQ(mesh_to_text(back), text);
  ASSERT_EQ(back.nodes.size(), m.nodes.size());
  for (size_t i = 0; i < m.nodes.size(); ++i) EXPECT_EQ(back.nodes[i], m.nodes[i]);
  EXPECT_EQ(back.triangles, m.triangles);
  EXPECT_THROW(mesh_from_text("3 1 3 0.1\n0 0\n"), MeshError);
}

TEST(Mesher, RejectsMeshSizeThatDoesNotResolveCurvature) {
  // max curvature of the 1.5 x 0.5 ellipse is 1.5 / 0.25 = 6
  EXPECT_THROW(triangulate(make_ellipse(1.5, 0.5), 0.1), MeshError);
  EXPECT_NO_THROW(triangulate(make_ellipse(1.5, 0.5), 0.05));
  EXPECT_THROW(triangulate(make_disc(1.0), -0.1), MeshError);
}

TEST(Mesher, ScaledCurveGivesScaledMesh) {
  const Mesh a = triangulate(make_disc(1.0), 0.1);
  const Mesh b = triangulate(make_disc(2.0), 0.2);
  ASSERT_EQ(a.nodes.size(), b.nodes.size());
  EXPECT_NEAR(b.area(), 4.0 * a.area(), 1e-12);
}
