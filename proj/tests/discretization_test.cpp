#include "buckle/discretization.hpp"
#include "buckle/eigensolver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace buckle;

namespace {

// q = 1 + 2x - y + x^2/2 + xy - 3y^2: Delta q = -5, |D2 q|^2 = 39
double q(const Vec2& x) { return 1 + 2 * x.x() - x.y() + 0.5 * x.x() * x.x() + x.x() * x.y() - 3 * x.y() * x.y(); }
Vec2 grad_q(const Vec2& x) { return Vec2(2 + x.x() + x.y(), -1 + x.x() - 6 * x.y()); }

std::shared_ptr<const FeSpace> space_on(const BoundaryCurve& c, double h) {
  return std::make_shared<const FeSpace>(triangulate(c, h), c);
}

}  // namespace

TEST(FeSpace, DegreeOfFreedomCounts) {
  const auto s = space_on(make_ellipse(1.3, 0.9), 0.12);
  const Mesh& m = s->mesh();
  EXPECT_EQ(s->size(), static_cast<int>(m.nodes.size() + s->edges().size()));
  EXPECT_EQ(s->free_size(), s->size() - 2 * static_cast<int>(m.boundary.size()));
  for (int k = 0; k < static_cast<int>(m.boundary.size()); ++k) {
    const auto& e = s->edges()[s->boundary_edge(k)];
    EXPECT_EQ(e.right, -1);
    EXPECT_EQ(e.left, s->boundary_element(k));
  }
}

TEST(FeSpace, QuadraticsAreReproducedExactly) {
  const auto s = space_on(make_fourier_domain({0.0, 0.1}, {0.0, 0.0, 0.05}), 0.1);
  const DiscreteField f{s, interpolate(*s, q), FieldKind::composite};
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-0.7, 0.7);
  for (int i = 0; i < 50; ++i) {
    const Vec2 x(U(rng), U(rng));
    const PointValue v = evaluate(f, x);
    EXPECT_NEAR(v.value, q(x), 1e-12);
    EXPECT_NEAR((v.gradient - grad_q(x)).norm(), 0.0, 1e-11);
    EXPECT_NEAR(v.laplacian, -5.0, 1e-10);
    EXPECT_NEAR(v.hessian(0, 1), 1.0, 1e-10);
  }
  EXPECT_THROW(evaluate(f, Vec2(5.0, 5.0)), EvaluationError);
}

TEST(Forms, MassStiffnessAndGradientFormsAreConsistent) {
  const auto s = space_on(make_ellipse(1.3, 0.9), 0.12);
  const LaplaceForms lf = assemble_laplace(*s);
  const BucklingForms bf = assemble_buckling(*s);
  const Vec one = Vec::Ones(s->size());
  EXPECT_NEAR(one.dot(lf.M.matrix * one), s->mesh().area(), 1e-12);
  EXPECT_NEAR((lf.K.matrix * one).norm(), 0.0, 1e-11);
  EXPECT_NEAR((SpMat(lf.K.matrix - bf.B.matrix)).norm(), 0.0, 1e-12);
  // int |grad q|^2 for a linear field is |grad|^2 times the area
  const Vec lin = interpolate(*s, [](const Vec2& x) { return 3 * x.x() - 2 * x.y(); });
  EXPECT_NEAR(bf.B.energy(lin), 13.0 * s->mesh().area(), 1e-10);
}

TEST(Forms, InteriorPenaltyFormsIntegrateGlobalQuadraticsExactly) {
  const auto s = space_on(make_disc(1.0), 0.15);
  const Vec x = interpolate(*s, q);
  BendingOptions o;
  o.boundary_edges = false;
  o.form = SecondOrderForm::laplacian;
  EXPECT_NEAR(assemble_buckling(*s, o).A.energy(x), 25.0 * s->mesh().area(), 1e-10 * 25.0 * s->mesh().area());
  o.form = SecondOrderForm::hessian;
  EXPECT_NEAR(assemble_buckling(*s, o).A.energy(x), 39.0 * s->mesh().area(), 1e-10 * 39.0 * s->mesh().area());
}

TEST(Forms, BendingFormIsSymmetricAndCoercive) {
  const auto s = space_on(make_ellipse(1.3, 0.9), 0.15);
  const BucklingForms f = assemble_buckling(*s);
  EXPECT_NEAR(SpMat(f.A.matrix - SpMat(f.A.matrix.transpose())).norm(), 0.0, 1e-9);
  EXPECT_TRUE(is_positive_definite(f.A.constrained(*s)));
  EXPECT_TRUE(is_positive_definite(f.B.constrained(*s)));
  BendingOptions bad;
  bad.penalty = 0.0;
  EXPECT_THROW(assemble_buckling(*s, bad), std::invalid_argument);
  // a far too small penalty loses coercivity
  BendingOptions weak;
  weak.penalty = 0.05;
  EXPECT_FALSE(is_positive_definite(assemble_buckling(*s, weak).A.constrained(*s)));
}

TEST(BoundaryTraces, QuadratureCoversTheExactCurve) {
  const BoundaryCurve c = make_ellipse(1.5, 1.0);
  const auto s = space_on(c, 0.1);
  double len = 0.0;
  for (const auto& t : trace_samples(*s)) {
    len += t.weight;
    EXPECT_NEAR((t.point - c.point(t.theta)).norm(), 0.0, 1e-14);
  }
  EXPECT_NEAR(len, perimeter(c), 1e-10);
}

TEST(BoundaryTraces, QuadraticFieldTracesAreExact) {
  const auto s = space_on(make_disc(1.0), 0.1);
  const DiscreteField r2{s, interpolate(*s, [](const Vec2& x) { return x.squaredNorm(); }), FieldKind::composite};
  const BoundaryTrace dn = boundary_trace_normal_derivative(r2);
  for (double v : dn.values) EXPECT_NEAR(v, 2.0, 1e-10);
  EXPECT_NEAR(dn.integral(), 4.0 * std::numbers::pi, 1e-9);
  const BoundaryTrace lap = boundary_trace_laplacian(DiscreteField{s, interpolate(*s, q), FieldKind::composite});
  for (double v : lap.values) EXPECT_NEAR(v, -5.0, 1e-9);
  EXPECT_NEAR(lap.max_relative_deviation(), 0.0, 1e-9);
  for (double v : boundary_trace_normal_second(r2).values) EXPECT_NEAR(v, 2.0, 1e-9);
}

TEST(BoundaryTraces, RecoveredLaplacianConvergesForSmoothField) {
  // f = cos(x) e^y: Delta f = 0
  auto f = [](const Vec2& x) { return std::cos(x.x()) * std::exp(x.y()); };
  const BoundaryCurve c = make_disc(1.0);
  double prev = 0.0;
  for (int level = 0; level < 3; ++level) {
    auto s = std::make_shared<const FeSpace>(triangulate_refined(c, 0.2, level), c);
    const BoundaryTrace lap = boundary_trace_laplacian(DiscreteField{s, interpolate(*s, f), FieldKind::composite});
    double worst = 0.0;
    for (double v : lap.values) worst = std::max(worst, std::abs(v));
    if (level > 0) EXPECT_LT(worst, 0.6 * prev);
    prev = worst;
  }
  EXPECT_LT(prev, 0.05);
}

TEST(NormalDerivativeLoad, VanishesForZeroDatumAndIsLinear) {
  const auto s = space_on(make_disc(1.0), 0.15);
  EXPECT_EQ(assemble_normal_derivative_load(*s, [](double) { return 0.0; }, 20.0).norm(), 0.0);
  const Vec a = assemble_normal_derivative_load(*s, [](double th) { return std::cos(th); }, 20.0);
  const Vec b = assemble_normal_derivative_load(*s, [](double th) { return 2 * std::cos(th); }, 20.0);
  EXPECT_NEAR((b - 2 * a).norm(), 0.0, 1e-12 * b.norm());
}

TEST(TextForms, HeaderLines) {
  const auto s = space_on(make_disc(1.0), 0.3);
  const BucklingForms f = assemble_buckling(*s);
  const std::string text = form_to_text(f.A);
  EXPECT_EQ(text.rfind("bending " + std::to_string(s->size()) + " ", 0), 0u);
  const DiscreteField u{s, Vec::Constant(s->size(), 0.25), FieldKind::buckling};
  const std::string ft = field_to_text(u);
  EXPECT_EQ(ft.rfind("buckling " + std::to_string(s->size()) + "\n", 0), 0u);
  EXPECT_EQ(std::count(ft.begin(), ft.end(), '\n'), s->size() + 1);
}
