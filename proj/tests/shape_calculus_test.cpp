#include "buckle/disc_oracle.hpp"
#include "buckle/shape_calculus.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace buckle;

namespace {

std::shared_ptr<const FeSpace> space_on(const BoundaryCurve& c, double h, int levels = 0) {
  return std::make_shared<const FeSpace>(triangulate_refined(c, h, levels), c);
}

// Coarse unit-disc solution shared by the tests below.
const BucklingSolution& disc_solution() {
  static const BucklingSolution sol = solve_buckling(space_on(make_disc(1.0), 0.1, 1));
  return sol;
}

const DirichletSolution& disc_dirichlet_modes() {
  static const DirichletSolution dir = solve_dirichlet(disc_solution().space, 6);
  return dir;
}

DiscreteField oracle_dx(const BucklingSolution& sol) {
  const RadialSolution u = disc_buckling(1.0);
  return {sol.space, interpolate(*sol.space, [&](const Vec2& x) { return u.gradient(x).x(); }), FieldKind::composite};
}

}  // namespace

TEST(Buckling, DiscEigenpairNormalizationAndSign) {
  const BucklingSolution& sol = disc_solution();
  EXPECT_NEAR(sol.lambda, disc_buckling(1.0).eigenvalue, 0.005 * sol.lambda);
  EXPECT_GT(sol.lambda, disc_buckling(1.0).eigenvalue);  // conforming in u = 0, coercive penalty
  EXPECT_NEAR(sol.forms.B.energy(sol.u.coeffs), 1.0, 1e-12);
  EXPECT_GT(boundary_trace_laplacian(sol.u).mean(), 0.0);
  EXPECT_GT((sol.second - sol.lambda) / sol.lambda, 0.5);
  for (int i = 0; i < sol.space->size(); ++i)
    if (sol.space->is_boundary_dof(i)) EXPECT_EQ(sol.u.coeffs[i], 0.0);
}

TEST(Buckling, ScaledDomainScalesTheEigenvalue) {
  const double a = solve_buckling(space_on(make_ellipse(1.2, 0.9), 0.1)).lambda;
  const double b = solve_buckling(space_on(make_ellipse(2.4, 1.8), 0.2)).lambda;
  EXPECT_NEAR(4.0 * b, a, 1e-8 * a);
}

TEST(Dirichlet, DiscModesSignsAndNormalization) {
  const DirichletSolution& dir = disc_dirichlet_modes();
  EXPECT_NEAR(dir.lambda[0], disc_dirichlet(1.0, 1).eigenvalue, 2e-3 * dir.lambda[0]);
  const Vec q = basis_integrals(*dir.space);
  EXPECT_GT(q.dot(dir.u[0].coeffs), 0.0);
  // degenerate pair: one mean-free member, the other with nonpositive mean
  EXPECT_EQ(dir.cluster[1], dir.cluster[2]);
  EXPECT_NEAR(q.dot(dir.u[1].coeffs), 0.0, 1e-12);
  EXPECT_LE(q.dot(dir.u[2].coeffs), 1e-12);
  for (const auto& u : dir.u) EXPECT_NEAR(dir.forms.M.energy(u.coeffs), 1.0, 1e-10);
  EXPECT_NEAR(q.sum(), dir.space->mesh().area(), 1e-12);
}

TEST(Criticality, ConstantMatchesTheAnalyticDiscValue) {
  EXPECT_NEAR(critical_constant(disc_buckling(1.0).eigenvalue, std::numbers::pi), disc_c0(1.0), 1e-12);
  EXPECT_NEAR(critical_constant(4.0, 2.0, 3), std::sqrt(8.0 / 6.0), 1e-15);
}

TEST(Criticality, DiscIsCriticalEllipseIsNot) {
  const CriticalityReport disc = criticality_report(disc_solution());
  EXPECT_TRUE(disc.critical());
  EXPECT_NEAR(disc.rel_value, disc.lambda, 0.05 * disc.lambda);
  EXPECT_LT(disc.w_residual, 0.05 * disc.c0);
  const CriticalityReport ell = criticality_report(solve_buckling(space_on(make_ellipse(1.5, 1.0), 0.1)));
  EXPECT_FALSE(ell.critical());
  EXPECT_GT(ell.trace_max_deviation, 0.3);
}

TEST(FirstVariation, DiscValues) {
  const BucklingSolution& sol = disc_solution();
  const BoundaryCurve& c = sol.space->curve();
  TrigSeries one;
  one.constant = 1.0;
  // Lambda((1 + t) disc) = Lambda / (1 + t)^2
  EXPECT_NEAR(first_variation(sol, make_normal_field(c, one)), -2.0 * sol.lambda, 0.06 * 2.0 * sol.lambda);
  EXPECT_NEAR(first_variation(sol, make_translation_field(c, 1)), 0.0, 1e-8);
  EXPECT_NEAR(first_variation(sol, make_normal_field(c, TrigSeries::mode(2))), 0.0, 1e-8);
  // linear in the field
  const double a = first_variation(sol, make_normal_field(c, one));
  one.constant = 2.5;
  EXPECT_NEAR(first_variation(sol, make_normal_field(c, one)), 2.5 * a, 1e-10 * std::abs(a));
}

TEST(ShapeDerivative, TranslationOnTheDisc) {
  const BucklingSolution& sol = disc_solution();
  const ShapeDerivative sd = solve_shape_derivative(sol, make_translation_field(sol.space->curve(), 1));
  EXPECT_LT(std::abs(sd.constraint), 1e-10);
  EXPECT_LT(sd.neumann_residual, 0.05);
  EXPECT_NEAR(sd.multiplier, 0.0, 1e-6);
  const DiscreteField d1 = oracle_dx(sol);
  const Vec diff = sd.u_prime.coeffs + d1.coeffs;
  EXPECT_LT(std::sqrt(sol.forms.B.energy(diff) / sol.forms.B.energy(d1.coeffs)), 0.02);
}

TEST(ShapeDerivative, GatesRefuse) {
  const BucklingSolution ell = solve_buckling(space_on(make_ellipse(1.5, 1.0), 0.1));
  EXPECT_THROW(solve_shape_derivative(ell, make_translation_field(ell.space->curve(), 1)), GateRefusal);
  ShapeDerivativeOptions strict;
  strict.gap_threshold = 10.0;
  const BucklingSolution& sol = disc_solution();
  EXPECT_THROW(solve_shape_derivative(sol, make_translation_field(sol.space->curve(), 1), strict), GateRefusal);
}

TEST(Energy, KernelAndRepresentations) {
  const BucklingSolution& sol = disc_solution();
  const EnergyFunctional en(sol);
  EXPECT_LT(std::abs(en.E(sol.u)), 0.01 * sol.lambda);
  const DiscreteField d1 = oracle_dx(sol);
  const double scale = en.laplacian_energy(d1);
  EXPECT_LT(std::abs(en.E(d1)), 0.02 * scale);
  EXPECT_LT(std::abs(en.E(d1) - en.E2(d1)), 0.05 * scale);
  // oint (d_nu d1 u)^2 H = Lambda on the unit disc
  EXPECT_NEAR(en.curvature_term(d1), sol.lambda, 0.03 * sol.lambda);
  EXPECT_NEAR(en.gradient_energy(sol.u), 1.0, 1e-12);
}

TEST(ZSet, MembershipAndSamples) {
  const BucklingSolution& sol = disc_solution();
  const DirichletSolution& dir = disc_dirichlet_modes();
  EXPECT_FALSE(z_membership(sol.u, sol).member);   // no boundary flux to speak of
  EXPECT_TRUE(z_membership(oracle_dx(sol), sol).member);
  EXPECT_FALSE(z_membership(dir.u[0], sol).member);  // nonzero boundary flux
  const auto a = z_samples(sol, dir, 10, 5u);
  const auto b = z_samples(sol, dir, 10, 5u);
  const auto c = z_samples(sol, dir, 10, 6u);
  ASSERT_EQ(a.size(), 10u);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(z_membership(a[i], sol).member);
    EXPECT_EQ((a[i].coeffs - b[i].coeffs).norm(), 0.0);
  }
  EXPECT_GT((a[0].coeffs - c[0].coeffs).norm(), 0.0);
  const EnergyFunctional en(sol);
  const auto t = tilde_energy(a[0], sol, en);
  ASSERT_TRUE(t.has_value());
  EXPECT_FALSE(tilde_energy(sol.u, sol, en).has_value());
}

TEST(Psi, DiscTestFunction) {
  const BucklingSolution& sol = disc_solution();
  const DirichletSolution& dir = disc_dirichlet_modes();
  const PsiResult psi = build_psi(sol, dir);
  EXPECT_NEAR(psi.t, 1.0, 1e-6);
  EXPECT_NEAR(psi.c, 0.0, 1e-6);
  EXPECT_FALSE(psi.forced);
  EXPECT_TRUE(z_membership(psi.psi, sol).member);
  const EnergyFunctional en(sol);
  const PsiEnergy pe = psi_energy_identity(psi, sol, en);
  EXPECT_NEAR(pe.closed_form, psi.lambda2 * (psi.lambda2 - sol.lambda), 1e-12);

  const PsiResult forced = build_psi(sol, dir, 0.5);
  EXPECT_TRUE(forced.forced);
  EXPECT_EQ(forced.t, 0.5);
  const PsiEnergy pf = psi_energy_identity(forced, sol, en);
  const double l1 = forced.lambda1, l2 = forced.lambda2, L = sol.lambda;
  EXPECT_NEAR(pf.closed_form, 0.25 * l1 * (l1 - L) + 0.25 * l2 * (l2 - L), 1e-12);
  EXPECT_NEAR(pf.mean_term, 0.5 * l1 * forced.mean_u1 + 0.5 * l2 * forced.mean_u2, 1e-12);
  EXPECT_NEAR(pf.expansion,
              pf.closed_form - 2.0 * forced.c * critical_constant(L, volume(sol.space->curve())) * pf.mean_term,
              1e-10);
  EXPECT_THROW(build_psi(sol, dir, 1.5), std::domain_error);
}

TEST(Payne, EllipseHasStrictGap) {
  const PayneResult p = payne_check(space_on(make_ellipse(1.5, 1.0), 0.1));
  EXPECT_GT(p.gap, 0.02 * p.lambda);
  EXPECT_EQ(p.gap, p.lambda - p.lambda2);
}

TEST(Sweep, TranslationLeavesTheEigenvalueUnchanged) {
  const BoundaryCurve c = make_disc(1.0);
  SweepOptions so;
  so.h = 0.1;
  const PerturbationField e1 = make_translation_field(c, 1);
  const double l0 = lambda_of_t(c, e1, 0.0, so);
  EXPECT_NEAR(lambda_of_t(c, e1, 0.3, so), l0, 1e-9 * l0);
  TrigSeries one;
  one.constant = 1.0;
  // Omega_t = (1 + t) disc, meshed at the same absolute h
  const double grown = lambda_of_t(c, make_normal_field(c, one), 0.2, so);
  EXPECT_NEAR(grown, l0 / 1.44, 0.01 * l0);
}
