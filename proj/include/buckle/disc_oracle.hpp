#pragma once

#include "buckle/geometry.hpp"

namespace buckle {

/// J_n(x) for n in {0, 1, 2} and 0 <= x <= 50. Power series in long double up
/// to x = 12, Miller backward recurrence beyond; absolute error below 1e-12.
double bessel_j(int order, double x);

/// index-th positive root of J_order, order in {0, 1}.
double bessel_root(int order, int index = 1);

/// Analytic eigenpair on a disc centered at the origin.
struct RadialSolution {
  enum class Problem { buckling, dirichlet };
  enum class Normalization { gradient, mass };

  Problem problem;
  Normalization normalization;
  double radius;
  double eigenvalue;
  double root;       ///< Bessel root setting the wave number root / radius
  int bessel_order;  ///< 0: radial profile, 1: profile J_1 times cos(th)
  double amplitude;
  double shift;      ///< constant subtracted from the Bessel profile (buckling only)

  double wave_number() const { return root / radius; }
  double value(const Vec2& x) const;
  Vec2 gradient(const Vec2& x) const;
  /// Laplacian of value(); radial problems only.
  double laplacian(const Vec2& x) const;
  /// Residual of the defining ODE/PDE at radius r (zero for exact profiles).
  double ode_residual(double r) const;
};

/// Lambda = (j11/R)^2, u = A (J0(j11 r/R) - J0(j11)), int |grad u|^2 = 1, A > 0.
RadialSolution disc_buckling(double radius);

/// k = 1: J0 mode, k = 2: J1(j11 r/R) cos th; both with int u^2 = 1.
RadialSolution disc_dirichlet(double radius, int k);

/// Boundary value of Delta u for the gradient-normalized disc eigenfunction.
double disc_c0(double radius);

/// Delta u + Lambda u at radius r; equals disc_c0 for every r.
double disc_w_identity(double radius, double r);

}  // namespace buckle
