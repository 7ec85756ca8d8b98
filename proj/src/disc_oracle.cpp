#include "buckle/disc_oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace buckle {

namespace {

double bessel_series(int n, double x) {
  const long double half = 0.5L * x;
  long double term = 1.0L;
  for (int k = 1; k <= n; ++k) term *= half / k;
  long double sum = term;
  const long double q = -half * half;
  for (int m = 1; m < 200; ++m) {
    term *= q / (static_cast<long double>(m) * (m + n));
    sum += term;
    if (std::abs(term) < 1e-24L) break;
  }
  return static_cast<double>(sum);
}

double bessel_miller(int n, double x) {
  int top = static_cast<int>(x) + 60;
  if (top % 2) ++top;
  long double jp1 = 0.0L, j = 1e-30L, norm = 0.0L, wanted = 0.0L;
  for (int k = top; k >= 1; --k) {
    const long double jm1 = (2.0L * k / x) * j - jp1;
    jp1 = j;
    j = jm1;
    if ((k - 1) == n) wanted = j;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0L * j;
    if (std::abs(j) > 1e250L) {
      j *= 1e-250L;
      jp1 *= 1e-250L;
      norm *= 1e-250L;
      wanted *= 1e-250L;
    }
  }
  norm += j;  // J_0 term
  return static_cast<double>(wanted / norm);
}

}  // namespace

double bessel_j(int order, double x) {
  if (order < 0 || order > 2) throw std::invalid_argument("bessel_j: order must be 0, 1 or 2");
  if (!(x >= 0.0) || x > 50.0) throw std::domain_error("bessel_j: x outside [0, 50]");
  return x <= 12.0 ? bessel_series(order, x) : bessel_miller(order, x);
}

double bessel_root(int order, int index) {
  if (order != 0 && order != 1) throw std::invalid_argument("bessel_root: order must be 0 or 1");
  if (index < 1) throw std::invalid_argument("bessel_root: index must be >= 1");
  double lo = 0.5, hi = 0.5;
  int found = 0;
  const double step = 0.05;
  while (found < index) {
    lo = hi;
    hi = lo + step;
    if (bessel_j(order, lo) * bessel_j(order, hi) < 0.0) ++found;
  }
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (bessel_j(order, lo) * bessel_j(order, mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  double x = 0.5 * (lo + hi);
  const double f = bessel_j(order, x);
  const double df = order == 0 ? -bessel_j(1, x) : bessel_j(0, x) - bessel_j(1, x) / x;
  x -= f / df;
  return x;
}

RadialSolution disc_buckling(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("disc_buckling: radius must be positive");
  const double j11 = bessel_root(1);
  const double j0 = bessel_j(0, j11);
  RadialSolution s{};
  s.problem = RadialSolution::Problem::buckling;
  s.normalization = RadialSolution::Normalization::gradient;
  s.radius = radius;
  s.root = j11;
  s.eigenvalue = (j11 / radius) * (j11 / radius);
  s.bessel_order = 0;
  s.amplitude = 1.0 / (std::sqrt(std::numbers::pi) * j11 * std::abs(j0));
  s.shift = j0;
  return s;
}

RadialSolution disc_dirichlet(double radius, int k) {
  if (!(radius > 0.0)) throw std::invalid_argument("disc_dirichlet: radius must be positive");
  if (k != 1 && k != 2) throw std::invalid_argument("disc_dirichlet: k must be 1 or 2");
  RadialSolution s{};
  s.problem = RadialSolution::Problem::dirichlet;
  s.normalization = RadialSolution::Normalization::mass;
  s.radius = radius;
  s.shift = 0.0;
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  if (k == 1) {
    s.root = bessel_root(0);
    s.bessel_order = 0;
    s.amplitude = 1.0 / (sqrt_pi * radius * std::abs(bessel_j(1, s.root)));
  } else {
    s.root = bessel_root(1);
    s.bessel_order = 1;
    s.amplitude = std::sqrt(2.0) / (sqrt_pi * radius * std::abs(bessel_j(2, s.root)));
  }
  s.eigenvalue = (s.root / radius) * (s.root / radius);
  return s;
}

double RadialSolution::value(const Vec2& x) const {
  const double r = x.norm();
  const double kr = wave_number() * r;
  if (bessel_order == 0) return amplitude * (bessel_j(0, kr) - shift);
  if (r == 0.0) return 0.0;
  return amplitude * bessel_j(1, kr) * (x.x() / r);
}

Vec2 RadialSolution::gradient(const Vec2& x) const {
  const double r = x.norm();
  const double k = wave_number();
  const double kr = k * r;
  if (bessel_order == 0) {
    if (r == 0.0) return Vec2::Zero();
    return -amplitude * k * bessel_j(1, kr) * (x / r);
  }
  // J1(kr) cos th = J1(kr) x / r
  if (r == 0.0) return {0.5 * amplitude * k, 0.0};
  const double j1 = bessel_j(1, kr);
  const double dj1 = k * (bessel_j(0, kr) - j1 / kr);
  const double c = x.x() / r, s = x.y() / r;
  // d/dx, d/dy of f(r) cos th with f = J1(kr)
  return amplitude * Vec2(dj1 * c * c + j1 / r * s * s, dj1 * c * s - j1 / r * c * s);
}

double RadialSolution::laplacian(const Vec2& x) const {
  const double k = wave_number();
  const double r = x.norm();
  if (bessel_order == 0) return -amplitude * k * k * bessel_j(0, k * r);
  return -k * k * (value(x));
}

double RadialSolution::ode_residual(double r) const {
  // Radial part f(r) of the mode; Bessel's equation r^2 f'' + r f' + (k^2 r^2 - m^2) f = 0.
  const double k = wave_number();
  const double kr = k * r;
  const int m = bessel_order;
  double f, df, d2f;
  if (m == 0) {
    f = bessel_j(0, kr);
    df = -k * bessel_j(1, kr);
    d2f = -k * k * (bessel_j(0, kr) - bessel_j(1, kr) / kr);
  } else {
    f = bessel_j(1, kr);
    df = k * (bessel_j(0, kr) - f / kr);
    // J1'' = -J1' / x - (1 - 1/x^2) J1
    d2f = k * k * (-(bessel_j(0, kr) - f / kr) / kr - (1.0 - 1.0 / (kr * kr)) * f);
  }
  return r * r * d2f + r * df + (kr * kr - m * m) * f;
}

double disc_c0(double radius) {
  const RadialSolution u = disc_buckling(radius);
  return std::sqrt(u.eigenvalue / (std::numbers::pi * radius * radius));
}

double disc_w_identity(double radius, double r) {
  if (r < 0.0 || r > radius) throw std::invalid_argument("disc_w_identity: r outside [0, radius]");
  const RadialSolution u = disc_buckling(radius);
  const Vec2 x(r, 0.0);
  return u.laplacian(x) + u.eigenvalue * u.value(x);
}

}  // namespace buckle
