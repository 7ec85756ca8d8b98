#include "buckle/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace buckle {

namespace {

// Returns (P_n(x), P_n'(x)) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussRule gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(order, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(order, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

GaussRule composite_gauss(double a, double b, int order, int panels) {
  if (panels < 1) throw std::invalid_argument("composite_gauss: panels must be >= 1");
  const GaussRule base = gauss_legendre(order);
  GaussRule rule;
  rule.nodes.reserve(static_cast<size_t>(order) * panels);
  rule.weights.reserve(static_cast<size_t>(order) * panels);
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    for (int q = 0; q < order; ++q) {
      rule.nodes.push_back(lo + 0.5 * width * (base.nodes[q] + 1.0));
      rule.weights.push_back(0.5 * width * base.weights[q]);
    }
  }
  return rule;
}

namespace {

TriangleRule make_degree1() {
  return {{{1.0 / 3, 1.0 / 3, 1.0 / 3}}, {1.0}};
}

TriangleRule make_degree2() {
  TriangleRule r;
  r.points = {{2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 2.0 / 3}};
  r.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  return r;
}

// Dunavant degree 4 (6 points).
TriangleRule make_degree4() {
  TriangleRule r;
  const double a1 = 0.445948490915965, b1 = 1.0 - 2 * a1, w1 = 0.223381589678011;
  const double a2 = 0.091576213509771, b2 = 1.0 - 2 * a2, w2 = 0.109951743655322;
  r.points = {{b1, a1, a1}, {a1, b1, a1}, {a1, a1, b1}, {b2, a2, a2}, {a2, b2, a2}, {a2, a2, b2}};
  r.weights = {w1, w1, w1, w2, w2, w2};
  return r;
}

// Dunavant degree 5 (7 points).
TriangleRule make_degree5() {
  TriangleRule r;
  const double a1 = 0.470142064105115, b1 = 1.0 - 2 * a1, w1 = 0.132394152788506;
  const double a2 = 0.101286507323456, b2 = 1.0 - 2 * a2, w2 = 0.125939180544827;
  r.points = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {b1, a1, a1}, {a1, b1, a1}, {a1, a1, b1},
              {b2, a2, a2}, {a2, b2, a2}, {a2, a2, b2}};
  r.weights = {0.225, w1, w1, w1, w2, w2, w2};
  return r;
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  static const TriangleRule r1 = make_degree1();
  static const TriangleRule r2 = make_degree2();
  static const TriangleRule r4 = make_degree4();
  static const TriangleRule r5 = make_degree5();
  if (degree <= 1) return r1;
  if (degree == 2) return r2;
  if (degree <= 4) return r4;
  if (degree == 5) return r5;
  throw std::invalid_argument("triangle_rule: degree > 5 not available");
}

}  // namespace buckle
