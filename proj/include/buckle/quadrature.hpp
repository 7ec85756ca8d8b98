#pragma once

#include <array>
#include <vector>

namespace buckle {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int order);

/// Composite Gauss rule on [a, b] split into uniform panels.
GaussRule composite_gauss(double a, double b, int order, int panels);

/// Symmetric triangle rule in barycentric coordinates; weights sum to 1
/// (multiply by the element area).
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
};

/// Smallest built-in rule exact for polynomials of the given degree (<= 5).
const TriangleRule& triangle_rule(int degree);

}  // namespace buckle
