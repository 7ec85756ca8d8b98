#pragma once

#include "buckle/geometry.hpp"

#include <array>
#include <string>
#include <vector>

namespace buckle {

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Boundary edge a -> b (counterclockwise) with the curve parameters of its
/// endpoints; theta_b > theta_a, possibly beyond 2 pi on the closing edge.
struct BoundaryEdge {
  int a = 0, b = 0;
  double theta_a = 0.0, theta_b = 0.0;
};

/// Straight-edged triangulation whose boundary nodes lie on the exact curve.
struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;  ///< counterclockwise
  std::vector<BoundaryEdge> boundary;         ///< one closed loop, in order
  double h = 0.0;                             ///< target size

  double area() const;
  double boundary_length() const;
  double min_angle_degrees() const;
  double max_edge_length() const;
  std::vector<bool> boundary_node_mask() const;
};

struct MeshOptions {
  bool use_symmetry = true;  ///< mesh a fundamental wedge and reflect it
  int smoothing_rounds = 8;
};

/// Boundary-fitted triangulation with target edge length h.
/// Throws MeshError when h does not resolve the curvature (h max|H| > 0.5).
Mesh triangulate(const BoundaryCurve& curve, double h, const MeshOptions& options = {});

/// Uniform red refinement; boundary midpoints are placed on the curve at the
/// parameter midpoint.
Mesh refine(const Mesh& mesh, const BoundaryCurve& curve);

/// triangulate(curve, h0) followed by `levels` refinements.
Mesh triangulate_refined(const BoundaryCurve& curve, double h0, int levels, const MeshOptions& options = {});

/// Throws MeshError describing the first violated invariant.
void validate_mesh(const Mesh& mesh, const BoundaryCurve& curve, double min_angle_degrees = 20.0);

/// Text form: "nodes triangles boundary_edges h" line, then the node lines
/// "x y", triangle lines "i j k" and boundary lines "i j theta_i theta_j".
/// Numbers are written in shortest round-trip form.
std::string mesh_to_text(const Mesh& mesh);
Mesh mesh_from_text(const std::string& text);

}  // namespace buckle
