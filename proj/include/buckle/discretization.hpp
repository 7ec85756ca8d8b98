#pragma once

#include "buckle/mesher.hpp"

#include <Eigen/Sparse>

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace buckle {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

/// Affine element data; barycentric gradients are constant.
struct ElementGeometry {
  std::array<Vec2, 3> vertex;
  std::array<Vec2, 3> grad_lambda;
  double area = 0.0;

  Eigen::Vector3d barycentric(const Vec2& x) const;
  Vec2 centroid() const { return (vertex[0] + vertex[1] + vertex[2]) / 3.0; }
};

/// Values, gradients and Hessians of the six quadratic basis functions of one
/// element at a point. The point may lie outside the element; the element
/// polynomial is then extended.
struct LocalBasis {
  std::array<double, 6> value;
  std::array<Vec2, 6> grad;
  std::array<Mat2, 6> hess;
};

/// Continuous piecewise quadratic space. Degrees of freedom: mesh nodes first,
/// then one per edge midpoint. Local order per element: vertices 0, 1, 2, then
/// midpoints of edges (0,1), (1,2), (2,0).
class FeSpace {
 public:
  struct Edge {
    int a = 0, b = 0;
    int left = -1, right = -1;  ///< right = -1 on the boundary
    int boundary = -1;          ///< index into mesh().boundary or -1
  };

  FeSpace(Mesh mesh, BoundaryCurve curve);

  const Mesh& mesh() const { return mesh_; }
  const BoundaryCurve& curve() const { return curve_; }

  int size() const { return static_cast<int>(dof_point_.size()); }
  int free_size() const { return static_cast<int>(free_dofs_.size()); }
  int element_count() const { return static_cast<int>(mesh_.triangles.size()); }

  const std::array<int, 6>& element_dofs(int t) const { return element_dofs_[t]; }
  const ElementGeometry& element(int t) const { return geometry_[t]; }
  const Vec2& dof_point(int i) const { return dof_point_[i]; }
  bool is_boundary_dof(int i) const { return free_index_[i] < 0; }
  int free_index(int i) const { return free_index_[i]; }
  const std::vector<int>& free_dofs() const { return free_dofs_; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Element adjacent to boundary edge k of the mesh.
  int boundary_element(int k) const { return boundary_element_[k]; }
  /// Edge index of boundary edge k of the mesh.
  int boundary_edge(int k) const { return boundary_edge_[k]; }

  LocalBasis basis(int t, const Vec2& x) const;

  /// Element containing x, or -1.
  int locate(const Vec2& x) const;

 private:
  Mesh mesh_;
  BoundaryCurve curve_;
  std::vector<std::array<int, 6>> element_dofs_;
  std::vector<ElementGeometry> geometry_;
  std::vector<Vec2> dof_point_;
  std::vector<int> free_index_;
  std::vector<int> free_dofs_;
  std::vector<Edge> edges_;
  std::vector<int> boundary_element_;
  std::vector<int> boundary_edge_;
  // uniform bucket grid for point location
  Vec2 grid_origin_;
  double grid_cell_ = 1.0;
  int grid_nx_ = 0, grid_ny_ = 0;
  std::vector<std::vector<int>> grid_;
};

enum class FormTag { bending, gradient, stiffness, mass };

std::string form_tag_name(FormTag tag);

/// Symmetric matrix over all degrees of freedom of a space.
struct SparseSymmetricForm {
  FormTag tag;
  SpMat matrix;

  int dim() const { return static_cast<int>(matrix.rows()); }
  /// Block on the free (non-boundary) degrees of freedom.
  SpMat constrained(const FeSpace& space) const;
  double energy(const Vec& x) const { return x.dot(matrix * x); }
};

enum class SecondOrderForm {
  hessian,    ///< element integrand D2 phi : D2 chi, edge average of d_nn
  laplacian,  ///< element integrand Delta phi Delta chi, edge average of Delta
};

struct BendingOptions {
  double penalty = 20.0;
  SecondOrderForm form = SecondOrderForm::hessian;
  bool interior_edges = true;
  bool boundary_edges = true;
};

struct BucklingForms {
  SparseSymmetricForm A;  ///< interior-penalty bending form
  SparseSymmetricForm B;  ///< int grad phi . grad chi
};

/// A: sum_T int D2 phi : D2 chi - sum_e int {d_nn phi}[d_n chi] + {d_nn chi}[d_n phi]
///    + sum_e penalty / |e| int [d_n phi][d_n chi], over interior and (optionally)
/// boundary edges. Throws std::invalid_argument for penalty <= 0.
BucklingForms assemble_buckling(const FeSpace& space, const BendingOptions& options = {});

struct LaplaceForms {
  SparseSymmetricForm K;  ///< stiffness
  SparseSymmetricForm M;  ///< mass
};
LaplaceForms assemble_laplace(const FeSpace& space);

enum class FieldKind { buckling, dirichlet, shape_derivative, composite };

/// Coefficients over all degrees of freedom of a space.
struct DiscreteField {
  std::shared_ptr<const FeSpace> space;
  Vec coeffs;
  FieldKind kind = FieldKind::composite;
};

/// Coefficient vector from free-dof values (boundary dofs set to zero).
Vec extend_free(const FeSpace& space, const Vec& free_values);
Vec restrict_free(const FeSpace& space, const Vec& coeffs);

/// Nodal interpolant of f.
Vec interpolate(const FeSpace& space, const std::function<double(const Vec2&)>& f);

struct PointValue {
  double value = 0.0;
  Vec2 gradient = Vec2::Zero();
  Mat2 hessian = Mat2::Zero();
  double laplacian = 0.0;
  int element = -1;
};

/// Thrown when a point is neither inside the mesh nor within one mesh size of
/// its boundary.
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Field value, gradient and element Hessian at x. Points of the exact domain
/// just outside the polygonal mesh are handled by extending the nearest
/// boundary element's polynomial.
PointValue evaluate(const DiscreteField& field, const Vec2& x);

/// Superconvergent patch recovery of the Laplacian: element Laplacians sampled
/// at centroids are fitted by a local linear polynomial around every interior
/// vertex; each degree of freedom takes the mean of the fits of the adjacent
/// interior vertices. The result is a field in the same space.
DiscreteField recover_laplacian(const DiscreteField& field);

/// Quadrature node on the exact boundary curve, attached to the boundary edge
/// whose parameter interval contains it.
struct TraceSample {
  double theta = 0.0;
  double weight = 0.0;  ///< arclength weight
  Vec2 point;
  Vec2 normal;
  double curvature = 0.0;
  int edge = 0;     ///< index into mesh().boundary
  int element = 0;  ///< adjacent element, used for evaluation
};

/// Gauss nodes (per boundary edge, in the curve parameter).
std::vector<TraceSample> trace_samples(const FeSpace& space, int order = 4);

/// Scalar function on the boundary, given at trace samples.
struct BoundaryTrace {
  std::vector<TraceSample> samples;
  std::vector<double> values;

  double integral() const;
  double length() const;
  double mean() const { return integral() / length(); }
  /// max |value - mean| / |mean|
  double max_relative_deviation() const;
  /// integral of value^2
  double integral_of_square() const;
};

/// Delta u on the exact boundary. The element polynomials of the recovered
/// Laplacian are evaluated at the trace samples; see recover_laplacian.
BoundaryTrace boundary_trace_laplacian(const DiscreteField& field, int order = 4);
/// d_nu nu u = nu^T D2 u nu on the exact boundary from the recovered Hessian.
BoundaryTrace boundary_trace_normal_second(const DiscreteField& field, int order = 4);
/// d_nu u on the exact boundary from the element gradients.
BoundaryTrace boundary_trace_normal_derivative(const DiscreteField& field, int order = 4);

/// Load vector of the weakly imposed Neumann datum d_n phi = g on boundary
/// edges: sum_e int_e g (-d_nn chi + penalty / |e| d_n chi), with g evaluated
/// at the curve parameter interpolated linearly along each edge.
Vec assemble_normal_derivative_load(const FeSpace& space, const std::function<double(double theta)>& g,
                                    double penalty, SecondOrderForm form = SecondOrderForm::hessian);

/// Coordinate triplets "i j value" of the upper triangle, preceded by
/// "tag dim nnz".
std::string form_to_text(const SparseSymmetricForm& form);
/// "kind n" line followed by one coefficient per line.
std::string field_to_text(const DiscreteField& field);

std::string field_kind_name(FieldKind kind);

}  // namespace buckle
