#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace buckle {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Thrown for invalid geometric input (nonpositive radius, self-intersection, ...).
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Trigonometric polynomial in the boundary parameter:
/// constant + sum_k cos_coeffs[k-1] cos(k th) + sin_coeffs[k-1] sin(k th).
struct TrigSeries {
  double constant = 0.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;

  static TrigSeries mode(int k, double amplitude = 1.0);

  double value(double th) const { return eval(th, 0); }
  double d1(double th) const { return eval(th, 1); }
  double d2(double th) const { return eval(th, 2); }
  /// derivative of the given order (0..3)
  double eval(double th, int order) const;
};

enum class CurveKind { disc, ellipse, fourier, mapped };

/// Reflection symmetry used by the mesher to build exactly symmetric meshes.
enum class Symmetry {
  none,
  quadrant,  ///< reflections in both coordinate axes
  octant,    ///< quadrant plus the diagonal x = y
};

/// Local boundary frame at one parameter value.
struct BoundaryGeometry {
  Vec2 point;
  Vec2 normal;    ///< unit outward normal
  Vec2 tangent;   ///< unit tangent, counterclockwise
  double curvature = 0.0;  ///< signed, positive for convex arcs
  double speed = 0.0;      ///< |p'(th)|, the arclength element
};

class PerturbationField;

/// Smooth closed curve p(th), th in [0, 2 pi), counterclockwise.
/// Cheap to copy; immutable.
class BoundaryCurve {
 public:
  struct Disc {
    double radius;
  };
  struct Ellipse {
    double a, b;
  };
  struct Fourier {
    double scale;
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;
  };
  struct Mapped {
    std::shared_ptr<const BoundaryCurve> base;
    std::shared_ptr<const PerturbationField> field;
    double t;
  };
  using Rep = std::variant<Disc, Ellipse, Fourier, Mapped>;

  explicit BoundaryCurve(Rep rep) : rep_(std::move(rep)) {}

  CurveKind kind() const;
  const Rep& rep() const { return rep_; }

  /// p^(order)(th), order 0..3 (mapped curves: 0..2).
  Vec2 derivative(double th, int order) const;
  Vec2 point(double th) const { return derivative(th, 0); }

  BoundaryGeometry frame(double th) const;
  Vec2 normal(double th) const;
  /// th-derivative of the unit normal, order 1 or 2.
  Vec2 normal_derivative(double th, int order) const;

  Symmetry symmetry() const;

  /// Coordinates (s, th) with x = s p(th); only for star-shaped base kinds.
  std::optional<std::pair<double, double>> star_coordinates(const Vec2& x) const;

  /// Uniform scaling about the origin (base kinds only).
  BoundaryCurve scaled(double factor) const;

  /// max |H| over a fine parameter grid
  double max_abs_curvature(int samples = 2048) const;

 private:
  Rep rep_;
};

BoundaryCurve make_disc(double radius);
BoundaryCurve make_ellipse(double a, double b);
/// r(th) = 1 + sum a_k cos k th + b_k sin k th, optionally scaled.
BoundaryCurve make_fourier_domain(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs,
                                  double scale = 1.0);

BoundaryGeometry boundary_geometry(const BoundaryCurve& curve, double th);

/// Settings of the composite Gauss rule used for boundary integrals.
struct BoundaryQuadrature {
  int order = 8;
  int panels = 256;
};

/// Per-node samples of a boundary rule: parameter, arclength weight and frame.
struct BoundarySample {
  double theta;
  double weight;  ///< includes |p'(th)|
  BoundaryGeometry geo;
};

std::vector<BoundarySample> boundary_samples(const BoundaryCurve& curve, BoundaryQuadrature q = {});

/// Enclosed area, (1/2) oint x . nu dS.
double volume(const BoundaryCurve& curve, BoundaryQuadrature q = {});
double perimeter(const BoundaryCurve& curve, BoundaryQuadrature q = {});
/// oint x . nu dS
double flux_of_position(const BoundaryCurve& curve, BoundaryQuadrature q = {});

/// Pair (v, w) of fields defining Omega_t = {x + t v + t^2/2 w}. The boundary
/// traces are v = e + g nu and w = h nu on the base curve; the interior
/// extension is v(s p(th)) = chi(s) s v(th) with a smooth cutoff chi vanishing
/// for s <= 1/4 and equal to one for s >= 1/2. The translation part e extends
/// as a constant.
class PerturbationField {
 public:
  PerturbationField(BoundaryCurve curve, Vec2 translation, TrigSeries normal_part, double w_normal = 0.0);

  const BoundaryCurve& curve() const { return curve_; }
  const Vec2& translation() const { return translation_; }
  const TrigSeries& normal_part() const { return normal_; }
  double w_normal() const { return w_normal_; }

  /// th-derivatives (order 0..2) of the boundary traces v(p(th)), w(p(th)).
  Vec2 v_trace(double th, int order = 0) const;
  Vec2 w_trace(double th, int order = 0) const;

  /// v . nu on the boundary
  double normal_component(double th) const;

  /// Interior evaluation of v and w.
  Vec2 v(const Vec2& x) const;
  Vec2 w(const Vec2& x) const;

  /// Jacobian Dv (rows: components, cols: d/dx, d/dy) on the boundary.
  Mat2 dv_on_boundary(double th) const;

 private:
  BoundaryCurve curve_;
  Vec2 translation_;
  TrigSeries normal_;
  double w_normal_;
};

PerturbationField make_normal_field(const BoundaryCurve& curve, TrigSeries g);
PerturbationField make_translation_field(const BoundaryCurve& curve, int axis);

/// oint v . nu dS
double volume_first_order(const PerturbationField& field, BoundaryQuadrature q = {});
/// oint (v.nu) div v - v.Dv.nu + w.nu dS
double volume_second_order(const PerturbationField& field, BoundaryQuadrature q = {});

/// Removes the mean normal component of v and sets w = h nu with the constant h
/// chosen so that both volume constraints hold.
PerturbationField project_volume_preserving(const PerturbationField& field, BoundaryQuadrature q = {});

/// Boundary of Omega_t. Throws GeometryError (mentioning t) when the mapped
/// curve self-intersects.
BoundaryCurve map_domain(const BoundaryCurve& curve, const PerturbationField& field, double t);

/// (nu' from -grad^tau(v.nu), nu' from centered differences at t = +-h).
std::pair<Vec2, Vec2> normal_derivative_check(const BoundaryCurve& curve, const PerturbationField& field,
                                              double th, double h);

/// Tangential gradient of a boundary scalar f given by its th-derivative.
Vec2 tangential_gradient(const BoundaryCurve& curve, double th, double df_dth);

/// Text description: "kind <disc|ellipse|fourier>" plus one parameter per line.
std::string curve_to_text(const BoundaryCurve& curve);
BoundaryCurve curve_from_text(const std::string& text);

}  // namespace buckle
