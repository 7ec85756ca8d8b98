#include "buckle/geometry.hpp"

#include "buckle/quadrature.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace buckle {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// d^m/dth^m of (cos th, sin th)
Vec2 unit_circle(double th, int m) {
  const double phase = th + 0.5 * std::numbers::pi * m;
  return {std::cos(phase), std::sin(phase)};
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Vec2 rotate_cw(const Vec2& v) { return {v.y(), -v.x()}; }

double wrap_angle(double th) {
  double r = std::fmod(th, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r;
}

double cutoff(double s) {
  if (s <= 0.25) return 0.0;
  if (s >= 0.5) return 1.0;
  const double u = (s - 0.25) / 0.25;
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double fourier_radius(const BoundaryCurve::Fourier& f, double th, int order) {
  double r = order == 0 ? 1.0 : 0.0;
  for (size_t k = 1; k <= f.cos_coeffs.size(); ++k) {
    const double kk = static_cast<double>(k);
    r += f.cos_coeffs[k - 1] * std::pow(kk, order) * std::cos(kk * th + 0.5 * std::numbers::pi * order);
  }
  for (size_t k = 1; k <= f.sin_coeffs.size(); ++k) {
    const double kk = static_cast<double>(k);
    r += f.sin_coeffs[k - 1] * std::pow(kk, order) * std::sin(kk * th + 0.5 * std::numbers::pi * order);
  }
  return r;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

// ---------------------------------------------------------------------------
// TrigSeries

TrigSeries TrigSeries::mode(int k, double amplitude) {
  TrigSeries s;
  if (k == 0) {
    s.constant = amplitude;
  } else if (k > 0) {
    s.cos_coeffs.assign(k, 0.0);
    s.cos_coeffs[k - 1] = amplitude;
  } else {
    s.sin_coeffs.assign(-k, 0.0);
    s.sin_coeffs[-k - 1] = amplitude;
  }
  return s;
}

double TrigSeries::eval(double th, int order) const {
  double r = order == 0 ? constant : 0.0;
  const double shift = 0.5 * std::numbers::pi * order;
  for (size_t k = 1; k <= cos_coeffs.size(); ++k) {
    const double kk = static_cast<double>(k);
    r += cos_coeffs[k - 1] * std::pow(kk, order) * std::cos(kk * th + shift);
  }
  for (size_t k = 1; k <= sin_coeffs.size(); ++k) {
    const double kk = static_cast<double>(k);
    r += sin_coeffs[k - 1] * std::pow(kk, order) * std::sin(kk * th + shift);
  }
  return r;
}

// ---------------------------------------------------------------------------
// BoundaryCurve

BoundaryCurve make_disc(double radius) {
  if (!(radius > 0.0)) throw GeometryError("make_disc: radius must be positive");
  return BoundaryCurve(BoundaryCurve::Disc{radius});
}

BoundaryCurve make_ellipse(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw GeometryError("make_ellipse: semi-axes must be positive");
  return BoundaryCurve(BoundaryCurve::Ellipse{a, b});
}

BoundaryCurve make_fourier_domain(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs, double scale) {
  if (!(scale > 0.0)) throw GeometryError("make_fourier_domain: scale must be positive");
  BoundaryCurve::Fourier f{scale, std::move(cos_coeffs), std::move(sin_coeffs)};
  constexpr int kGrid = 4096;
  double rmin = 1e300;
  for (int i = 0; i < kGrid; ++i) rmin = std::min(rmin, fourier_radius(f, kTwoPi * i / kGrid, 0));
  if (!(rmin > 1e-3)) {
    std::ostringstream os;
    os << "make_fourier_domain: radius function not positive (min " << rmin << ")";
    throw GeometryError(os.str());
  }
  return BoundaryCurve(std::move(f));
}

CurveKind BoundaryCurve::kind() const {
  return std::visit(overloaded{[](const Disc&) { return CurveKind::disc; },
                               [](const Ellipse&) { return CurveKind::ellipse; },
                               [](const Fourier&) { return CurveKind::fourier; },
                               [](const Mapped&) { return CurveKind::mapped; }},
                    rep_);
}

Vec2 BoundaryCurve::derivative(double th, int order) const {
  return std::visit(
      overloaded{
          [&](const Disc& d) -> Vec2 { return d.radius * unit_circle(th, order); },
          [&](const Ellipse& e) -> Vec2 {
            const Vec2 c = unit_circle(th, order);
            return {e.a * c.x(), e.b * c.y()};
          },
          [&](const Fourier& f) -> Vec2 {
            Vec2 acc = Vec2::Zero();
            for (int j = 0; j <= order; ++j)
              acc += binomial(order, j) * fourier_radius(f, th, j) * unit_circle(th, order - j);
            return f.scale * acc;
          },
          [&](const Mapped& m) -> Vec2 {
            if (order > 2) throw GeometryError("mapped curves provide derivatives up to order 2");
            return m.base->derivative(th, order) + m.t * m.field->v_trace(th, order) +
                   0.5 * m.t * m.t * m.field->w_trace(th, order);
          }},
      rep_);
}

BoundaryGeometry BoundaryCurve::frame(double th) const {
  const Vec2 p = derivative(th, 0);
  const Vec2 q = derivative(th, 1);
  const Vec2 qq = derivative(th, 2);
  BoundaryGeometry g;
  g.point = p;
  g.speed = q.norm();
  g.tangent = q / g.speed;
  g.normal = rotate_cw(g.tangent);
  g.curvature = cross(q, qq) / (g.speed * g.speed * g.speed);
  return g;
}

Vec2 BoundaryCurve::normal(double th) const { return rotate_cw(derivative(th, 1).normalized()); }

Vec2 BoundaryCurve::normal_derivative(double th, int order) const {
  const Vec2 q = derivative(th, 1);
  const Vec2 q1 = derivative(th, 2);
  const double n = q.norm();
  const double qq1 = q.dot(q1);
  if (order == 1) {
    return rotate_cw(q1 / n - q * qq1 / (n * n * n));
  }
  if (order == 2) {
    const Vec2 q2 = derivative(th, 3);
    const double n3 = n * n * n;
    const Vec2 tau2 = q2 / n - 2.0 * q1 * qq1 / n3 - q * (q1.dot(q1) + q.dot(q2)) / n3 +
                      3.0 * q * qq1 * qq1 / (n3 * n * n);
    return rotate_cw(tau2);
  }
  if (order == 0) return normal(th);
  throw GeometryError("normal_derivative: order must be 0, 1 or 2");
}

Symmetry BoundaryCurve::symmetry() const {
  return std::visit(overloaded{[](const Disc&) { return Symmetry::octant; },
                               [](const Ellipse& e) { return e.a == e.b ? Symmetry::octant : Symmetry::quadrant; },
                               [](const Fourier& f) {
                                 for (double s : f.sin_coeffs)
                                   if (s != 0.0) return Symmetry::none;
                                 for (size_t k = 1; k <= f.cos_coeffs.size(); k += 2)
                                   if (f.cos_coeffs[k - 1] != 0.0) return Symmetry::none;
                                 return Symmetry::quadrant;
                               },
                               [](const Mapped&) { return Symmetry::none; }},
                    rep_);
}

std::optional<std::pair<double, double>> BoundaryCurve::star_coordinates(const Vec2& x) const {
  using Result = std::optional<std::pair<double, double>>;
  return std::visit(overloaded{[&](const Disc& d) -> Result {
                                 return std::pair{x.norm() / d.radius, wrap_angle(std::atan2(x.y(), x.x()))};
                               },
                               [&](const Ellipse& e) -> Result {
                                 const Vec2 y(x.x() / e.a, x.y() / e.b);
                                 return std::pair{y.norm(), wrap_angle(std::atan2(y.y(), y.x()))};
                               },
                               [&](const Fourier& f) -> Result {
                                 const double th = wrap_angle(std::atan2(x.y(), x.x()));
                                 return std::pair{x.norm() / (f.scale * fourier_radius(f, th, 0)), th};
                               },
                               [](const Mapped&) -> Result { return std::nullopt; }},
                    rep_);
}

BoundaryCurve BoundaryCurve::scaled(double factor) const {
  if (!(factor > 0.0)) throw GeometryError("scaled: factor must be positive");
  return std::visit(overloaded{[&](const Disc& d) { return make_disc(d.radius * factor); },
                               [&](const Ellipse& e) { return make_ellipse(e.a * factor, e.b * factor); },
                               [&](const Fourier& f) {
                                 return make_fourier_domain(f.cos_coeffs, f.sin_coeffs, f.scale * factor);
                               },
                               [](const Mapped&) -> BoundaryCurve {
                                 throw GeometryError("scaled: mapped curves cannot be rescaled");
                               }},
                    rep_);
}

double BoundaryCurve::max_abs_curvature(int samples) const {
  double m = 0.0;
  for (int i = 0; i < samples; ++i) m = std::max(m, std::abs(frame(kTwoPi * i / samples).curvature));
  return m;
}

BoundaryGeometry boundary_geometry(const BoundaryCurve& curve, double th) { return curve.frame(th); }

std::vector<BoundarySample> boundary_samples(const BoundaryCurve& curve, BoundaryQuadrature q) {
  const GaussRule rule = composite_gauss(0.0, kTwoPi, q.order, q.panels);
  std::vector<BoundarySample> out;
  out.reserve(rule.nodes.size());
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    BoundarySample s;
    s.theta = rule.nodes[i];
    s.geo = curve.frame(s.theta);
    s.weight = rule.weights[i] * s.geo.speed;
    out.push_back(s);
  }
  return out;
}

double flux_of_position(const BoundaryCurve& curve, BoundaryQuadrature q) {
  double acc = 0.0;
  for (const auto& s : boundary_samples(curve, q)) acc += s.weight * s.geo.point.dot(s.geo.normal);
  return acc;
}

double volume(const BoundaryCurve& curve, BoundaryQuadrature q) { return 0.5 * flux_of_position(curve, q); }

double perimeter(const BoundaryCurve& curve, BoundaryQuadrature q) {
  double acc = 0.0;
  for (const auto& s : boundary_samples(curve, q)) acc += s.weight;
  return acc;
}

// ---------------------------------------------------------------------------
// PerturbationField

PerturbationField::PerturbationField(BoundaryCurve curve, Vec2 translation, TrigSeries normal_part, double w_normal)
    : curve_(std::move(curve)), translation_(std::move(translation)), normal_(std::move(normal_part)),
      w_normal_(w_normal) {}

Vec2 PerturbationField::v_trace(double th, int order) const {
  Vec2 acc = order == 0 ? translation_ : Vec2::Zero();
  for (int j = 0; j <= order; ++j)
    acc += binomial(order, j) * normal_.eval(th, j) * curve_.normal_derivative(th, order - j);
  return acc;
}

Vec2 PerturbationField::w_trace(double th, int order) const {
  if (w_normal_ == 0.0) return Vec2::Zero();
  return w_normal_ * curve_.normal_derivative(th, order);
}

double PerturbationField::normal_component(double th) const { return v_trace(th).dot(curve_.normal(th)); }

Vec2 PerturbationField::v(const Vec2& x) const {
  const auto sc = curve_.star_coordinates(x);
  if (!sc) throw GeometryError("PerturbationField: interior extension needs a star-shaped base curve");
  const auto [s, th] = *sc;
  return translation_ + cutoff(s) * s * normal_.value(th) * curve_.normal(th);
}

Vec2 PerturbationField::w(const Vec2& x) const {
  if (w_normal_ == 0.0) return Vec2::Zero();
  const auto sc = curve_.star_coordinates(x);
  if (!sc) throw GeometryError("PerturbationField: interior extension needs a star-shaped base curve");
  const auto [s, th] = *sc;
  return cutoff(s) * s * w_normal_ * curve_.normal(th);
}

Mat2 PerturbationField::dv_on_boundary(double th) const {
  // v(s p(th)) = s V(th) near s = 1, so Dv [p, p'] = [V, V'] there.
  const Vec2 nu = curve_.normal(th);
  const Vec2 dnu = curve_.normal_derivative(th, 1);
  const Vec2 V = normal_.value(th) * nu;
  const Vec2 dV = normal_.d1(th) * nu + normal_.value(th) * dnu;
  Mat2 J, Vm;
  J.col(0) = curve_.point(th);
  J.col(1) = curve_.derivative(th, 1);
  Vm.col(0) = V;
  Vm.col(1) = dV;
  return Vm * J.inverse();
}

PerturbationField make_normal_field(const BoundaryCurve& curve, TrigSeries g) {
  return PerturbationField(curve, Vec2::Zero(), std::move(g));
}

PerturbationField make_translation_field(const BoundaryCurve& curve, int axis) {
  if (axis != 1 && axis != 2) throw GeometryError("make_translation_field: axis must be 1 or 2");
  return PerturbationField(curve, axis == 1 ? Vec2(1.0, 0.0) : Vec2(0.0, 1.0), TrigSeries{});
}

double volume_first_order(const PerturbationField& field, BoundaryQuadrature q) {
  double acc = 0.0;
  for (const auto& s : boundary_samples(field.curve(), q)) acc += s.weight * field.normal_component(s.theta);
  return acc;
}

namespace {

// oint (v.nu) div v - nu . Dv v dS
double volume_second_order_without_w(const PerturbationField& field, BoundaryQuadrature q) {
  double acc = 0.0;
  for (const auto& s : boundary_samples(field.curve(), q)) {
    const Mat2 dv = field.dv_on_boundary(s.theta);
    const Vec2 v = field.v_trace(s.theta);
    acc += s.weight * (v.dot(s.geo.normal) * dv.trace() - s.geo.normal.dot(dv * v));
  }
  return acc;
}

}  // namespace

double volume_second_order(const PerturbationField& field, BoundaryQuadrature q) {
  double wflux = 0.0;
  if (field.w_normal() != 0.0)
    for (const auto& s : boundary_samples(field.curve(), q)) wflux += s.weight * field.w_normal();
  return volume_second_order_without_w(field, q) + wflux;
}

PerturbationField project_volume_preserving(const PerturbationField& field, BoundaryQuadrature q) {
  const double len = perimeter(field.curve(), q);
  TrigSeries g = field.normal_part();
  g.constant -= volume_first_order(field, q) / len;
  PerturbationField mean_free(field.curve(), field.translation(), std::move(g));
  const double h = -volume_second_order_without_w(mean_free, q) / len;
  return PerturbationField(field.curve(), field.translation(), mean_free.normal_part(), h);
}

namespace {

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

bool self_intersects(const BoundaryCurve& curve, int n) {
  std::vector<Vec2> pts(n);
  for (int i = 0; i < n; ++i) {
    const double th = kTwoPi * i / n;
    if (!(curve.derivative(th, 1).norm() > 0.0)) return true;
    pts[i] = curve.point(th);
  }
  // Sort segments by min x and sweep.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  auto lo = [&](int i) { return std::min(pts[i].x(), pts[(i + 1) % n].x()); };
  auto hi = [&](int i) { return std::max(pts[i].x(), pts[(i + 1) % n].x()); };
  std::sort(order.begin(), order.end(), [&](int a, int b) { return lo(a) < lo(b); });
  for (int ia = 0; ia < n; ++ia) {
    const int a = order[ia];
    for (int ib = ia + 1; ib < n && lo(order[ib]) <= hi(a); ++ib) {
      const int b = order[ib];
      if (std::abs(a - b) <= 1 || std::abs(a - b) == n - 1) continue;
      if (segments_intersect(pts[a], pts[(a + 1) % n], pts[b], pts[(b + 1) % n])) return true;
    }
  }
  return false;
}

}  // namespace

BoundaryCurve map_domain(const BoundaryCurve& curve, const PerturbationField& field, double t) {
  BoundaryCurve mapped(BoundaryCurve::Mapped{std::make_shared<const BoundaryCurve>(curve),
                                             std::make_shared<const PerturbationField>(field), t});
  if (t != 0.0 && self_intersects(mapped, 2048)) {
    std::ostringstream os;
    os << "map_domain: mapped curve self-intersects at t = " << t;
    throw GeometryError(os.str());
  }
  return mapped;
}

Vec2 tangential_gradient(const BoundaryCurve& curve, double th, double df_dth) {
  const BoundaryGeometry g = curve.frame(th);
  return (df_dth / g.speed) * g.tangent;
}

std::pair<Vec2, Vec2> normal_derivative_check(const BoundaryCurve& curve, const PerturbationField& field, double th,
                                              double h) {
  const Vec2 nu = curve.normal(th);
  const Vec2 dnu = curve.normal_derivative(th, 1);
  const Vec2 v = field.v_trace(th);
  const double df = field.v_trace(th, 1).dot(nu) + v.dot(dnu);
  const Vec2 formula = -tangential_gradient(curve, th, df);

  const BoundaryGeometry g = curve.frame(th);
  const Vec2 material = (map_domain(curve, field, h).normal(th) - map_domain(curve, field, -h).normal(th)) / (2 * h);
  const Vec2 convective = dnu * (v.dot(g.tangent) / g.speed);
  return {formula, material - convective};
}

// ---------------------------------------------------------------------------
// Text format

std::string curve_to_text(const BoundaryCurve& curve) {
  std::ostringstream os;
  std::visit(overloaded{[&](const BoundaryCurve::Disc& d) { os << "kind disc\nradius " << format_double(d.radius) << "\n"; },
                        [&](const BoundaryCurve::Ellipse& e) {
                          os << "kind ellipse\na " << format_double(e.a) << "\nb " << format_double(e.b) << "\n";
                        },
                        [&](const BoundaryCurve::Fourier& f) {
                          os << "kind fourier\nscale " << format_double(f.scale) << "\ncos";
                          for (double c : f.cos_coeffs) os << ' ' << format_double(c);
                          os << "\nsin";
                          for (double s : f.sin_coeffs) os << ' ' << format_double(s);
                          os << "\n";
                        },
                        [](const BoundaryCurve::Mapped&) {
                          throw GeometryError("curve_to_text: mapped curves have no text form");
                        }},
             curve.rep());
  return os.str();
}

namespace {

double parse_double(const std::string& tok) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw std::invalid_argument("curve description: not a number: '" + tok + "'");
  return v;
}

}  // namespace

BoundaryCurve curve_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line, kind;
  double radius = 1.0, a = 1.0, b = 1.0, scale = 1.0;
  std::vector<double> cs, ss;
  bool have_radius = false, have_a = false, have_b = false;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::vector<std::string> vals;
    for (std::string tok; ls >> tok;) vals.push_back(tok);
    auto single = [&]() {
      if (vals.size() != 1) throw std::invalid_argument("curve description: key '" + key + "' expects one value");
      return parse_double(vals[0]);
    };
    if (key == "kind") {
      if (vals.size() != 1) throw std::invalid_argument("curve description: kind expects one value");
      kind = vals[0];
    } else if (key == "radius") {
      radius = single();
      have_radius = true;
    } else if (key == "a") {
      a = single();
      have_a = true;
    } else if (key == "b") {
      b = single();
      have_b = true;
    } else if (key == "scale") {
      scale = single();
    } else if (key == "cos") {
      for (const auto& v : vals) cs.push_back(parse_double(v));
    } else if (key == "sin") {
      for (const auto& v : vals) ss.push_back(parse_double(v));
    } else {
      throw std::invalid_argument("curve description: unknown key '" + key + "'");
    }
  }
  if (kind == "disc") {
    if (!have_radius) throw std::invalid_argument("curve description: disc needs 'radius'");
    return make_disc(radius);
  }
  if (kind == "ellipse") {
    if (!have_a || !have_b) throw std::invalid_argument("curve description: ellipse needs 'a' and 'b'");
    return make_ellipse(a, b);
  }
  if (kind == "fourier") return make_fourier_domain(cs, ss, scale);
  throw std::invalid_argument("curve description: unknown kind '" + kind + "'");
}

}  // namespace buckle
