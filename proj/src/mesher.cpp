#include "buckle/mesher.hpp"

#include "buckle/quadrature.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_map>

namespace buckle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// Arclength table on a parameter interval.

class ArcTable {
 public:
  ArcTable(const BoundaryCurve& curve, double t0, double t1, int cells = 2048)
      : curve_(curve), t0_(t0), dt_((t1 - t0) / cells), cum_(cells + 1, 0.0) {
    const GaussRule g = gauss_legendre(6);
    for (int c = 0; c < cells; ++c) {
      double acc = 0.0;
      for (size_t q = 0; q < g.nodes.size(); ++q) {
        const double th = t0_ + dt_ * (c + 0.5 * (g.nodes[q] + 1.0));
        acc += 0.5 * dt_ * g.weights[q] * curve_.derivative(th, 1).norm();
      }
      cum_[c + 1] = cum_[c] + acc;
    }
  }

  double length() const { return cum_.back(); }

  double param_at(double s) const {
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    int c = static_cast<int>(std::distance(cum_.begin(), it)) - 1;
    c = std::clamp(c, 0, static_cast<int>(cum_.size()) - 2);
    double th = t0_ + dt_ * (c + (s - cum_[c]) / (cum_[c + 1] - cum_[c]));
    // Newton on the local arclength, anchored at the cell start.
    const GaussRule g = gauss_legendre(6);
    for (int it2 = 0; it2 < 3; ++it2) {
      const double a = t0_ + dt_ * c;
      double len = 0.0;
      for (size_t q = 0; q < g.nodes.size(); ++q) {
        const double x = a + (th - a) * 0.5 * (g.nodes[q] + 1.0);
        len += 0.5 * (th - a) * g.weights[q] * curve_.derivative(x, 1).norm();
      }
      th -= (cum_[c] + len - s) / curve_.derivative(th, 1).norm();
    }
    return th;
  }

 private:
  const BoundaryCurve& curve_;
  double t0_, dt_;
  std::vector<double> cum_;
};

// ---------------------------------------------------------------------------
// Incremental Delaunay triangulation by Lawson flips.

class Delaunay {
 public:
  explicit Delaunay(const std::vector<Vec2>& pts) : n_(static_cast<int>(pts.size())) {
    Vec2 lo = pts.front(), hi = pts.front();
    for (const auto& p : pts) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Vec2 c = 0.5 * (lo + hi);
    const double r = std::max(1e-12, 0.5 * (hi - lo).norm());
    p_ = pts;
    p_.push_back(c + Vec2(-200 * r, -100 * r));
    p_.push_back(c + Vec2(200 * r, -100 * r));
    p_.push_back(c + Vec2(0.0, 200 * r));
    t_.push_back({{n_, n_ + 1, n_ + 2}, {-1, -1, -1}});
    for (int i = 0; i < n_; ++i) insert(i);
  }

  std::vector<std::array<int, 3>> triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& t : t_)
      if (t.v[0] < n_ && t.v[1] < n_ && t.v[2] < n_) out.push_back(t.v);
    return out;
  }

 private:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nb;  // neighbor across the edge opposite v[i]
  };

  long double orient(int a, int b, int c) const {
    const long double ax = p_[a].x(), ay = p_[a].y();
    return (static_cast<long double>(p_[b].x()) - ax) * (static_cast<long double>(p_[c].y()) - ay) -
           (static_cast<long double>(p_[b].y()) - ay) * (static_cast<long double>(p_[c].x()) - ax);
  }

  long double incircle(int a, int b, int c, int d) const {
    const long double dx = p_[d].x(), dy = p_[d].y();
    const long double adx = p_[a].x() - dx, ady = p_[a].y() - dy;
    const long double bdx = p_[b].x() - dx, bdy = p_[b].y() - dy;
    const long double cdx = p_[c].x() - dx, cdy = p_[c].y() - dy;
    const long double ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
  }

  void replace_neighbor(int tri, int old_nb, int new_nb) {
    if (tri < 0) return;
    for (int k = 0; k < 3; ++k)
      if (t_[tri].nb[k] == old_nb) {
        t_[tri].nb[k] = new_nb;
        return;
      }
  }

  // Returns the containing triangle; edge >= 0 when p lies on that edge.
  int locate(int p, int& edge) const {
    int cur = last_;
    for (size_t steps = 0; steps < 4 * t_.size() + 16; ++steps) {
      const Tri& t = t_[cur];
      int next = -1;
      int zero = -1;
      for (int k = 0; k < 3; ++k) {
        const long double o = orient(t.v[(k + 1) % 3], t.v[(k + 2) % 3], p);
        if (o < 0) {
          next = t.nb[k];
          break;
        }
        if (o == 0) zero = k;
      }
      if (next < 0) {
        edge = zero;
        return cur;
      }
      cur = next;
    }
    // Walking failed (degenerate input); fall back to a scan.
    for (size_t i = 0; i < t_.size(); ++i) {
      const Tri& t = t_[i];
      int zero = -1;
      bool inside = true;
      for (int k = 0; k < 3; ++k) {
        const long double o = orient(t.v[(k + 1) % 3], t.v[(k + 2) % 3], p);
        if (o < 0) inside = false;
        if (o == 0) zero = k;
      }
      if (inside) {
        edge = zero;
        return static_cast<int>(i);
      }
    }
    throw MeshError("Delaunay: point location failed");
  }

  void insert(int p) {
    int edge = -1;
    const int t = locate(p, edge);
    for (int k = 0; k < 3; ++k)
      if ((p_[t_[t].v[k]] - p_[p]).norm() == 0.0) throw MeshError("Delaunay: duplicate point");
    if (edge < 0)
      split_triangle(t, p);
    else
      split_edge(t, edge, p);
  }

  void split_triangle(int t, int p) {
    const auto [a, b, c] = t_[t].v;
    const auto [na, nb, nc] = t_[t].nb;
    const int t0 = t, t1 = static_cast<int>(t_.size()), t2 = t1 + 1;
    t_[t0] = {{p, b, c}, {na, t1, t2}};
    t_.push_back({{p, c, a}, {nb, t2, t0}});
    t_.push_back({{p, a, b}, {nc, t0, t1}});
    replace_neighbor(nb, t, t1);
    replace_neighbor(nc, t, t2);
    last_ = t0;
    legalize(t0, 0);
    legalize(t1, 0);
    legalize(t2, 0);
  }

  void split_edge(int t, int i, int p) {
    const int a = t_[t].v[i], b = t_[t].v[(i + 1) % 3], c = t_[t].v[(i + 2) % 3];
    const int u = t_[t].nb[i];
    const int nb_b = t_[t].nb[(i + 1) % 3];  // across c-a
    const int nb_c = t_[t].nb[(i + 2) % 3];  // across a-b
    if (u < 0) throw MeshError("Delaunay: point on hull edge");
    int j = 0;
    while (t_[u].nb[j] != t) ++j;
    const int d = t_[u].v[j];
    const int u_b = t_[u].nb[(j + 2) % 3];  // u = (d, c, b): opposite b is edge d-c
    const int u_c = t_[u].nb[(j + 1) % 3];  // opposite c is edge b-d
    const int t0 = t, t1 = u, u0 = static_cast<int>(t_.size()), u1 = u0 + 1;
    t_[t0] = {{a, b, p}, {u1, t1, nb_c}};
    t_[t1] = {{a, p, c}, {u0, nb_b, t0}};
    t_.push_back({{d, c, p}, {t1, u1, u_b}});
    t_.push_back({{d, p, b}, {t0, u_c, u0}});
    replace_neighbor(nb_b, t, t1);
    replace_neighbor(u_b, u, u0);
    replace_neighbor(u_c, u, u1);
    last_ = t0;
    legalize(t0, 2);
    legalize(t1, 1);
    legalize(u0, 2);
    legalize(u1, 1);
  }

  void legalize(int t, int i) {
    std::vector<std::pair<int, int>> stack{{t, i}};
    while (!stack.empty()) {
      auto [tt, ii] = stack.back();
      stack.pop_back();
      const int n = t_[tt].nb[ii];
      if (n < 0) continue;
      const int p = t_[tt].v[ii], x = t_[tt].v[(ii + 1) % 3], y = t_[tt].v[(ii + 2) % 3];
      int j = 0;
      while (t_[n].nb[j] != tt) ++j;
      const int d = t_[n].v[j];
      if (incircle(p, x, y, d) <= 0) continue;
      if (orient(p, x, d) <= 0 || orient(p, d, y) <= 0) continue;
      const int A = t_[tt].nb[(ii + 1) % 3];
      const int B = t_[tt].nb[(ii + 2) % 3];
      const int C = t_[n].nb[(j + 1) % 3];
      const int D = t_[n].nb[(j + 2) % 3];
      t_[tt] = {{p, x, d}, {C, n, B}};
      t_[n] = {{p, d, y}, {D, A, tt}};
      replace_neighbor(A, tt, n);
      replace_neighbor(C, n, tt);
      stack.push_back({tt, 0});
      stack.push_back({n, 0});
    }
  }

  int n_;
  std::vector<Vec2> p_;
  std::vector<Tri> t_;
  int last_ = 0;
};

// ---------------------------------------------------------------------------
// Region (full domain or symmetry wedge) meshing.

enum class NodeKind { free, curve, fixed };

struct RegionNode {
  Vec2 x;
  NodeKind kind;
  double theta;  // curve nodes only
};

struct RegionMesh {
  std::vector<RegionNode> nodes;
  std::vector<std::array<int, 3>> triangles;
};

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double xc = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < xc) inside = !inside;
    }
  }
  return inside;
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double polygon_distance(const Vec2& p, const std::vector<Vec2>& poly) {
  double d = 1e300;
  for (size_t i = 0; i < poly.size(); ++i) d = std::min(d, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  return d;
}

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (hi << 32) | lo;
}

struct Wedge {
  double theta0, theta1;
  bool full;
  // Snaps points on the second ray onto the exact symmetry line.
  std::function<Vec2(Vec2)> snap_ray2;
};

Wedge make_wedge(Symmetry sym) {
  switch (sym) {
    case Symmetry::none:
      return {0.0, kTwoPi, true, [](Vec2 x) { return x; }};
    case Symmetry::quadrant:
      return {0.0, 0.5 * kPi, false, [](Vec2 x) { return Vec2(0.0, x.y()); }};
    case Symmetry::octant:
      return {0.0, 0.25 * kPi, false, [](Vec2 x) {
                const double m = 0.5 * (x.x() + x.y());
                return Vec2(m, m);
              }};
  }
  return {0.0, kTwoPi, true, [](Vec2 x) { return x; }};
}

Vec2 region_anchor(const BoundaryCurve& curve, bool full) {
  if (!full) return Vec2::Zero();
  // area centroid via boundary integrals: (1/2A) oint |x|^2 nu dS
  Vec2 m = Vec2::Zero();
  double a = 0.0;
  for (const auto& s : boundary_samples(curve, {8, 64})) {
    a += 0.5 * s.weight * s.geo.point.dot(s.geo.normal);
    m += 0.5 * s.weight * s.geo.point.squaredNorm() * s.geo.normal;
  }
  return m / a;
}

RegionMesh mesh_region(const BoundaryCurve& curve, double h, Symmetry sym, int smoothing_rounds) {
  const Wedge wedge = make_wedge(sym);
  const ArcTable arc(curve, wedge.theta0, wedge.theta1);

  // Boundary loop of the region, counterclockwise.
  std::vector<RegionNode> loop;
  if (wedge.full) {
    const int n = std::max(8, static_cast<int>(std::ceil(arc.length() / h - 1e-9)));
    for (int k = 0; k < n; ++k) {
      const double th = k == 0 ? 0.0 : arc.param_at(arc.length() * k / n);
      loop.push_back({curve.point(th), NodeKind::curve, th});
    }
  } else {
    const Vec2 p0 = curve.point(wedge.theta0);
    const Vec2 p1 = wedge.snap_ray2(curve.point(wedge.theta1));
    const int m0 = std::max(1, static_cast<int>(std::ceil(p0.norm() / h - 1e-9)));
    for (int k = 0; k < m0; ++k) loop.push_back({Vec2(p0.x() * k / m0, 0.0), NodeKind::fixed, 0.0});
    const int n = std::max(2, static_cast<int>(std::ceil(arc.length() / h - 1e-9)));
    for (int k = 0; k <= n; ++k) {
      const double th = k == 0 ? wedge.theta0 : (k == n ? wedge.theta1 : arc.param_at(arc.length() * k / n));
      Vec2 x = k == 0 ? p0 : (k == n ? p1 : curve.point(th));
      loop.push_back({x, NodeKind::curve, th});
    }
    const int m1 = std::max(1, static_cast<int>(std::ceil(p1.norm() / h - 1e-9)));
    for (int k = m1 - 1; k >= 1; --k) loop.push_back({wedge.snap_ray2(p1 * (static_cast<double>(k) / m1)), NodeKind::fixed, 0.0});
  }

  auto polygon_of = [](const std::vector<RegionNode>& l) {
    std::vector<Vec2> poly;
    for (const auto& n : l) poly.push_back(n.x);
    return poly;
  };

  // Interior hexagonal lattice.
  std::vector<Vec2> poly = polygon_of(loop);
  Vec2 lo = poly.front(), hi = poly.front();
  for (const auto& p : poly) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec2 anchor = region_anchor(curve, wedge.full);
  const double dy = h * std::sqrt(3.0) / 2.0;
  std::vector<Vec2> interior;
  const int j0 = static_cast<int>(std::floor((lo.y() - anchor.y()) / dy)) - 1;
  const int j1 = static_cast<int>(std::ceil((hi.y() - anchor.y()) / dy)) + 1;
  const int i0 = static_cast<int>(std::floor((lo.x() - anchor.x()) / h)) - 1;
  const int i1 = static_cast<int>(std::ceil((hi.x() - anchor.x()) / h)) + 1;
  for (int j = j0; j <= j1; ++j) {
    const double off = (j % 2 != 0) ? 0.5 * h : 0.0;
    for (int i = i0; i <= i1; ++i) {
      const Vec2 x = anchor + Vec2(i * h + off, j * dy);
      if (point_in_polygon(x, poly) && polygon_distance(x, poly) >= 0.55 * h) interior.push_back(x);
    }
  }

  auto triangulate_points = [&](std::vector<RegionNode>& bnd, const std::vector<Vec2>& inner) {
    for (int attempt = 0; attempt < 12; ++attempt) {
      std::vector<Vec2> pts = polygon_of(bnd);
      const std::vector<Vec2> bpoly = pts;
      pts.insert(pts.end(), inner.begin(), inner.end());
      Delaunay dt(pts);
      std::vector<std::array<int, 3>> tris;
      std::set<std::uint64_t> edges;
      for (const auto& t : dt.triangles()) {
        const Vec2 c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
        if (!point_in_polygon(c, bpoly)) continue;
        tris.push_back(t);
        for (int k = 0; k < 3; ++k) edges.insert(edge_key(t[k], t[(k + 1) % 3]));
      }
      // Recover missing boundary segments by splitting them.
      std::vector<RegionNode> next;
      bool missing = false;
      const int nb = static_cast<int>(bnd.size());
      for (int k = 0; k < nb; ++k) {
        next.push_back(bnd[k]);
        const int k1 = (k + 1) % nb;
        if (edges.count(edge_key(k, k1))) continue;
        missing = true;
        const RegionNode& a = bnd[k];
        const RegionNode& b = bnd[k1];
        if (a.kind == NodeKind::curve && b.kind == NodeKind::curve) {
          double tb = b.theta;
          if (tb <= a.theta) tb += kTwoPi;
          const double tm = 0.5 * (a.theta + tb);
          next.push_back({curve.point(tm), NodeKind::curve, std::fmod(tm, kTwoPi)});
        } else {
          next.push_back({0.5 * (a.x + b.x), NodeKind::fixed, 0.0});
        }
      }
      if (!missing) return tris;
      bnd = std::move(next);
    }
    throw MeshError("triangulate: could not recover the boundary; decrease h");
  };

  std::vector<std::array<int, 3>> tris = triangulate_points(loop, interior);

  // Laplacian smoothing of lattice nodes with re-triangulation.
  for (int round = 0; round < smoothing_rounds; ++round) {
    const int nb = static_cast<int>(loop.size());
    const int n = nb + static_cast<int>(interior.size());
    std::vector<Vec2> all = polygon_of(loop);
    all.insert(all.end(), interior.begin(), interior.end());
    std::vector<Vec2> sum(n, Vec2::Zero());
    std::vector<int> cnt(n, 0);
    std::set<std::uint64_t> seen;
    for (const auto& t : tris)
      for (int k = 0; k < 3; ++k) {
        const int a = t[k], b = t[(k + 1) % 3];
        if (!seen.insert(edge_key(a, b)).second) continue;
        sum[a] += all[b];
        ++cnt[a];
        sum[b] += all[a];
        ++cnt[b];
      }
    const std::vector<Vec2> bpoly = polygon_of(loop);
    for (int i = nb; i < n; ++i) {
      if (cnt[i] == 0) continue;
      const Vec2 target = sum[i] / cnt[i];
      if (point_in_polygon(target, bpoly)) interior[i - nb] = target;
    }
    tris = triangulate_points(loop, interior);
  }

  RegionMesh rm;
  rm.nodes = loop;
  for (const auto& x : interior) rm.nodes.push_back({x, NodeKind::free, 0.0});
  rm.triangles = tris;
  return rm;
}

// Element of the reflection group acting on points and curve parameters.
struct GroupElement {
  Mat2 m;        // entries in {0, +-1}
  double sign;   // theta' = sign * theta + shift
  double shift;
};

std::vector<GroupElement> symmetry_group(Symmetry sym) {
  const GroupElement id{Mat2::Identity(), 1.0, 0.0};
  std::vector<GroupElement> gens;
  if (sym == Symmetry::quadrant || sym == Symmetry::octant) {
    gens.push_back({(Mat2() << 1, 0, 0, -1).finished(), -1.0, 0.0});
    gens.push_back({(Mat2() << -1, 0, 0, 1).finished(), -1.0, kPi});
  }
  if (sym == Symmetry::octant) gens.push_back({(Mat2() << 0, 1, 1, 0).finished(), -1.0, 0.5 * kPi});
  std::vector<GroupElement> group{id};
  for (size_t i = 0; i < group.size(); ++i)
    for (const auto& g : gens) {
      GroupElement c{g.m * group[i].m, g.sign * group[i].sign, g.sign * group[i].shift + g.shift};
      const bool known = std::any_of(group.begin(), group.end(), [&](const GroupElement& e) { return e.m == c.m; });
      if (!known) group.push_back(c);
    }
  return group;
}

double wrap_theta(double th) {
  double r = std::fmod(th, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r > kTwoPi - 1e-12) r = 0.0;
  return r;
}

struct CoordKey {
  std::uint64_t x, y;
  bool operator==(const CoordKey& o) const { return x == o.x && y == o.y; }
};
struct CoordHash {
  size_t operator()(const CoordKey& k) const { return std::hash<std::uint64_t>()(k.x * 0x9E3779B97F4A7C15ull ^ k.y); }
};
CoordKey coord_key(const Vec2& p) {
  const double x = p.x() + 0.0, y = p.y() + 0.0;  // folds -0 into +0
  CoordKey k{};
  std::memcpy(&k.x, &x, sizeof(double));
  std::memcpy(&k.y, &y, sizeof(double));
  return k;
}

Mesh assemble_full_mesh(const RegionMesh& rm, Symmetry sym, double h) {
  const std::vector<GroupElement> group = symmetry_group(sym);
  Mesh mesh;
  mesh.h = h;
  std::unordered_map<CoordKey, int, CoordHash> index;
  std::vector<std::pair<double, int>> curve_nodes;
  for (const auto& g : group) {
    std::vector<int> local(rm.nodes.size());
    for (size_t i = 0; i < rm.nodes.size(); ++i) {
      const Vec2 x = g.m * rm.nodes[i].x;
      const CoordKey key = coord_key(x);
      auto it = index.find(key);
      if (it == index.end()) {
        const int id = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back(x + Vec2(0.0, 0.0));
        index.emplace(key, id);
        local[i] = id;
        if (rm.nodes[i].kind == NodeKind::curve)
          curve_nodes.push_back({wrap_theta(g.sign * rm.nodes[i].theta + g.shift), id});
      } else {
        local[i] = it->second;
      }
    }
    const bool flips = g.m.determinant() < 0;
    for (const auto& t : rm.triangles) {
      if (flips)
        mesh.triangles.push_back({local[t[0]], local[t[2]], local[t[1]]});
      else
        mesh.triangles.push_back({local[t[0]], local[t[1]], local[t[2]]});
    }
  }
  std::sort(curve_nodes.begin(), curve_nodes.end());
  const size_t nb = curve_nodes.size();
  for (size_t k = 0; k < nb; ++k) {
    const auto& a = curve_nodes[k];
    const auto& b = curve_nodes[(k + 1) % nb];
    mesh.boundary.push_back({a.second, b.second, a.first, k + 1 == nb ? b.first + kTwoPi : b.first});
  }
  return mesh;
}

double triangle_min_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
  auto angle = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const Vec2 u = q - p, v = r - p;
    return std::atan2(std::abs(cross(u, v)), u.dot(v));
  };
  return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

template <class T>
T parse_number(const std::string& tok) {
  T v{};
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw MeshError("mesh file: bad number '" + tok + "'");
  return v;
}

std::string shortest(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

// ---------------------------------------------------------------------------

double Mesh::area() const {
  double a = 0.0;
  for (const auto& t : triangles) a += 0.5 * cross(nodes[t[1]] - nodes[t[0]], nodes[t[2]] - nodes[t[0]]);
  return a;
}

double Mesh::boundary_length() const {
  double l = 0.0;
  for (const auto& e : boundary) l += (nodes[e.b] - nodes[e.a]).norm();
  return l;
}

double Mesh::min_angle_degrees() const {
  double m = kPi;
  for (const auto& t : triangles) m = std::min(m, triangle_min_angle(nodes[t[0]], nodes[t[1]], nodes[t[2]]));
  return m * 180.0 / kPi;
}

double Mesh::max_edge_length() const {
  double m = 0.0;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) m = std::max(m, (nodes[t[k]] - nodes[t[(k + 1) % 3]]).norm());
  return m;
}

std::vector<bool> Mesh::boundary_node_mask() const {
  std::vector<bool> mask(nodes.size(), false);
  for (const auto& e : boundary) mask[e.a] = mask[e.b] = true;
  return mask;
}

Mesh triangulate(const BoundaryCurve& curve, double h, const MeshOptions& options) {
  if (!(h > 0.0)) throw MeshError("triangulate: h must be positive");
  const double kappa = curve.max_abs_curvature();
  if (h * kappa > 0.5) {
    std::ostringstream os;
    os << "triangulate: h = " << h << " does not resolve the boundary curvature (h max|H| = " << h * kappa
       << " > 0.5)";
    throw MeshError(os.str());
  }
  const Symmetry sym = options.use_symmetry ? curve.symmetry() : Symmetry::none;
  const RegionMesh rm = mesh_region(curve, h, sym, options.smoothing_rounds);
  return assemble_full_mesh(rm, sym, h);
}

Mesh refine(const Mesh& mesh, const BoundaryCurve& curve) {
  Mesh out;
  out.h = 0.5 * mesh.h;
  out.nodes = mesh.nodes;
  std::unordered_map<std::uint64_t, int> mid;
  std::unordered_map<std::uint64_t, const BoundaryEdge*> bedge;
  for (const auto& e : mesh.boundary) bedge[edge_key(e.a, e.b)] = &e;
  auto midpoint = [&](int a, int b) {
    const std::uint64_t key = edge_key(a, b);
    if (auto it = mid.find(key); it != mid.end()) return it->second;
    const int id = static_cast<int>(out.nodes.size());
    if (auto be = bedge.find(key); be != bedge.end()) {
      out.nodes.push_back(curve.point(0.5 * (be->second->theta_a + be->second->theta_b)));
    } else {
      out.nodes.push_back(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
    }
    mid.emplace(key, id);
    return id;
  };
  out.triangles.reserve(4 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const int a = t[0], b = t[1], c = t[2];
    const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
    out.triangles.push_back({a, ab, ca});
    out.triangles.push_back({ab, b, bc});
    out.triangles.push_back({ca, bc, c});
    out.triangles.push_back({ab, bc, ca});
  }
  for (const auto& e : mesh.boundary) {
    const int m = mid.at(edge_key(e.a, e.b));
    const double tm = 0.5 * (e.theta_a + e.theta_b);
    out.boundary.push_back({e.a, m, e.theta_a, tm});
    out.boundary.push_back({m, e.b, tm, e.theta_b});
  }
  return out;
}

Mesh triangulate_refined(const BoundaryCurve& curve, double h0, int levels, const MeshOptions& options) {
  Mesh m = triangulate(curve, h0, options);
  for (int l = 0; l < levels; ++l) m = refine(m, curve);
  return m;
}

void validate_mesh(const Mesh& mesh, const BoundaryCurve& curve, double min_angle_degrees) {
  const int n = static_cast<int>(mesh.nodes.size());
  std::vector<int> used(n, 0);
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= n) throw MeshError("validate_mesh: triangle index out of range");
      ++used[t[k]];
    }
    if (!(cross(mesh.nodes[t[1]] - mesh.nodes[t[0]], mesh.nodes[t[2]] - mesh.nodes[t[0]]) > 0.0))
      throw MeshError("validate_mesh: triangle " + std::to_string(i) + " not positively oriented");
  }
  for (int i = 0; i < n; ++i)
    if (!used[i]) throw MeshError("validate_mesh: orphan node " + std::to_string(i));
  const double ma = mesh.min_angle_degrees();
  if (ma < min_angle_degrees) {
    std::ostringstream os;
    os << "validate_mesh: minimum angle " << ma << " deg below " << min_angle_degrees;
    throw MeshError(os.str());
  }
  if (mesh.boundary.size() < 3) throw MeshError("validate_mesh: boundary loop too short");
  double scale = 0.0;
  for (const auto& p : mesh.nodes) scale = std::max(scale, p.norm());
  for (size_t k = 0; k < mesh.boundary.size(); ++k) {
    const auto& e = mesh.boundary[k];
    const auto& next = mesh.boundary[(k + 1) % mesh.boundary.size()];
    if (e.b != next.a) throw MeshError("validate_mesh: boundary edges do not form a closed loop");
    if (!(e.theta_b > e.theta_a)) throw MeshError("validate_mesh: boundary parameters not increasing");
    if ((mesh.nodes[e.a] - curve.point(e.theta_a)).norm() > 1e-12 * std::max(1.0, scale))
      throw MeshError("validate_mesh: boundary node off the curve");
  }
}

std::string mesh_to_text(const Mesh& mesh) {
  std::string s;
  s += std::to_string(mesh.nodes.size()) + " " + std::to_string(mesh.triangles.size()) + " " +
       std::to_string(mesh.boundary.size()) + " " + shortest(mesh.h) + "\n";
  for (const auto& p : mesh.nodes) s += shortest(p.x()) + " " + shortest(p.y()) + "\n";
  for (const auto& t : mesh.triangles)
    s += std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n";
  for (const auto& e : mesh.boundary)
    s += std::to_string(e.a) + " " + std::to_string(e.b) + " " + shortest(e.theta_a) + " " + shortest(e.theta_b) +
         "\n";
  return s;
}

Mesh mesh_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string a, b, c, d;
  if (!(in >> a >> b >> c >> d)) throw MeshError("mesh file: missing counts line");
  const auto nn = parse_number<size_t>(a), nt = parse_number<size_t>(b), ne = parse_number<size_t>(c);
  Mesh m;
  m.h = parse_number<double>(d);
  m.nodes.resize(nn);
  for (auto& p : m.nodes) {
    if (!(in >> a >> b)) throw MeshError("mesh file: truncated node list");
    p = Vec2(parse_number<double>(a), parse_number<double>(b));
  }
  m.triangles.resize(nt);
  for (auto& t : m.triangles) {
    if (!(in >> a >> b >> c)) throw MeshError("mesh file: truncated triangle list");
    t = {parse_number<int>(a), parse_number<int>(b), parse_number<int>(c)};
  }
  m.boundary.resize(ne);
  for (auto& e : m.boundary) {
    if (!(in >> a >> b >> c >> d)) throw MeshError("mesh file: truncated boundary list");
    e = {parse_number<int>(a), parse_number<int>(b), parse_number<double>(c), parse_number<double>(d)};
  }
  return m;
}

}  // namespace buckle
