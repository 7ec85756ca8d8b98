#include "buckle/discretization.hpp"

#include "buckle/quadrature.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace buckle {

namespace {

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (hi << 32) | lo;
}

constexpr int kEdgeLocal[3][2] = {{0, 1}, {1, 2}, {2, 0}};

// Unit normal of segment a -> b pointing away from `inside`.
Vec2 edge_normal(const Vec2& a, const Vec2& b, const Vec2& inside) {
  const Vec2 d = b - a;
  Vec2 n(d.y(), -d.x());
  n.normalize();
  if (n.dot(inside - a) > 0) n = -n;
  return n;
}

std::string shortest(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double second_order_value(const Mat2& h, const Vec2& n, SecondOrderForm form) {
  return form == SecondOrderForm::hessian ? n.dot(h * n) : h.trace();
}

// Patch recovery of a per-element constant: every interior vertex fits a
// linear polynomial through the centroid values of its element patch; each
// degree of freedom averages the fits of adjacent interior vertices.
Vec recover_element_constant(const FeSpace& space, const std::vector<double>& q) {
  const Mesh& mesh = space.mesh();
  const int nn = static_cast<int>(mesh.nodes.size());
  std::vector<std::vector<int>> patch(nn);
  for (int t = 0; t < space.element_count(); ++t)
    for (int k = 0; k < 3; ++k) patch[mesh.triangles[t][k]].push_back(t);
  const std::vector<bool> on_boundary = mesh.boundary_node_mask();

  std::vector<Eigen::Vector3d> fit(nn, Eigen::Vector3d::Zero());
  std::vector<bool> has_fit(nn, false);
  for (int v = 0; v < nn; ++v) {
    if (on_boundary[v]) continue;
    // Use the patch of the vertex extended by one ring for a well-posed fit.
    std::vector<int> elems = patch[v];
    if (elems.size() < 6) {
      std::vector<int> ext;
      for (int t : patch[v])
        for (int k = 0; k < 3; ++k)
          for (int s : patch[mesh.triangles[t][k]]) ext.push_back(s);
      std::sort(ext.begin(), ext.end());
      ext.erase(std::unique(ext.begin(), ext.end()), ext.end());
      elems = ext;
    }
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    const Vec2& xv = mesh.nodes[v];
    for (int t : elems) {
      const Vec2 d = space.element(t).centroid() - xv;
      const Eigen::Vector3d row(1.0, d.x(), d.y());
      ata += row * row.transpose();
      atb += row * q[t];
    }
    fit[v] = ata.ldlt().solve(atb);
    has_fit[v] = true;
  }

  Vec out = Vec::Zero(space.size());
  std::vector<int> count(space.size(), 0);
  for (int t = 0; t < space.element_count(); ++t) {
    const auto& dofs = space.element_dofs(t);
    for (int k = 0; k < 3; ++k) {
      const int v = mesh.triangles[t][k];
      if (!has_fit[v]) continue;
      for (int j = 0; j < 6; ++j) {
        const Vec2 d = space.dof_point(dofs[j]) - mesh.nodes[v];
        out[dofs[j]] += fit[v][0] + fit[v][1] * d.x() + fit[v][2] * d.y();
        ++count[dofs[j]];
      }
    }
  }
  // Degrees of freedom with no interior vertex nearby take the element value.
  for (int t = 0; t < space.element_count(); ++t)
    for (int d : space.element_dofs(t))
      if (count[d] <= 0) {
        out[d] += q[t];
        --count[d];
      }
  for (int i = 0; i < space.size(); ++i) out[i] /= std::abs(count[i]);
  return out;
}

std::vector<Mat2> element_hessians(const DiscreteField& f) {
  const FeSpace& s = *f.space;
  std::vector<Mat2> h(s.element_count());
  for (int t = 0; t < s.element_count(); ++t) {
    const LocalBasis b = s.basis(t, s.element(t).centroid());
    Mat2 m = Mat2::Zero();
    for (int j = 0; j < 6; ++j) m += f.coeffs[s.element_dofs(t)[j]] * b.hess[j];
    h[t] = m;
  }
  return h;
}

double field_at(const FeSpace& s, const Vec& coeffs, int t, const Vec2& x) {
  const LocalBasis b = s.basis(t, x);
  double v = 0.0;
  for (int j = 0; j < 6; ++j) v += coeffs[s.element_dofs(t)[j]] * b.value[j];
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

Eigen::Vector3d ElementGeometry::barycentric(const Vec2& x) const {
  const double l1 = grad_lambda[1].dot(x - vertex[0]);
  const double l2 = grad_lambda[2].dot(x - vertex[0]);
  return {1.0 - l1 - l2, l1, l2};
}

FeSpace::FeSpace(Mesh mesh, BoundaryCurve curve) : mesh_(std::move(mesh)), curve_(std::move(curve)) {
  const int nn = static_cast<int>(mesh_.nodes.size());
  const int nt = static_cast<int>(mesh_.triangles.size());
  dof_point_ = mesh_.nodes;
  element_dofs_.resize(nt);
  geometry_.resize(nt);
  std::unordered_map<std::uint64_t, int> edge_index;
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh_.triangles[t];
    ElementGeometry& g = geometry_[t];
    for (int k = 0; k < 3; ++k) g.vertex[k] = mesh_.nodes[tri[k]];
    Mat2 jac;
    jac.col(0) = g.vertex[1] - g.vertex[0];
    jac.col(1) = g.vertex[2] - g.vertex[0];
    g.area = 0.5 * jac.determinant();
    const Mat2 inv = jac.inverse();
    g.grad_lambda[1] = inv.row(0).transpose();
    g.grad_lambda[2] = inv.row(1).transpose();
    g.grad_lambda[0] = -g.grad_lambda[1] - g.grad_lambda[2];
    for (int k = 0; k < 3; ++k) element_dofs_[t][k] = tri[k];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[kEdgeLocal[k][0]], b = tri[kEdgeLocal[k][1]];
      const auto key = edge_key(a, b);
      auto it = edge_index.find(key);
      int e;
      if (it == edge_index.end()) {
        e = static_cast<int>(edges_.size());
        edge_index.emplace(key, e);
        edges_.push_back({a, b, t, -1, -1});
        dof_point_.push_back(0.5 * (mesh_.nodes[a] + mesh_.nodes[b]));
      } else {
        e = it->second;
        edges_[e].right = t;
      }
      element_dofs_[t][3 + k] = nn + e;
    }
  }
  boundary_element_.resize(mesh_.boundary.size());
  boundary_edge_.resize(mesh_.boundary.size());
  free_index_.assign(dof_point_.size(), 0);
  for (size_t k = 0; k < mesh_.boundary.size(); ++k) {
    const auto& be = mesh_.boundary[k];
    const int e = edge_index.at(edge_key(be.a, be.b));
    edges_[e].boundary = static_cast<int>(k);
    boundary_element_[k] = edges_[e].left;
    boundary_edge_[k] = e;
    free_index_[be.a] = free_index_[be.b] = free_index_[nn + e] = -1;
  }
  for (size_t i = 0; i < free_index_.size(); ++i) {
    if (free_index_[i] < 0) continue;
    free_index_[i] = static_cast<int>(free_dofs_.size());
    free_dofs_.push_back(static_cast<int>(i));
  }

  // Bucket grid: each triangle registered in the cells of its bounding box.
  Vec2 lo = mesh_.nodes.front(), hi = mesh_.nodes.front();
  for (const auto& p : mesh_.nodes) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  grid_cell_ = std::max(mesh_.max_edge_length(), 1e-12);
  grid_origin_ = lo;
  grid_nx_ = static_cast<int>((hi.x() - lo.x()) / grid_cell_) + 1;
  grid_ny_ = static_cast<int>((hi.y() - lo.y()) / grid_cell_) + 1;
  grid_.assign(static_cast<size_t>(grid_nx_) * grid_ny_, {});
  for (int t = 0; t < nt; ++t) {
    Vec2 a = geometry_[t].vertex[0], b = a;
    for (const auto& v : geometry_[t].vertex) {
      a = a.cwiseMin(v);
      b = b.cwiseMax(v);
    }
    const int i0 = std::max(0, static_cast<int>((a.x() - lo.x()) / grid_cell_));
    const int i1 = std::min(grid_nx_ - 1, static_cast<int>((b.x() - lo.x()) / grid_cell_));
    const int j0 = std::max(0, static_cast<int>((a.y() - lo.y()) / grid_cell_));
    const int j1 = std::min(grid_ny_ - 1, static_cast<int>((b.y() - lo.y()) / grid_cell_));
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) grid_[static_cast<size_t>(j) * grid_nx_ + i].push_back(t);
  }
}

LocalBasis FeSpace::basis(int t, const Vec2& x) const {
  const ElementGeometry& g = geometry_[t];
  const Eigen::Vector3d l = g.barycentric(x);
  LocalBasis b;
  for (int i = 0; i < 3; ++i) {
    const Vec2& gi = g.grad_lambda[i];
    b.value[i] = l[i] * (2.0 * l[i] - 1.0);
    b.grad[i] = (4.0 * l[i] - 1.0) * gi;
    b.hess[i] = 4.0 * gi * gi.transpose();
  }
  for (int k = 0; k < 3; ++k) {
    const int i = kEdgeLocal[k][0], j = kEdgeLocal[k][1];
    const Vec2& gi = g.grad_lambda[i];
    const Vec2& gj = g.grad_lambda[j];
    b.value[3 + k] = 4.0 * l[i] * l[j];
    b.grad[3 + k] = 4.0 * (l[j] * gi + l[i] * gj);
    b.hess[3 + k] = 4.0 * (gi * gj.transpose() + gj * gi.transpose());
  }
  return b;
}

int FeSpace::locate(const Vec2& x) const {
  const int i = static_cast<int>(std::floor((x.x() - grid_origin_.x()) / grid_cell_));
  const int j = static_cast<int>(std::floor((x.y() - grid_origin_.y()) / grid_cell_));
  if (i < 0 || j < 0 || i >= grid_nx_ || j >= grid_ny_) return -1;
  int best = -1;
  double best_min = -1e-10;
  for (int t : grid_[static_cast<size_t>(j) * grid_nx_ + i]) {
    const Eigen::Vector3d l = geometry_[t].barycentric(x);
    const double m = l.minCoeff();
    if (m >= best_min) {
      best_min = m;
      best = t;
      if (m >= 0) break;
    }
  }
  return best;
}

std::string form_tag_name(FormTag tag) {
  switch (tag) {
    case FormTag::bending: return "bending";
    case FormTag::gradient: return "gradient";
    case FormTag::stiffness: return "stiffness";
    case FormTag::mass: return "mass";
  }
  return "unknown";
}

std::string field_kind_name(FieldKind kind) {
  switch (kind) {
    case FieldKind::buckling: return "buckling";
    case FieldKind::dirichlet: return "dirichlet";
    case FieldKind::shape_derivative: return "shape_derivative";
    case FieldKind::composite: return "composite";
  }
  return "unknown";
}

SpMat SparseSymmetricForm::constrained(const FeSpace& space) const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(matrix.nonZeros());
  for (int c = 0; c < matrix.outerSize(); ++c)
    for (SpMat::InnerIterator it(matrix, c); it; ++it) {
      const int i = space.free_index(static_cast<int>(it.row()));
      const int j = space.free_index(static_cast<int>(it.col()));
      if (i >= 0 && j >= 0) trip.emplace_back(i, j, it.value());
    }
  SpMat out(space.free_size(), space.free_size());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

BucklingForms assemble_buckling(const FeSpace& space, const BendingOptions& options) {
  if (!(options.penalty > 0.0)) throw std::invalid_argument("assemble_buckling: penalty must be positive");
  const int n = space.size();
  std::vector<Eigen::Triplet<double>> ta, tb;
  const TriangleRule rule2 = triangle_rule(2);

  for (int t = 0; t < space.element_count(); ++t) {
    const ElementGeometry& g = space.element(t);
    const auto& dofs = space.element_dofs(t);
    const LocalBasis c = space.basis(t, g.centroid());
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        const double v = options.form == SecondOrderForm::hessian ? c.hess[i].cwiseProduct(c.hess[j]).sum()
                                                                  : c.hess[i].trace() * c.hess[j].trace();
        ta.emplace_back(dofs[i], dofs[j], g.area * v);
      }
    Eigen::Matrix<double, 6, 6> kb = Eigen::Matrix<double, 6, 6>::Zero();
    for (size_t q = 0; q < rule2.weights.size(); ++q) {
      const Vec2 x = rule2.points[q][0] * g.vertex[0] + rule2.points[q][1] * g.vertex[1] +
                     rule2.points[q][2] * g.vertex[2];
      const LocalBasis b = space.basis(t, x);
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) kb(i, j) += rule2.weights[q] * g.area * b.grad[i].dot(b.grad[j]);
    }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) tb.emplace_back(dofs[i], dofs[j], kb(i, j));
  }

  const GaussRule gauss = gauss_legendre(3);
  for (const auto& e : space.edges()) {
    const bool is_boundary = e.right < 0;
    if (is_boundary ? !options.boundary_edges : !options.interior_edges) continue;
    const Vec2& a = space.mesh().nodes[e.a];
    const Vec2& b = space.mesh().nodes[e.b];
    const double len = (b - a).norm();
    const int tl = e.left;
    const ElementGeometry& gl = space.element(tl);
    const Vec2 n = edge_normal(a, b, gl.centroid());
    // union of the degrees of freedom of the adjacent elements
    std::vector<int> dofs(space.element_dofs(tl).begin(), space.element_dofs(tl).end());
    std::array<int, 6> pos_r{};
    if (!is_boundary) {
      for (int j = 0; j < 6; ++j) {
        const int d = space.element_dofs(e.right)[j];
        auto it = std::find(dofs.begin(), dofs.end(), d);
        if (it == dofs.end()) {
          pos_r[j] = static_cast<int>(dofs.size());
          dofs.push_back(d);
        } else {
          pos_r[j] = static_cast<int>(it - dofs.begin());
        }
      }
    }
    const int m = static_cast<int>(dofs.size());
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(m, m);
    for (size_t q = 0; q < gauss.nodes.size(); ++q) {
      const double s = 0.5 * (gauss.nodes[q] + 1.0);
      const double w = 0.5 * gauss.weights[q] * len;
      const Vec2 x = a + s * (b - a);
      Eigen::VectorXd jump = Eigen::VectorXd::Zero(m), avg = Eigen::VectorXd::Zero(m);
      const LocalBasis bl = space.basis(tl, x);
      const double half = is_boundary ? 1.0 : 0.5;
      for (int j = 0; j < 6; ++j) {
        jump[j] += bl.grad[j].dot(n);
        avg[j] += half * second_order_value(bl.hess[j], n, options.form);
      }
      if (!is_boundary) {
        const LocalBasis br = space.basis(e.right, x);
        for (int j = 0; j < 6; ++j) {
          jump[pos_r[j]] -= br.grad[j].dot(n);
          avg[pos_r[j]] += half * second_order_value(br.hess[j], n, options.form);
        }
      }
      local += w * (-(avg * jump.transpose() + jump * avg.transpose()) +
                    (options.penalty / len) * jump * jump.transpose());
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (local(i, j) != 0.0) ta.emplace_back(dofs[i], dofs[j], local(i, j));
  }

  BucklingForms f{{FormTag::bending, SpMat(n, n)}, {FormTag::gradient, SpMat(n, n)}};
  f.A.matrix.setFromTriplets(ta.begin(), ta.end());
  f.B.matrix.setFromTriplets(tb.begin(), tb.end());
  // Symmetrize to remove round-off asymmetry of the edge terms.
  SpMat at = f.A.matrix.transpose();
  f.A.matrix = 0.5 * (f.A.matrix + at);
  SpMat bt = f.B.matrix.transpose();
  f.B.matrix = 0.5 * (f.B.matrix + bt);
  return f;
}

LaplaceForms assemble_laplace(const FeSpace& space) {
  const int n = space.size();
  std::vector<Eigen::Triplet<double>> tk, tm;
  const TriangleRule rule = triangle_rule(4);
  for (int t = 0; t < space.element_count(); ++t) {
    const ElementGeometry& g = space.element(t);
    const auto& dofs = space.element_dofs(t);
    Eigen::Matrix<double, 6, 6> kk = Eigen::Matrix<double, 6, 6>::Zero(), mm = kk;
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      const Vec2 x = rule.points[q][0] * g.vertex[0] + rule.points[q][1] * g.vertex[1] +
                     rule.points[q][2] * g.vertex[2];
      const LocalBasis b = space.basis(t, x);
      const double w = rule.weights[q] * g.area;
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
          kk(i, j) += w * b.grad[i].dot(b.grad[j]);
          mm(i, j) += w * b.value[i] * b.value[j];
        }
    }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        tk.emplace_back(dofs[i], dofs[j], kk(i, j));
        tm.emplace_back(dofs[i], dofs[j], mm(i, j));
      }
  }
  LaplaceForms f{{FormTag::stiffness, SpMat(n, n)}, {FormTag::mass, SpMat(n, n)}};
  f.K.matrix.setFromTriplets(tk.begin(), tk.end());
  f.M.matrix.setFromTriplets(tm.begin(), tm.end());
  SpMat kt = f.K.matrix.transpose();
  f.K.matrix = 0.5 * (f.K.matrix + kt);
  SpMat mt = f.M.matrix.transpose();
  f.M.matrix = 0.5 * (f.M.matrix + mt);
  return f;
}

Vec extend_free(const FeSpace& space, const Vec& free_values) {
  if (free_values.size() != space.free_size()) throw std::invalid_argument("extend_free: size mismatch");
  Vec out = Vec::Zero(space.size());
  for (int i = 0; i < space.free_size(); ++i) out[space.free_dofs()[i]] = free_values[i];
  return out;
}

Vec restrict_free(const FeSpace& space, const Vec& coeffs) {
  if (coeffs.size() != space.size()) throw std::invalid_argument("restrict_free: size mismatch");
  Vec out(space.free_size());
  for (int i = 0; i < space.free_size(); ++i) out[i] = coeffs[space.free_dofs()[i]];
  return out;
}

Vec interpolate(const FeSpace& space, const std::function<double(const Vec2&)>& f) {
  Vec out(space.size());
  for (int i = 0; i < space.size(); ++i) out[i] = f(space.dof_point(i));
  return out;
}

PointValue evaluate(const DiscreteField& field, const Vec2& x) {
  const FeSpace& s = *field.space;
  int t = s.locate(x);
  if (t < 0) {
    double best = s.mesh().h;
    for (size_t k = 0; k < s.mesh().boundary.size(); ++k) {
      const Vec2& a = s.mesh().nodes[s.mesh().boundary[k].a];
      const Vec2& b = s.mesh().nodes[s.mesh().boundary[k].b];
      const Vec2 ab = b - a;
      const double r = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
      const double d = (x - (a + r * ab)).norm();
      if (d <= best) {
        best = d;
        t = s.boundary_element(static_cast<int>(k));
      }
    }
    if (t < 0) {
      std::ostringstream os;
      os << "evaluate: point (" << x.x() << ", " << x.y() << ") is outside the mesh";
      throw EvaluationError(os.str());
    }
  }
  const LocalBasis b = s.basis(t, x);
  PointValue pv;
  pv.element = t;
  for (int j = 0; j < 6; ++j) {
    const double c = field.coeffs[s.element_dofs(t)[j]];
    pv.value += c * b.value[j];
    pv.gradient += c * b.grad[j];
    pv.hessian += c * b.hess[j];
  }
  pv.laplacian = pv.hessian.trace();
  return pv;
}

DiscreteField recover_laplacian(const DiscreteField& field) {
  const std::vector<Mat2> h = element_hessians(field);
  std::vector<double> q(h.size());
  for (size_t t = 0; t < h.size(); ++t) q[t] = h[t].trace();
  return {field.space, recover_element_constant(*field.space, q), FieldKind::composite};
}

std::vector<TraceSample> trace_samples(const FeSpace& space, int order) {
  const GaussRule g = gauss_legendre(order);
  std::vector<TraceSample> out;
  const auto& bnd = space.mesh().boundary;
  out.reserve(bnd.size() * g.nodes.size());
  for (size_t k = 0; k < bnd.size(); ++k) {
    const double ta = bnd[k].theta_a, tb = bnd[k].theta_b;
    for (size_t q = 0; q < g.nodes.size(); ++q) {
      const double th = ta + 0.5 * (g.nodes[q] + 1.0) * (tb - ta);
      const BoundaryGeometry geo = boundary_geometry(space.curve(), th);
      TraceSample s;
      s.theta = th;
      s.weight = 0.5 * g.weights[q] * (tb - ta) * geo.speed;
      s.point = geo.point;
      s.normal = geo.normal;
      s.curvature = geo.curvature;
      s.edge = static_cast<int>(k);
      s.element = space.boundary_element(static_cast<int>(k));
      out.push_back(s);
    }
  }
  return out;
}

double BoundaryTrace::integral() const {
  double s = 0.0;
  for (size_t i = 0; i < values.size(); ++i) s += samples[i].weight * values[i];
  return s;
}

double BoundaryTrace::length() const {
  double s = 0.0;
  for (const auto& x : samples) s += x.weight;
  return s;
}

double BoundaryTrace::max_relative_deviation() const {
  const double m = mean();
  double d = 0.0;
  for (double v : values) d = std::max(d, std::abs(v - m));
  return d / std::abs(m);
}

double BoundaryTrace::integral_of_square() const {
  double s = 0.0;
  for (size_t i = 0; i < values.size(); ++i) s += samples[i].weight * values[i] * values[i];
  return s;
}

BoundaryTrace boundary_trace_laplacian(const DiscreteField& field, int order) {
  const FeSpace& s = *field.space;
  const DiscreteField rec = recover_laplacian(field);
  BoundaryTrace tr{trace_samples(s, order), {}};
  tr.values.reserve(tr.samples.size());
  for (const auto& x : tr.samples) tr.values.push_back(field_at(s, rec.coeffs, x.element, x.point));
  return tr;
}

BoundaryTrace boundary_trace_normal_second(const DiscreteField& field, int order) {
  const FeSpace& s = *field.space;
  const std::vector<Mat2> h = element_hessians(field);
  std::array<Vec, 3> comp;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> q(h.size());
    for (size_t t = 0; t < h.size(); ++t) q[t] = c == 0 ? h[t](0, 0) : (c == 1 ? h[t](0, 1) : h[t](1, 1));
    comp[c] = recover_element_constant(s, q);
  }
  BoundaryTrace tr{trace_samples(s, order), {}};
  for (const auto& x : tr.samples) {
    const double hxx = field_at(s, comp[0], x.element, x.point);
    const double hxy = field_at(s, comp[1], x.element, x.point);
    const double hyy = field_at(s, comp[2], x.element, x.point);
    const Vec2& n = x.normal;
    tr.values.push_back(hxx * n.x() * n.x() + 2.0 * hxy * n.x() * n.y() + hyy * n.y() * n.y());
  }
  return tr;
}

BoundaryTrace boundary_trace_normal_derivative(const DiscreteField& field, int order) {
  const FeSpace& s = *field.space;
  BoundaryTrace tr{trace_samples(s, order), {}};
  for (const auto& x : tr.samples) {
    const LocalBasis b = s.basis(x.element, x.point);
    Vec2 g = Vec2::Zero();
    for (int j = 0; j < 6; ++j) g += field.coeffs[s.element_dofs(x.element)[j]] * b.grad[j];
    tr.values.push_back(g.dot(x.normal));
  }
  return tr;
}

Vec assemble_normal_derivative_load(const FeSpace& space, const std::function<double(double theta)>& g,
                                    double penalty, SecondOrderForm form) {
  Vec f = Vec::Zero(space.size());
  const GaussRule gauss = gauss_legendre(4);
  const auto& bnd = space.mesh().boundary;
  for (size_t k = 0; k < bnd.size(); ++k) {
    const int t = space.boundary_element(static_cast<int>(k));
    const Vec2& a = space.mesh().nodes[bnd[k].a];
    const Vec2& b = space.mesh().nodes[bnd[k].b];
    const double len = (b - a).norm();
    const Vec2 n = edge_normal(a, b, space.element(t).centroid());
    for (size_t q = 0; q < gauss.nodes.size(); ++q) {
      const double s = 0.5 * (gauss.nodes[q] + 1.0);
      const double w = 0.5 * gauss.weights[q] * len;
      const double gv = g(bnd[k].theta_a + s * (bnd[k].theta_b - bnd[k].theta_a));
      const LocalBasis lb = space.basis(t, a + s * (b - a));
      for (int j = 0; j < 6; ++j)
        f[space.element_dofs(t)[j]] +=
            w * gv * (-second_order_value(lb.hess[j], n, form) + (penalty / len) * lb.grad[j].dot(n));
    }
  }
  return f;
}

std::string form_to_text(const SparseSymmetricForm& form) {
  std::vector<std::tuple<int, int, double>> entries;
  for (int c = 0; c < form.matrix.outerSize(); ++c)
    for (SpMat::InnerIterator it(form.matrix, c); it; ++it)
      if (it.row() <= it.col()) entries.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  std::sort(entries.begin(), entries.end());
  std::string s = form_tag_name(form.tag) + " " + std::to_string(form.dim()) + " " + std::to_string(entries.size()) + "\n";
  for (const auto& [i, j, v] : entries) s += std::to_string(i) + " " + std::to_string(j) + " " + shortest(v) + "\n";
  return s;
}

std::string field_to_text(const DiscreteField& field) {
  std::string s = field_kind_name(field.kind) + " " + std::to_string(field.coeffs.size()) + "\n";
  for (int i = 0; i < field.coeffs.size(); ++i) s += shortest(field.coeffs[i]) + "\n";
  return s;
}

}  // namespace buckle
