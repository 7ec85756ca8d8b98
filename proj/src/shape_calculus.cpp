#include "buckle/shape_calculus.hpp"

#include "buckle/quadrature.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace buckle {

namespace {

// Smooth function vanishing on the curve with normal derivative g(theta),
// built in star coordinates x = s p(theta): L = g (s - 1) chi(s) / d_nu s.
double datum_lifting(const BoundaryCurve& curve, const std::function<double(double)>& g, const Vec2& x) {
  const auto sc = curve.star_coordinates(x);
  if (!sc) throw GeometryError("shape derivative: base curve has no star coordinates");
  const auto [r, th] = *sc;
  if (r <= 0.25) return 0.0;
  const Vec2 p = curve.point(th);
  const Vec2 dp = curve.derivative(th, 1);
  const double dnu_s = dp.norm() / (p.x() * dp.y() - p.y() * dp.x());
  double chi = 1.0;
  if (r < 0.5) {
    const double t = (r - 0.25) / 0.25;
    chi = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
  }
  return g(th) * (r - 1.0) * chi / dnu_s;
}

double integral_of(const Vec& q, const DiscreteField& f) { return q.dot(f.coeffs); }

DiscreteField combine(const std::shared_ptr<const FeSpace>& space, const Vec& coeffs, FieldKind kind) {
  return {space, coeffs, kind};
}

}  // namespace

// ---------------------------------------------------------------------------
// Eigenpairs

BucklingSolution solve_buckling(std::shared_ptr<const FeSpace> space, const PipelineOptions& options) {
  BucklingSolution sol;
  sol.space = space;
  sol.penalty = options.penalty;
  BendingOptions bo;
  bo.penalty = options.penalty;
  sol.forms = assemble_buckling(*space, bo);
  const SpMat A = sol.forms.A.constrained(*space);
  const SpMat B = sol.forms.B.constrained(*space);
  if (!is_positive_definite(A)) {
    std::ostringstream os;
    os << "solve_buckling: bending form is not coercive on the constrained space (penalty " << options.penalty
       << " below the threshold)";
    throw EigenSolverError(os.str());
  }
  const std::vector<EigenPair> pairs = solve_smallest(A, B, 2, options.buckling_solver);
  sol.lambda = pairs[0].value;
  sol.second = pairs[1].value;
  sol.residual = pairs[0].residual;
  sol.u = {space, extend_free(*space, pairs[0].vector), FieldKind::buckling};
  if (boundary_trace_laplacian(sol.u).integral() < 0) sol.u.coeffs = -sol.u.coeffs;
  return sol;
}

Vec basis_integrals(const FeSpace& space) {
  Vec q = Vec::Zero(space.size());
  const TriangleRule& rule = triangle_rule(2);
  for (int t = 0; t < space.element_count(); ++t) {
    const ElementGeometry& g = space.element(t);
    for (size_t k = 0; k < rule.weights.size(); ++k) {
      const Vec2 x = rule.points[k][0] * g.vertex[0] + rule.points[k][1] * g.vertex[1] + rule.points[k][2] * g.vertex[2];
      const LocalBasis b = space.basis(t, x);
      for (int j = 0; j < 6; ++j) q[space.element_dofs(t)[j]] += rule.weights[k] * g.area * b.value[j];
    }
  }
  return q;
}

DirichletSolution solve_dirichlet(std::shared_ptr<const FeSpace> space, int count, const PipelineOptions& options) {
  DirichletSolution dir;
  dir.space = space;
  dir.forms = assemble_laplace(*space);
  const std::vector<EigenPair> pairs =
      solve_smallest(dir.forms.K.constrained(*space), dir.forms.M.constrained(*space), count, options.dirichlet_solver);
  const Vec q = restrict_free(*space, basis_integrals(*space));
  std::vector<Vec> vecs;
  for (const auto& p : pairs) {
    dir.lambda.push_back(p.value);
    dir.cluster.push_back(p.cluster);
    vecs.push_back(p.vector);
  }
  // Sign and rotation conventions, cluster by cluster.
  for (int i = 0; i < count;) {
    int j = i;
    while (j < count && dir.cluster[j] == dir.cluster[i]) ++j;
    const int s = j - i;
    if (s == 1) {
      const double m = q.dot(vecs[i]);
      if ((i == 0 && m < 0) || (i > 0 && m > 0)) vecs[i] = -vecs[i];
    } else {
      Eigen::MatrixXd U(q.size(), s);
      for (int k = 0; k < s; ++k) U.col(k) = vecs[i + k];
      const Eigen::VectorXd m = U.transpose() * q;
      // Householder reflection mapping m to a multiple of the last unit vector
      // leaves s - 1 mean-free members followed by one carrying the mean.
      Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(s, s);
      if (m.norm() > 0) {
        Eigen::VectorXd target = Eigen::VectorXd::Zero(s);
        target[s - 1] = -m.norm();
        Eigen::VectorXd w = m - target;
        if (w.norm() > 0) Q -= 2.0 * w * w.transpose() / w.squaredNorm();
      }
      const Eigen::MatrixXd R = U * Q;
      for (int k = 0; k < s; ++k) vecs[i + k] = R.col(k);
      if (i == 0 && q.dot(vecs[0]) < 0) vecs[0] = -vecs[0];
    }
    i = j;
  }
  for (const auto& v : vecs) dir.u.push_back({space, extend_free(*space, v), FieldKind::dirichlet});
  return dir;
}

// ---------------------------------------------------------------------------
// Criticality and first variation

double critical_constant(double lambda, double area, int dimension) {
  return std::sqrt(2.0 * lambda / (dimension * area));
}

CriticalityReport criticality_report(const BucklingSolution& sol, int dimension) {
  const FeSpace& s = *sol.space;
  CriticalityReport r;
  r.lambda = sol.lambda;
  r.c0 = critical_constant(sol.lambda, volume(s.curve()), dimension);
  const BoundaryTrace tr = boundary_trace_laplacian(sol.u);
  r.trace_mean = tr.mean();
  r.trace_max_deviation = tr.max_relative_deviation();
  for (size_t i = 0; i < tr.values.size(); ++i)
    r.rel_value += 0.5 * tr.samples[i].weight * tr.values[i] * tr.values[i] * tr.samples[i].point.dot(tr.samples[i].normal);

  const DiscreteField lap = recover_laplacian(sol.u);
  Vec2 lo = s.mesh().nodes.front(), hi = lo;
  for (const auto& p : s.mesh().nodes) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const int n = 24;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const Vec2 x(lo.x() + (hi.x() - lo.x()) * i / n, lo.y() + (hi.y() - lo.y()) * j / n);
      if (s.locate(x) < 0) continue;
      const double w = evaluate(lap, x).value + sol.lambda * evaluate(sol.u, x).value;
      r.w_residual = std::max(r.w_residual, std::abs(w - r.c0));
      ++r.samples;
    }
  return r;
}

double first_variation(const BucklingSolution& sol, const PerturbationField& field) {
  const BoundaryTrace tr = boundary_trace_laplacian(sol.u);
  double s = 0.0;
  for (size_t i = 0; i < tr.values.size(); ++i)
    s -= tr.samples[i].weight * tr.values[i] * tr.values[i] * field.normal_component(tr.samples[i].theta);
  return s;
}

double lambda_of_t(const BoundaryCurve& curve, const PerturbationField& field, double t, const SweepOptions& options) {
  const BoundaryCurve mapped = map_domain(curve, field, t);
  MeshOptions mo;
  mo.use_symmetry = false;
  auto space = std::make_shared<const FeSpace>(triangulate(mapped, options.h, mo), mapped);
  return solve_buckling(space, options.pipeline).lambda;
}

double VariationReport::first_discrepancy() const {
  const double d = std::abs(formula - fd);
  return std::abs(fd) > 1e-8 ? d / std::abs(fd) : d;
}

double VariationReport::second_discrepancy() const {
  const double d = std::abs(second_formula - second_fd);
  return std::abs(second_fd) > 1e-8 ? d / std::abs(second_fd) : d;
}

VariationReport fd_first_variation_check(const BoundaryCurve& curve, const PerturbationField& field, double step,
                                         const SweepOptions& options) {
  VariationReport r;
  r.step = step;
  r.h = options.h;
  auto space = std::make_shared<const FeSpace>(triangulate(curve, options.h), curve);
  const BucklingSolution sol = solve_buckling(space, options.pipeline);
  r.formula = first_variation(sol, field);
  const double lp = lambda_of_t(curve, field, step, options);
  const double lm = lambda_of_t(curve, field, -step, options);
  r.samples = {{-step, lm}, {step, lp}};
  r.fd = (lp - lm) / (2.0 * step);
  return r;
}

// ---------------------------------------------------------------------------
// Shape derivative

ShapeDerivative solve_shape_derivative(const BucklingSolution& sol, const PerturbationField& field,
                                       const ShapeDerivativeOptions& options) {
  const FeSpace& s = *sol.space;
  const double gap = (sol.second - sol.lambda) / sol.lambda;
  if (gap < options.gap_threshold) {
    std::ostringstream os;
    os << "spectral gap " << gap << " below " << options.gap_threshold << ": first eigenvalue not simple";
    throw GateRefusal(os.str());
  }
  const CriticalityReport crit = criticality_report(sol, options.dimension);
  if (!crit.critical(options.criticality_threshold)) {
    std::ostringstream os;
    os << "criticality gate: Delta u boundary trace deviates by " << crit.trace_max_deviation << " (threshold "
       << options.criticality_threshold << ")";
    throw GateRefusal(os.str());
  }
  ShapeDerivative out;
  out.c0 = critical_constant(sol.lambda, volume(s.curve()), options.dimension);
  const double c0 = out.c0;
  auto datum = [&](double th) { return -c0 * field.normal_component(th); };

  // u' = I_h L + w. The lifting L vanishes on the exact curve and carries the
  // datum, so u' is not forced to zero along the straight boundary chords; w
  // takes homogeneous clamped conditions and the datum enters weakly.
  const Vec lift = interpolate(s, [&](const Vec2& x) { return datum_lifting(s.curve(), datum, x); });
  const Vec f_full = assemble_normal_derivative_load(s, datum, sol.penalty) -
                     (sol.forms.A.matrix * lift - sol.lambda * (sol.forms.B.matrix * lift));
  const Vec f = restrict_free(s, f_full);

  const SpMat A = sol.forms.A.constrained(s);
  const SpMat B = sol.forms.B.constrained(s);
  const Vec uc = restrict_free(s, sol.u.coeffs);
  const Vec bu = B * uc;
  const SpMat K = A - sol.lambda * B;
  const int n = static_cast<int>(K.rows());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(K.nonZeros() + 2 * n);
  for (int c = 0; c < K.outerSize(); ++c)
    for (SpMat::InnerIterator it(K, c); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < n; ++i)
    if (bu[i] != 0.0) {
      trip.emplace_back(i, n, bu[i]);
      trip.emplace_back(n, i, bu[i]);
    }
  SpMat bordered(n + 1, n + 1);
  bordered.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<SpMat> lu;
  lu.compute(bordered);
  if (lu.info() != Eigen::Success) throw GateRefusal("shape derivative: bordered system is singular");
  const Vec bu_full = sol.forms.B.matrix * sol.u.coeffs;
  Vec rhs(n + 1);
  rhs.head(n) = f;
  rhs[n] = -bu_full.dot(lift);
  const Vec x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw GateRefusal("shape derivative: bordered solve failed");
  out.multiplier = x[n];
  out.u_prime = {sol.space, lift + extend_free(s, x.head(n)), FieldKind::shape_derivative};
  out.constraint = bu_full.dot(out.u_prime.coeffs);

  const BoundaryTrace tr = boundary_trace_normal_derivative(out.u_prime);
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < tr.values.size(); ++i) {
    const double g = datum(tr.samples[i].theta);
    num += tr.samples[i].weight * (tr.values[i] - g) * (tr.values[i] - g);
    den += tr.samples[i].weight * g * g;
  }
  out.neumann_residual = den > 0 ? std::sqrt(num / den) : std::sqrt(num);
  return out;
}

// ---------------------------------------------------------------------------
// Quadratic functional

EnergyFunctional::EnergyFunctional(const BucklingSolution& sol, int dimension)
    : lambda_(sol.lambda), dimension_(dimension) {
  BendingOptions bo;
  bo.penalty = sol.penalty;
  bo.boundary_edges = false;
  bo.form = SecondOrderForm::laplacian;
  laplacian_ = assemble_buckling(*sol.space, bo).A;
  bo.form = SecondOrderForm::hessian;
  BucklingForms h = assemble_buckling(*sol.space, bo);
  hessian_ = std::move(h.A);
  B_ = std::move(h.B);
}

double EnergyFunctional::laplacian_energy(const DiscreteField& phi) const { return laplacian_.energy(phi.coeffs); }

double EnergyFunctional::E(const DiscreteField& phi) const {
  return laplacian_.energy(phi.coeffs) - lambda_ * B_.energy(phi.coeffs);
}

double EnergyFunctional::curvature_term(const DiscreteField& phi) const {
  const BoundaryTrace tr = boundary_trace_normal_derivative(phi);
  double s = 0.0;
  for (size_t i = 0; i < tr.values.size(); ++i) s += tr.samples[i].weight * tr.values[i] * tr.values[i] * tr.samples[i].curvature;
  return (dimension_ - 1) * s;
}

double EnergyFunctional::E2(const DiscreteField& phi) const {
  return hessian_.energy(phi.coeffs) - lambda_ * B_.energy(phi.coeffs) + curvature_term(phi);
}

// ---------------------------------------------------------------------------
// The set Z

ZFunction z_membership(const DiscreteField& phi, const BucklingSolution& sol, const ZTolerances& tol) {
  ZFunction z;
  z.field = phi;
  const BoundaryTrace tr = boundary_trace_normal_derivative(phi);
  z.flux = std::abs(tr.integral());
  z.flux_square = tr.integral_of_square();
  const double grad_phi = std::sqrt(std::max(0.0, sol.forms.B.energy(phi.coeffs)));
  const double grad_u = std::sqrt(sol.forms.B.energy(sol.u.coeffs));
  z.orthogonality = std::abs(sol.u.coeffs.dot(sol.forms.B.matrix * phi.coeffs));
  const double len = tr.length();
  const bool flux_zero = z.flux <= tol.zero * std::sqrt(len * z.flux_square);
  const bool orthogonal = z.orthogonality <= tol.zero * grad_phi * grad_u;
  const bool positive =
      grad_phi > 0 && (len / (2.0 * std::numbers::pi)) * z.flux_square / (grad_phi * grad_phi) > tol.positive;
  z.member = flux_zero && orthogonal && positive;
  return z;
}

std::optional<double> tilde_energy(const DiscreteField& phi, const BucklingSolution& sol,
                                   const EnergyFunctional& energy, const ZTolerances& tol) {
  const BoundaryTrace tr = boundary_trace_normal_derivative(phi);
  const double den = tr.integral_of_square();
  const double g = sol.forms.B.energy(phi.coeffs);
  if (!(g > 0) || (tr.length() / (2.0 * std::numbers::pi)) * den / g <= tol.positive) return std::nullopt;
  return energy.E(phi) / den;
}

std::vector<DiscreteField> z_samples(const BucklingSolution& sol, const DirichletSolution& dir, int count,
                                     std::uint32_t seed, const ZTolerances& tol) {
  const int m = static_cast<int>(dir.u.size());
  if (m < 2) throw std::invalid_argument("z_samples: need at least two Dirichlet modes");
  std::vector<double> flux(m), orth(m);
  for (int k = 0; k < m; ++k) {
    flux[k] = boundary_trace_normal_derivative(dir.u[k]).integral();
    orth[k] = sol.u.coeffs.dot(sol.forms.B.matrix * dir.u[k].coeffs);
  }
  const double flux_u = boundary_trace_normal_derivative(sol.u).integral();
  const double norm_u = sol.forms.B.energy(sol.u.coeffs);
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<DiscreteField> out;
  for (int attempts = 0; static_cast<int>(out.size()) < count; ++attempts) {
    if (attempts > 100 * count) throw std::runtime_error("z_samples: too many rejected draws");
    std::vector<double> a(m);
    for (int k = 1; k < m; ++k) a[k] = dist(gen);
    // beta = -sum a_k orth_k / |grad u|^2 removes the u-component; then mode 1
    // cancels the boundary flux.
    double num = 0.0;
    for (int k = 1; k < m; ++k) num += a[k] * (flux[k] - flux_u * orth[k] / norm_u);
    a[0] = -num / (flux[0] - flux_u * orth[0] / norm_u);
    double beta = 0.0;
    for (int k = 0; k < m; ++k) beta -= a[k] * orth[k] / norm_u;
    Vec c = beta * sol.u.coeffs;
    for (int k = 0; k < m; ++k) c += a[k] * dir.u[k].coeffs;
    DiscreteField phi = combine(sol.space, c, FieldKind::composite);
    if (z_membership(phi, sol, tol).member) out.push_back(std::move(phi));
  }
  return out;
}

// ---------------------------------------------------------------------------
// The test function psi

PsiResult build_psi(const BucklingSolution& sol, const DirichletSolution& dir, std::optional<double> forced_t) {
  if (dir.u.size() < 2) throw std::invalid_argument("build_psi: need the first two Dirichlet modes");
  const Vec q = basis_integrals(*sol.space);
  PsiResult r;
  r.lambda1 = dir.lambda[0];
  r.lambda2 = dir.lambda[1];
  r.mean_u1 = integral_of(q, dir.u[0]);
  r.mean_u2 = integral_of(q, dir.u[1]);
  r.grad_u_u1 = sol.u.coeffs.dot(sol.forms.B.matrix * dir.u[0].coeffs);
  r.grad_u_u2 = sol.u.coeffs.dot(sol.forms.B.matrix * dir.u[1].coeffs);
  if (forced_t) {
    r.t = *forced_t;
    r.forced = true;
  } else {
    r.t = r.lambda1 * r.mean_u1 / (r.lambda1 * r.mean_u1 - r.lambda2 * r.mean_u2);
  }
  if (!(r.t > 0.0 && r.t <= 1.0 + 1e-12)) {
    std::ostringstream os;
    os << "build_psi: t = " << r.t << " outside (0, 1] (int u1 = " << r.mean_u1 << ", int u2 = " << r.mean_u2 << ")";
    throw std::domain_error(os.str());
  }
  r.c = -((1.0 - r.t) * r.lambda1 * r.grad_u_u1 + r.t * r.lambda2 * r.grad_u_u2) / sol.lambda;
  r.psi = combine(sol.space, (1.0 - r.t) * dir.u[0].coeffs + r.t * dir.u[1].coeffs + r.c * sol.u.coeffs,
                  FieldKind::composite);
  return r;
}

PsiEnergy psi_energy_identity(const PsiResult& psi, const BucklingSolution& sol, const EnergyFunctional& energy,
                              int dimension) {
  PsiEnergy e;
  const double t = psi.t, l1 = psi.lambda1, l2 = psi.lambda2, L = sol.lambda;
  e.quadrature = energy.E(psi.psi);
  e.closed_form = (1 - t) * (1 - t) * l1 * (l1 - L) + t * t * l2 * (l2 - L);
  e.mean_term = (1 - t) * l1 * psi.mean_u1 + t * l2 * psi.mean_u2;
  const double c0 = critical_constant(L, volume(sol.space->curve()), dimension);
  e.expansion = e.closed_form - 2.0 * psi.c * c0 * e.mean_term;
  return e;
}

PayneResult payne_check(std::shared_ptr<const FeSpace> space, const PipelineOptions& options) {
  PayneResult r;
  r.lambda = solve_buckling(space, options).lambda;
  r.lambda2 = solve_dirichlet(space, 3, options).lambda[1];
  r.gap = r.lambda - r.lambda2;
  return r;
}

VariationReport second_variation_check(const BoundaryCurve& curve, const PerturbationField& field, double step,
                                       const SweepOptions& options) {
  VariationReport r;
  r.step = step;
  r.h = options.h;
  auto space = std::make_shared<const FeSpace>(triangulate(curve, options.h), curve);
  const BucklingSolution sol = solve_buckling(space, options.pipeline);
  r.formula = first_variation(sol, field);
  const ShapeDerivative sd = solve_shape_derivative(sol, field);
  const EnergyFunctional energy(sol, options.pipeline.dimension);
  r.second_formula = 2.0 * energy.E(sd.u_prime);
  const double lm = lambda_of_t(curve, field, -step, options);
  const double l0 = lambda_of_t(curve, field, 0.0, options);
  const double lp = lambda_of_t(curve, field, step, options);
  r.samples = {{-step, lm}, {0.0, l0}, {step, lp}};
  r.fd = (lp - lm) / (2.0 * step);
  r.second_fd = (lp - 2.0 * l0 + lm) / (step * step);
  return r;
}

}  // namespace buckle
