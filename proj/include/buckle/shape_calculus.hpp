#pragma once

#include "buckle/eigensolver.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace buckle {

/// A mathematical precondition of an operation does not hold (criticality,
/// spectral gap); the operation refuses instead of returning a meaningless
/// result.
struct GateRefusal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PipelineOptions {
  double penalty = 20.0;
  EigenOptions buckling_solver{};
  EigenOptions dirichlet_solver{0.0, 1e-10};
  int dimension = 2;
};

/// First buckling eigenpair, scaled to int |grad u|^2 = 1 with positive mean
/// boundary trace of Delta u, plus the second eigenvalue for the gap test.
struct BucklingSolution {
  std::shared_ptr<const FeSpace> space;
  BucklingForms forms;
  double penalty = 20.0;
  double lambda = 0.0;
  double second = 0.0;
  double residual = 0.0;
  DiscreteField u;
};

BucklingSolution solve_buckling(std::shared_ptr<const FeSpace> space, const PipelineOptions& options = {});

/// Dirichlet eigenpairs scaled to int u^2 = 1. u_1 has positive mean; inside a
/// cluster the basis is rotated so that the first member has int u dx = 0 when
/// the cluster is degenerate, and every other mode has int u dx <= 0.
struct DirichletSolution {
  std::shared_ptr<const FeSpace> space;
  LaplaceForms forms;
  std::vector<double> lambda;
  std::vector<int> cluster;
  std::vector<DiscreteField> u;
};

DirichletSolution solve_dirichlet(std::shared_ptr<const FeSpace> space, int count,
                                  const PipelineOptions& options = {});

/// int_Omega phi dx for every basis function.
Vec basis_integrals(const FeSpace& space);

/// c0 = sqrt(2 Lambda / (n |Omega|)).
double critical_constant(double lambda, double area, int dimension = 2);

struct CriticalityReport {
  double lambda = 0.0;
  double c0 = 0.0;
  double trace_mean = 0.0;
  double trace_max_deviation = 0.0;  ///< relative to the mean
  double w_residual = 0.0;           ///< max |Delta u + Lambda u - c0| on the sample grid
  double rel_value = 0.0;            ///< (1/2) oint |Delta u|^2 x . nu dS
  int samples = 0;

  bool critical(double threshold = 0.05) const { return trace_max_deviation <= threshold; }
};

CriticalityReport criticality_report(const BucklingSolution& sol, int dimension = 2);

/// -oint |Delta u|^2 (v . nu) dS
double first_variation(const BucklingSolution& sol, const PerturbationField& field);

/// Mesh options and refinement used for each domain of a t-sweep.
struct SweepOptions {
  double h = 0.05;
  PipelineOptions pipeline{};
};

/// Smallest discrete buckling eigenvalue of the mapped domain Omega_t, meshed
/// from scratch at size h.
double lambda_of_t(const BoundaryCurve& curve, const PerturbationField& field, double t,
                   const SweepOptions& options = {});

struct VariationReport {
  double formula = 0.0;      ///< first variation from the boundary formula
  double fd = 0.0;           ///< centered difference of Lambda(t)
  double second_formula = 0.0;  ///< 2 E(u')
  double second_fd = 0.0;       ///< second difference of Lambda(t)
  double step = 0.0;
  double h = 0.0;
  std::vector<std::pair<double, double>> samples;  ///< (t, Lambda(t))

  double first_discrepancy() const;   ///< |formula - fd| / |fd| (absolute when |fd| is tiny)
  double second_discrepancy() const;  ///< |second_formula - second_fd| / |second_fd|
};

/// The first-variation formula on a mesh of the base domain at size
/// options.h, against (Lambda(h_t) - Lambda(-h_t)) / (2 h_t).
VariationReport fd_first_variation_check(const BoundaryCurve& curve, const PerturbationField& field, double step,
                                         const SweepOptions& options = {});

struct ShapeDerivative {
  DiscreteField u_prime;
  double multiplier = 0.0;
  double c0 = 0.0;
  double constraint = 0.0;         ///< int grad u . grad u'
  double neumann_residual = 0.0;   ///< relative L2 error of d_nu u' + c0 v . nu
};

struct ShapeDerivativeOptions {
  double criticality_threshold = 0.05;
  double gap_threshold = 1e-3;
  int dimension = 2;
};

/// Solves the shape-derivative problem with the weakly imposed datum
/// d_nu u' = -c0 v . nu and the constraint int grad u . grad u' = 0, through
/// the bordered system [A - Lambda B, B u; (B u)^T, 0]. Throws GateRefusal on
/// non-critical domains or a small spectral gap.
ShapeDerivative solve_shape_derivative(const BucklingSolution& sol, const PerturbationField& field,
                                       const ShapeDerivativeOptions& options = {});

/// Discrete forms for the quadratic functional
/// E(phi) = int |Delta phi|^2 - Lambda int |grad phi|^2.
/// Fields vanish on the boundary but their normal derivatives do not, so the
/// interior-penalty forms here carry interior-edge terms only.
class EnergyFunctional {
 public:
  explicit EnergyFunctional(const BucklingSolution& sol, int dimension = 2);

  /// Laplacian representation.
  double E(const DiscreteField& phi) const;
  /// Hessian representation plus (n - 1) oint (d_nu phi)^2 H dS.
  double E2(const DiscreteField& phi) const;
  /// broken int |Delta phi|^2 with interior jump terms; the relative scale of E
  double laplacian_energy(const DiscreteField& phi) const;
  double curvature_term(const DiscreteField& phi) const;
  double gradient_energy(const DiscreteField& phi) const { return B_.energy(phi.coeffs); }
  double lambda() const { return lambda_; }

 private:
  SparseSymmetricForm laplacian_;
  SparseSymmetricForm hessian_;
  SparseSymmetricForm B_;
  double lambda_;
  int dimension_;
};

struct ZFunction {
  DiscreteField field;
  double flux = 0.0;         ///< |oint d_nu phi dS|
  double flux_square = 0.0;  ///< oint (d_nu phi)^2 dS
  double orthogonality = 0.0;  ///< |int grad u . grad phi dx|
  bool member = false;
};

struct ZTolerances {
  /// zero conditions, relative to sqrt(|dOmega| oint (d_nu phi)^2) and |grad phi|
  double zero = 1e-8;
  /// positivity: L oint (d_nu phi)^2 / int |grad phi|^2 with L = |dOmega| / (2 pi)
  double positive = 1e-3;
};

ZFunction z_membership(const DiscreteField& phi, const BucklingSolution& sol, const ZTolerances& tol = {});

/// E(phi) / oint (d_nu phi)^2 dS; nullopt when the denominator fails the
/// positivity test of z_membership.
std::optional<double> tilde_energy(const DiscreteField& phi, const BucklingSolution& sol,
                                   const EnergyFunctional& energy, const ZTolerances& tol = {});

/// Random elements of Z built from the first Dirichlet modes and u: random
/// coefficients for modes 2.., then the coefficients of mode 1 and of u solve
/// oint d_nu phi dS = 0 and int grad u . grad phi dx = 0. Samples failing the
/// positivity test are redrawn.
std::vector<DiscreteField> z_samples(const BucklingSolution& sol, const DirichletSolution& dir, int count,
                                     std::uint32_t seed, const ZTolerances& tol = {});

struct PsiResult {
  double t = 0.0;
  double c = 0.0;
  bool forced = false;
  double mean_u1 = 0.0;       ///< int u_1
  double mean_u2 = 0.0;       ///< int u_2
  double grad_u_u1 = 0.0;     ///< int grad u . grad u_1
  double grad_u_u2 = 0.0;     ///< int grad u . grad u_2
  double lambda1 = 0.0, lambda2 = 0.0;
  DiscreteField psi;
};

/// t from int (1-t) lambda_1 u_1 + t lambda_2 u_2 = 0 (or the forced value),
/// c = -(1/Lambda) int (1-t) lambda_1 grad u . grad u_1 + t lambda_2 grad u . grad u_2,
/// psi = (1-t) u_1 + t u_2 + c u. Throws std::domain_error when t leaves (0, 1].
PsiResult build_psi(const BucklingSolution& sol, const DirichletSolution& dir,
                    std::optional<double> forced_t = std::nullopt);

struct PsiEnergy {
  double quadrature = 0.0;   ///< E(psi) from the discrete forms
  double closed_form = 0.0;  ///< (1-t)^2 l1 (l1 - L) + t^2 l2 (l2 - L)
  /// closed_form - 2 c c0 int (1-t) l1 u1 + t l2 u2: the full expansion of
  /// E(psi), whose last term vanishes only when t solves the mean-value equation
  double expansion = 0.0;
  double mean_term = 0.0;    ///< int (1-t) l1 u1 + t l2 u2
};

PsiEnergy psi_energy_identity(const PsiResult& psi, const BucklingSolution& sol, const EnergyFunctional& energy,
                              int dimension = 2);

struct PayneResult {
  double lambda = 0.0;   ///< buckling
  double lambda2 = 0.0;  ///< second Dirichlet
  double gap = 0.0;      ///< lambda - lambda2
};

PayneResult payne_check(std::shared_ptr<const FeSpace> space, const PipelineOptions& options = {});

/// 2 E(u') on the base domain against the second difference
/// (Lambda(h_t) - 2 Lambda(0) + Lambda(-h_t)) / h_t^2; both first-order
/// entries are filled as well.
VariationReport second_variation_check(const BoundaryCurve& curve, const PerturbationField& field, double step,
                                       const SweepOptions& options = {});

}  // namespace buckle
