#include "buckle/eigensolver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace buckle {

namespace {

using Dense = Eigen::MatrixXd;

Dense random_block(int n, int p, std::uint32_t seed) {
  std::mt19937 gen(seed);
  Dense x(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = 2.0 * (static_cast<double>(gen()) / 4294967295.0) - 1.0;
  return x;
}

}  // namespace

bool is_positive_definite(const SpMat& A) {
  Eigen::SimplicialLDLT<SpMat> ldlt(A);
  if (ldlt.info() != Eigen::Success) return false;
  return ldlt.vectorD().minCoeff() > 0.0;
}

std::vector<EigenPair> solve_smallest(const SpMat& A, const SpMat& B, int k, const EigenOptions& options) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || B.rows() != n || B.cols() != n) throw std::invalid_argument("solve_smallest: size mismatch");
  if (k < 1 || k > n) throw std::invalid_argument("solve_smallest: k out of range");
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("solve_smallest: tolerance must be positive");

  double shift = options.shift;
  Eigen::SimplicialLDLT<SpMat> solver;
  for (int attempt = 0; attempt < 2; ++attempt) {
    solver.compute(A - shift * B);
    if (solver.info() == Eigen::Success && (solver.vectorD().array() != 0.0).all()) break;
    if (attempt == 1) {
      std::ostringstream os;
      os << "solve_smallest: factorization of A - shift B failed (shift " << shift << ")";
      throw EigenSolverError(os.str());
    }
    shift -= 1e-3 * (std::abs(shift) + 1.0);
  }

  const int p = std::min(n, k + std::max(4, k));
  Dense x = random_block(n, p, options.seed);
  Eigen::VectorXd mu;
  double worst = 0.0, best = 1e300;
  int stalled = 0;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Dense bx = B * x;
    Dense y(n, p);
    for (int j = 0; j < p; ++j) y.col(j) = solver.solve(bx.col(j));
    // keep the block well conditioned before the projection
    Eigen::HouseholderQR<Dense> qr(y);
    y = qr.householderQ() * Dense::Identity(n, p);
    const Dense ay = A * y;
    const Dense by = B * y;
    Dense ap = y.transpose() * ay;
    Dense bp = y.transpose() * by;
    ap = 0.5 * (ap + ap.transpose()).eval();
    bp = 0.5 * (bp + bp.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Dense> ritz(ap, bp);
    if (ritz.info() != Eigen::Success) throw EigenSolverError("solve_smallest: Rayleigh-Ritz step failed");
    mu = ritz.eigenvalues();
    x = y * ritz.eigenvectors();
    const Dense ax = ay * ritz.eigenvectors();
    const Dense bxx = by * ritz.eigenvectors();
    worst = 0.0;
    for (int j = 0; j < k; ++j) {
      const double r = (ax.col(j) - mu[j] * bxx.col(j)).norm() / ax.col(j).norm();
      worst = std::max(worst, r);
    }
    if (worst <= options.tolerance) break;
    // the residual floor grows with the conditioning of A; stop when 30 sweeps
    // bring no 10% improvement
    if (worst < 0.9 * best) {
      best = worst;
      stalled = 0;
    } else {
      ++stalled;
    }
    if (it + 1 == options.max_iterations || stalled >= 30) {
      std::ostringstream os;
      os << "solve_smallest: no convergence after " << it + 1 << " iterations (residual " << worst
         << " above tolerance " << options.tolerance << ")";
      throw EigenSolverError(os.str());
    }
  }

  std::vector<EigenPair> out;
  for (int j = 0; j < k; ++j) {
    EigenPair e;
    e.value = mu[j];
    e.vector = x.col(j);
    e.vector /= std::sqrt(e.vector.dot(B * e.vector));
    const Vec ax = A * e.vector;
    e.residual = (ax - e.value * (B * e.vector)).norm() / ax.norm();
    out.push_back(std::move(e));
  }
  int cluster = 0;
  for (int j = 0; j < k; ++j) {
    if (j > 0 && std::abs(out[j].value - out[j - 1].value) >= options.cluster_threshold * std::abs(out[j].value))
      ++cluster;
    out[j].cluster = cluster;
  }
  return out;
}

double spectral_gap(const std::vector<EigenPair>& pairs) {
  if (pairs.size() < 2) throw std::invalid_argument("spectral_gap: need at least two pairs");
  return (pairs[1].value - pairs[0].value) / pairs[0].value;
}

}  // namespace buckle
