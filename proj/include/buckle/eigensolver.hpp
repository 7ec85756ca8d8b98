#pragma once

#include "buckle/discretization.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace buckle {

struct EigenPair {
  double value = 0.0;
  Vec vector;             ///< B-normalized
  double residual = 0.0;  ///< |A x - mu B x| / |A x|
  int cluster = 0;        ///< equal ids mark numerically repeated eigenvalues
};

struct EigenOptions {
  double shift = 0.0;
  double tolerance = 1e-6;
  int max_iterations = 1000;
  std::uint32_t seed = 20240607u;
  /// relative distance below which neighbouring eigenvalues share a cluster
  double cluster_threshold = 1e-6;
};

struct EigenSolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The k smallest eigenpairs of A x = mu B x (A, B symmetric, B positive
/// definite) by shift-invert block subspace iteration with Rayleigh-Ritz
/// projection. Eigenvalues ascend; vectors are B-orthonormal. A failed
/// factorization is retried once with a perturbed shift; failure to reach the
/// tolerance raises EigenSolverError quoting the best residual.
std::vector<EigenPair> solve_smallest(const SpMat& A, const SpMat& B, int k, const EigenOptions& options = {});

/// (mu_2 - mu_1) / mu_1
double spectral_gap(const std::vector<EigenPair>& pairs);

/// Sparse LDL^T inertia test.
bool is_positive_definite(const SpMat& A);

}  // namespace buckle
