#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "curlgap/discrete_operator.hpp"
#include "curlgap/grid.hpp"

namespace curlgap {

struct EigenOptions {
  double tol = 1e-8;                 // residual bound ||A u - lambda u||_w for w-normalized u
  std::size_t max_iterations = 1000;  // LOBPCG iteration cap
  std::size_t dense_limit = 400;     // dense solver at or below this size
  std::size_t extra_vectors = 2;     // block size is k + extra_vectors
  double preconditioner_floor = 1.0;
  std::uint64_t seed = 20240607;
};

struct EigenPair {
  double value;
  Field vector;     // w-normalized
  double residual;  // ||A u - value u||_w
};

// k smallest eigenpairs of A in ascending order, eigenvectors w-orthonormal.
// Uses a dense solver for small problems and block LOBPCG with a separable
// sine-transform preconditioner otherwise. Throws ConvergenceError when the
// iteration cap is reached.
std::vector<EigenPair> eigs_lowest(const DiscreteOperator& op, std::size_t k, const EigenOptions& options = {});

// Number of eigenvalues of A strictly below sigma, from the inertia of the
// sparse LDL^T factorization of K - sigma W.
std::size_t count_eigenvalues_below(const DiscreteOperator& op, double sigma);

}  // namespace curlgap
