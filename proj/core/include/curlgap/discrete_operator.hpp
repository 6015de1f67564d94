#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "curlgap/grid.hpp"
#include "curlgap/radial_spectrum.hpp"

namespace curlgap {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct AssemblyOptions {
  // Midpoint sub-samples per cell used to average V, r^3-weighted in r.
  // 1 means point sampling at the node.
  std::size_t samples_r = 1;
  std::size_t samples_z = 1;
};

// Flux-form discretization of L = -(1/r^3) d_r (r^3 d_r) - d_z^2 + V with a
// zero-flux r = 0 face and Dirichlet data at r_max and x3 = +-z_half.
//
// The operator is stored as a symmetric stiffness K_kin and a nodal potential:
//   A = W^{-1} K_kin + diag(V),   K = W A = K_kin + W diag(V),
// where W = diag(weights). A is self-adjoint in the weighted inner product.
class DiscreteOperator {
 public:
  DiscreteOperator(const CylGrid& grid, SparseMatrix stiffness, Eigen::VectorXd potential);

  const CylGrid& grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& potential() const { return potential_; }
  const SparseMatrix& stiffness() const { return stiffness_; }

  SparseMatrix matrix() const;          // A
  SparseMatrix symmetric_form() const;  // K
  // D^{-1/2} K D^{-1/2} with D = W; shares its spectrum with A.
  SparseMatrix symmetrized() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;            // A u
  Eigen::VectorXd apply_symmetric(const Eigen::VectorXd& u) const;  // K u
  double quadratic_form(const Eigen::VectorXd& u) const;            // u^T K u

  // Same stiffness with V replaced by V + c.
  DiscreteOperator shifted(double c) const;

 private:
  CylGrid grid_;
  SparseMatrix stiffness_;
  Eigen::VectorXd potential_;
  Eigen::VectorXd weights_;
};

DiscreteOperator assemble_L(const CylGrid& grid, const Sampler& V, const AssemblyOptions& options = {});

// Samples V at every node, averaging over cells when requested.
Eigen::VectorXd sample_potential(const CylGrid& grid, const Sampler& V, const AssemblyOptions& options = {});

// Symmetric tridiagonal matrix: diag[0..n), off[0..n-1).
struct Tridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;
};

// Radial part of the symmetrized operator on the cells of (0, r_max):
// M^{-1/2} K_r M^{-1/2} + diag(potential), with the stencil of assemble_L.
Tridiagonal radial_tridiagonal(double r_max, std::size_t nr, const Eigen::VectorXd& potential);

// One-dimensional radial operator -(1/r^3)(r^3 u')' + W(r) on (0, r_max) with
// Dirichlet data at r_max, W averaged over cells with r^3 weight.
Tridiagonal assemble_radial_1d(double r_max, std::size_t nr, const std::function<double(double)>& W,
                               std::size_t cell_samples = 1);

// Same operator for a step well, with the exact r^3-weighted cell averages
// of W (the cell containing delta gets the volume-weighted mix).
Tridiagonal assemble_radial_1d(double r_max, std::size_t nr, const StepRadialPotential& W);

// Exact r^3-weighted average of the step well over [a, b].
double step_cell_average(const StepRadialPotential& W, double a, double b);

// Number of eigenvalues strictly below x (Sturm sequence).
std::size_t sturm_count(const Tridiagonal& t, double x);

// k-th smallest eigenvalue (0-based) by bisection on the Sturm count.
double tridiagonal_eigenvalue(const Tridiagonal& t, std::size_t k);

}  // namespace curlgap
