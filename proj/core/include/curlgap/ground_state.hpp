#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "curlgap/discrete_operator.hpp"
#include "curlgap/eigensolver.hpp"
#include "curlgap/grid.hpp"
#include "curlgap/spectrum_set.hpp"

namespace curlgap {

enum class Mode { defocusing, focusing };

struct Problem {
  CylGrid grid;
  Sampler V;
  Sampler Gamma;
  double p = 3.0;
  Mode mode = Mode::focusing;
  // Certified spectrum of L; focusing mode requires 0 to lie in a gap of it.
  std::optional<SpectrumSet> spectrum;
  AssemblyOptions assembly;
};

// Throws PreconditionError when the mode hypotheses fail on the grid:
//   defocusing: Gamma < 0 at every node and max V < 0;
//   focusing:   1 < p < 5, min Gamma > 0, and a spectrum with margin > 0 at 0.
void validate(const Problem& prob);

// Sampled data of a problem: the operator and c = Gamma r^{p-1} at each node.
struct DiscreteProblem {
  DiscreteOperator op;
  Eigen::VectorXd gamma;
  Eigen::VectorXd coeff;
  double p;

  explicit DiscreteProblem(const Problem& prob);

  const CylGrid& grid() const { return op.grid(); }
  // J = 2 pi [ u^T K u / 2 - sum w c |u|^{p+1} / (p+1) ]
  double energy(const Eigen::VectorXd& u) const;
  double quadratic_energy(const Eigen::VectorXd& u) const;  // 2 pi u^T K u / 2
  // 2 pi sum w c |u|^{p+1}, the integral of Gamma |U|^{p+1} over R^3
  double nonlinear_integral(const Eigen::VectorXd& u) const;
  // Weighted gradient g = 2 pi (A u - c |u|^{p-1} u): dJ[h] = <g, h>_w.
  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const;
  // max(1, 2 pi || c |u|^{p-1} u ||_w), the size of the nonlinear force.
  double residual_scale(const Eigen::VectorXd& u) const;
  double weighted_norm(const Eigen::VectorXd& u) const;
  double weighted_dot(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
};

double energy(const Problem& prob, const Field& u);
Field el_gradient(const Problem& prob, const Field& u);

struct SolverOptions {
  double tol_inner = 1e-10;
  double tol_outer = 1e-8;
  std::size_t max_iterations = 4000;
  std::size_t inner_max_iterations = 200;
  std::size_t random_starts = 8;
  std::uint64_t seed = 1;
  std::size_t k_neg_max = 64;
  double nontrivial_threshold = 1e-6;
  EigenOptions eigen;
};

struct GroundStateResult {
  explicit GroundStateResult(Field field) : u(std::move(field)) {}

  Field u;
  double energy = 0.0;
  double el_residual = 0.0;   // ||g||_w
  double scale = 1.0;         // residual_scale at u
  std::array<double, 2> nehari_residuals{};  // J'[u]u, max_i |J'[u] e_i|
  double nehari_identity = 0.0;  // (p-1)/(2(p+1)) int Gamma |U|^{p+1}
  bool nontrivial = false;
  std::size_t iterations = 0;
  std::size_t starts = 0;
  std::vector<double> start_energies;  // ascending, converged starts only
};

// u = s t b(t r, t x3) with b(r, x3) = exp(-(r^2 + x3^2)): the scalar profile
// of s B(t x) for the bump field B.
Field scaled_seed(const CylGrid& grid, double s, double t);

// First seed along t = 1, 1/2, ... then s = 1, 1/2, ... with J < 0. Throws
// PreconditionError when none exists on the truncated domain.
Field defocusing_seed(const DiscreteProblem& dp);

// Damped Newton descent on J from defocusing_seed, with metric given by the
// regularized Hessian and Armijo backtracking; stops when
// ||g||_w <= tol_outer max(1, |J|).
GroundStateResult solve_defocusing(const Problem& prob, const SolverOptions& options = {});

struct SpectralSplit {
  std::vector<Field> basis;         // eigenvectors with negative eigenvalue, w-orthonormal
  std::vector<double> eigenvalues;  // ascending
  double shift = 0.0;               // smallest nonnegative eigenvalue
  std::optional<Field> lowest_positive;

  Eigen::MatrixXd basis_matrix() const;
};

// Throws PreconditionError if more than k_neg_max eigenvalues are negative or
// an eigenvalue lies within 1e-8 of 0.
SpectralSplit spectral_split(const DiscreteProblem& dp, std::size_t k_neg_max = 64, const EigenOptions& eigen = {});
SpectralSplit spectral_split(const Problem& prob, std::size_t k_neg_max = 64, const EigenOptions& eigen = {});

struct NehariPoint {
  explicit NehariPoint(Field field) : u(std::move(field)) {}

  Field u;
  double t = 0.0;
  Eigen::VectorXd c;  // coefficients along the H^- basis
  double energy = 0.0;
  double derivative_along_u = 0.0;  // J'[u]u
  double max_derivative_minus = 0.0;  // max_i |J'[u] e_i|
  double scale = 1.0;
  std::size_t iterations = 0;
};

// Maximizer of J over { t w + v : t > 0, v in H^- }. `w_plus` must be
// w-orthogonal to the basis. Warm starts are optional.
NehariPoint nehari_project(const DiscreteProblem& dp, const SpectralSplit& split, const Field& w_plus,
                           const SolverOptions& options = {}, std::optional<double> t0 = std::nullopt,
                           const Eigen::VectorXd* c0 = nullptr);

// Hessian of J restricted to span{u} + H^- at a Nehari point, in the
// coordinates (t, c); negative definite at a proper maximizer.
Eigen::MatrixXd nehari_hessian(const DiscreteProblem& dp, const SpectralSplit& split, const NehariPoint& pt);

// Minimizes w -> J[nehari_project(w)] on the unit w-sphere of H^+ by
// preconditioned nonlinear conjugate gradients, from the lowest positive
// eigenvector and `random_starts` random bumps.
GroundStateResult solve_focusing(const Problem& prob, const SolverOptions& options = {});

}  // namespace curlgap
