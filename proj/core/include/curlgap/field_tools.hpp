#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "curlgap/grid.hpp"

namespace curlgap {

using Vec3 = std::array<double, 3>;

struct HardyResult {
  double lhs;  // sum of u^2 / r^2 against r^3
  double rhs;  // discrete gradient energy (u_r^2 + u_z^2) against r^3
};

// Both sides of  int u^2/r^2 r^3 dr dx3 <= int (u_r^2 + u_x3^2) r^3 dr dx3,
// the right side being exactly the kinetic quadratic form of assemble_L.
HardyResult hardy_check(const Field& u);

// Bilinear interpolation of u at (r, x3). Between the outermost nodes and the
// boundary the profile decays linearly to the Dirichlet value 0; below the
// first radial node it is constant. Throws DomainError outside the cylinder.
double interpolate(const Field& u, double r, double x3);

// U(x) = u(r, x3) (-x2, x1, 0) at each point.
std::vector<Vec3> reconstruct_field(const Field& u, const std::vector<Vec3>& points);

struct DivergenceReport {
  double max_divergence;  // max |div U| by central differences
  double scale;           // max Frobenius norm of the difference Jacobian
  std::size_t points;     // points used
};

// Points whose stencil leaves the interpolation cell of the point are skipped:
// the bilinear profile is smooth only inside a cell.
DivergenceReport divergence_check(const Field& u, const std::vector<Vec3>& points, double eps = 1e-5);

struct CurlIdentityReport {
  double full_grad;      // int sum_ij (d_j U^i)^2
  double curl_plus_div;  // int |curl U|^2 + (div U)^2
  double mismatch;       // |full_grad - curl_plus_div| / full_grad (0 when both vanish)
  std::size_t points;    // Cartesian nodes used
};

// Evaluates both integrals by node quadrature on a Cartesian grid of the given
// spacing covering the support of u (extended by zero outside the cylinder),
// with the Jacobian of the reconstructed field taken by central differences
// of step 1e-6 at each node. The exact integrals agree, so the mismatch is
// the quadrature error of the grid.
CurlIdentityReport curl_identity_check(const Field& u, double spacing = 0.05);

}  // namespace curlgap
