#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "curlgap/field_tools.hpp"

namespace curlgap {

using RadialFunction = std::function<double(double rho)>;

struct ExactRadialOptions {
  std::vector<double> radii;  // algebraic check radii; default 400 points in (0, 10]
  std::vector<Vec3> points;   // curl check points; default 200 random points with 0.2 < |x| < 5
  double eps = 1e-4;          // central-difference step for the curl
  std::uint64_t seed = 11;
};

struct ExactRadialReport {
  double max_algebraic_residual = 0.0;  // max |V f - Gamma f^p|
  double algebraic_scale = 0.0;         // max |V f|
  double max_curl = 0.0;
  double curl_scale = 0.0;              // max Frobenius norm of the difference Jacobian
  std::size_t curl_points = 0;          // points used (sign changes within the stencil are skipped)
  double l2_integral = 0.0;             // int (V/Gamma)^{2/(p-1)} dx = ||U||_2^2
  double l2_error = 0.0;
  double nonlinear_integral = 0.0;      // int (V/Gamma)^{(p+1)/(p-1)} Gamma dx
  double nonlinear_error = 0.0;
  bool integrable = false;              // both quadratures finite and converged
};

struct ExactRadialSolution {
  std::function<Vec3(const Vec3&)> field;
  ExactRadialReport report;
};

// U(x) = s(|x|) f(|x|) x / |x| with f = (V/Gamma)^{1/(p-1)}, which solves
// curl curl U + V U = Gamma |U|^{p-1} U since curl U = 0 and V f = Gamma f^p.
// Throws DomainError if V/Gamma < 0 at a sampled radius.
ExactRadialSolution exact_radial_solution(const RadialFunction& V, const RadialFunction& Gamma, double p,
                                          const RadialFunction& sign_fn, ExactRadialOptions options = {});

}  // namespace curlgap
