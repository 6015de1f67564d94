#include "curlgap/exact_radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "curlgap/errors.hpp"

namespace curlgap {
namespace {

double profile(const RadialFunction& V, const RadialFunction& Gamma, double p, double rho) {
  const double ratio = V(rho) / Gamma(rho);
  if (!(ratio >= 0.0)) throw DomainError("exact_radial_solution: V/Gamma < 0 (or undefined) at a sampled radius");
  return std::pow(ratio, 1.0 / (p - 1.0));
}

double sign_of(const RadialFunction& s, double rho) { return s(rho) < 0.0 ? -1.0 : 1.0; }

std::pair<double, double> radial_integral(const std::function<double(double)>& f) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-12, &err);
  return {4.0 * std::numbers::pi * v, 4.0 * std::numbers::pi * err};
}

}  // namespace

ExactRadialSolution exact_radial_solution(const RadialFunction& V, const RadialFunction& Gamma, double p,
                                          const RadialFunction& sign_fn, ExactRadialOptions options) {
  if (!(p > 1.0)) throw PreconditionError("exact_radial_solution: p must be > 1");
  if (options.radii.empty()) {
    for (int k = 1; k <= 400; ++k) options.radii.push_back(10.0 * k / 400.0);
  }
  if (options.points.empty()) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> cube(-5.0, 5.0);
    while (options.points.size() < 200) {
      const Vec3 x{cube(rng), cube(rng), cube(rng)};
      const double rho = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
      if (rho > 0.2 && rho < 5.0) options.points.push_back(x);
    }
  }

  ExactRadialSolution sol;
  sol.field = [V, Gamma, p, sign_fn](const Vec3& x) -> Vec3 {
    const double rho = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (rho == 0.0) throw DomainError("exact_radial_solution: field undefined at the origin");
    const double a = sign_of(sign_fn, rho) * profile(V, Gamma, p, rho) / rho;
    return {a * x[0], a * x[1], a * x[2]};
  };

  auto& rep = sol.report;
  for (double rho : options.radii) {
    const double f = profile(V, Gamma, p, rho);
    const double v = V(rho);
    const double g = Gamma(rho);
    rep.max_algebraic_residual = std::max(rep.max_algebraic_residual, std::abs(v * f - g * std::pow(f, p)));
    rep.algebraic_scale = std::max(rep.algebraic_scale, std::abs(v * f));
  }

  const double h = options.eps;
  const double reach = 2.0 * std::sqrt(3.0) * h;
  for (const auto& x : options.points) {
    const double rho = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (!(rho > reach)) continue;
    const double s0 = sign_of(sign_fn, rho);
    if (sign_of(sign_fn, rho - reach) != s0 || sign_of(sign_fn, rho + reach) != s0) continue;
    double jac[3][3];
    for (int d = 0; d < 3; ++d) {
      Vec3 a = x;
      Vec3 b = x;
      a[d] += h;
      b[d] -= h;
      const Vec3 ua = sol.field(a);
      const Vec3 ub = sol.field(b);
      for (int c = 0; c < 3; ++c) jac[c][d] = (ua[c] - ub[c]) / (2.0 * h);
    }
    const double c1 = jac[2][1] - jac[1][2];
    const double c2 = jac[0][2] - jac[2][0];
    const double c3 = jac[1][0] - jac[0][1];
    double frob = 0.0;
    for (auto& row : jac) {
      for (double v : row) frob += v * v;
    }
    rep.max_curl = std::max(rep.max_curl, std::sqrt(c1 * c1 + c2 * c2 + c3 * c3));
    rep.curl_scale = std::max(rep.curl_scale, std::sqrt(frob));
    ++rep.curl_points;
  }

  const auto l2 = radial_integral([&](double rho) {
    if (rho == 0.0) return 0.0;
    return rho * rho * std::pow(profile(V, Gamma, p, rho), 2.0);
  });
  const auto nl = radial_integral([&](double rho) {
    if (rho == 0.0) return 0.0;
    return rho * rho * std::pow(profile(V, Gamma, p, rho), p + 1.0) * Gamma(rho);
  });
  rep.l2_integral = l2.first;
  rep.l2_error = l2.second;
  rep.nonlinear_integral = nl.first;
  rep.nonlinear_error = nl.second;
  rep.integrable = std::isfinite(l2.first) && std::isfinite(nl.first) && l2.second <= 1e-6 * std::max(1.0, std::abs(l2.first)) &&
                   nl.second <= 1e-6 * std::max(1.0, std::abs(nl.first));
  return sol;
}

}  // namespace curlgap
