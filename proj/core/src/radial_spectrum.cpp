#include "curlgap/radial_spectrum.hpp"

#include <cmath>
#include <string>

#include "curlgap/bessel.hpp"
#include "curlgap/errors.hpp"

namespace curlgap {
namespace {

const bessel::BesselZeroTable& zeros() { return bessel::BesselZeroTable::standard(); }

template <class F>
double bisect(F&& f, double lo, double hi, double width) {
  double flo = f(lo);
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

StepRadialPotential::StepRadialPotential(double w0, double winf, double delta)
    : w0_(w0), winf_(winf), delta_(delta) {
  if (!std::isfinite(w0) || !std::isfinite(winf) || !std::isfinite(delta)) {
    throw PreconditionError("StepRadialPotential: non-finite parameter");
  }
  if (!(delta > 0.0)) throw PreconditionError("StepRadialPotential: delta must be > 0");
  if (!(w0 < winf)) throw PreconditionError("StepRadialPotential: requires w0 < winf");
}

bool StepRadialPotential::single_eigenvalue_condition() const {
  const double j1 = zeros().j[0];
  const double j2p = zeros().jp[1];
  const double depth = winf_ - w0_;
  return (j1 / delta_) * (j1 / delta_) < depth && depth < (j2p / delta_) * (j2p / delta_);
}

EtaWindow eta_bounds() {
  const double j1 = zeros().j[0];
  const double j1p = zeros().jp[0];
  const double j2p = zeros().jp[1];
  return {std::sqrt(j1 * j1 - j1p * j1p), std::sqrt(j2p * j2p - j1 * j1)};
}

double xi_of_eta(double eta) {
  const auto window = eta_bounds();
  if (!(eta >= window.eta_star && eta <= window.eta_star_upper)) {
    throw PreconditionError("xi_of_eta: eta outside [eta_star, eta_star_upper]");
  }
  const double target = bessel::beta(eta);
  const double lo = zeros().jp[0] + 1e-9;
  const double hi = zeros().j[0];
  // alpha runs from -inf to 0 on (j1', j1]
  return bisect([target](double xi) { return bessel::alpha(xi) - target; }, lo, hi, 1e-13);
}

RadialDesign design_radial(double mu0, double winf, double eta) {
  if (!(winf > mu0)) throw PreconditionError("design_radial: requires winf > mu0");
  const double xi = xi_of_eta(eta);
  const double delta = eta / std::sqrt(winf - mu0);
  const double w0 = mu0 - (xi / delta) * (xi / delta);
  RadialDesign d{mu0, winf, eta, xi, delta, w0};
  if (!d.potential().single_eigenvalue_condition()) {
    throw PreconditionError("design_radial: single-eigenvalue condition failed");
  }
  return d;
}

double matching_g(const StepRadialPotential& pot, double mu) {
  if (!(mu > pot.w0() && mu < pot.winf())) throw DomainError("matching_g: mu outside (w0, winf)");
  return bessel::alpha(std::sqrt(mu - pot.w0()) * pot.delta());
}

double matching_h(const StepRadialPotential& pot, double mu) {
  if (!(mu > pot.w0() && mu < pot.winf())) throw DomainError("matching_h: mu outside (w0, winf)");
  return bessel::beta(std::sqrt(pot.winf() - mu) * pot.delta());
}

EigenvalueBracket eigenvalue_bracket(const StepRadialPotential& pot) {
  const double d2 = pot.delta() * pot.delta();
  const double eps = 1e-9 * (pot.winf() - pot.w0());
  return {pot.w0() + zeros().jp[0] * zeros().jp[0] / d2 + eps, pot.w0() + zeros().j[0] * zeros().j[0] / d2};
}

double radial_eigenvalue(const StepRadialPotential& pot, EigenvalueBracket bracket, double width) {
  if (!pot.single_eigenvalue_condition()) {
    throw NoRootError("radial_eigenvalue: single-eigenvalue condition (j1/delta)^2 < winf - w0 < (j2'/delta)^2 fails");
  }
  auto f = [&pot](double mu) { return matching_g(pot, mu) - matching_h(pot, mu); };
  const double flo = f(bracket.lo);
  const double fhi = f(bracket.hi);
  if ((flo < 0.0) == (fhi < 0.0)) throw NoRootError("radial_eigenvalue: no sign change of g - h in bracket");
  return bisect(f, bracket.lo, bracket.hi, width);
}

double radial_eigenvalue(const StepRadialPotential& pot) {
  if (!pot.single_eigenvalue_condition()) {
    throw NoRootError("radial_eigenvalue: single-eigenvalue condition (j1/delta)^2 < winf - w0 < (j2'/delta)^2 fails");
  }
  return radial_eigenvalue(pot, eigenvalue_bracket(pot), 0.0);
}

RadialEigenfunction::RadialEigenfunction(const StepRadialPotential& pot, double mu0) : delta_(pot.delta()) {
  const double mu = radial_eigenvalue(pot);
  if (std::abs(mu - mu0) > 1e-8 * std::max(1.0, std::abs(mu))) {
    throw PreconditionError("radial_eigenfunction: mu0 is not the eigenvalue of the potential");
  }
  k_ = std::sqrt(mu0 - pot.w0());
  kappa_ = std::sqrt(pot.winf() - mu0);
  a_ = delta_ / bessel::j1(k_ * delta_);
  b_ = delta_ / bessel::k1(kappa_ * delta_);
}

double RadialEigenfunction::inner(double r) const {
  if (r == 0.0) return a_ * k_ * 0.5;
  return a_ * bessel::j1(k_ * r) / r;
}

double RadialEigenfunction::outer(double r) const {
  // K1 underflows far out; the eigenfunction is zero to double precision there.
  if (kappa_ * r > bessel::kMaxKArgument) return 0.0;
  return b_ * bessel::k1(kappa_ * r) / r;
}

double RadialEigenfunction::inner_derivative(double r) const {
  return a_ * (k_ * bessel::j1_prime(k_ * r) / r - bessel::j1(k_ * r) / (r * r));
}

double RadialEigenfunction::outer_derivative(double r) const {
  if (kappa_ * r > bessel::kMaxKArgument) return 0.0;
  return b_ * (kappa_ * bessel::k1_prime(kappa_ * r) / r - bessel::k1(kappa_ * r) / (r * r));
}

double radial_eigenfunction(const StepRadialPotential& pot, double mu0, double r) {
  if (!(r > 0.0)) throw DomainError("radial_eigenfunction: r must be > 0");
  return RadialEigenfunction(pot, mu0)(r);
}

SpectrumSet radial_spectrum(const StepRadialPotential& pot) {
  const double mu0 = radial_eigenvalue(pot);
  return SpectrumSet({mu0}, {}, pot.winf());
}

}  // namespace curlgap
