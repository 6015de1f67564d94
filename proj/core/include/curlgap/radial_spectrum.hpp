#pragma once

#include <utility>

#include "curlgap/spectrum_set.hpp"

namespace curlgap {

// W(r) = w0 on [0, delta), winf on [delta, inf). Construction validates the
// well condition w0 < winf and delta > 0; the single-eigenvalue window is
// checked separately (single_eigenvalue_condition) since analysis helpers
// such as matching_g are meaningful without it.
class StepRadialPotential {
 public:
  StepRadialPotential(double w0, double winf, double delta);

  double w0() const { return w0_; }
  double winf() const { return winf_; }
  double delta() const { return delta_; }

  double operator()(double r) const { return r < delta_ ? w0_ : winf_; }

  // (j1/delta)^2 < winf - w0 < (j2'/delta)^2
  bool single_eigenvalue_condition() const;

 private:
  double w0_;
  double winf_;
  double delta_;
};

struct EtaWindow {
  double eta_star;        // sqrt(j1^2 - j1'^2)
  double eta_star_upper;  // sqrt(j2'^2 - j1^2)
};

struct RadialDesign {
  double mu0;
  double winf;
  double eta;
  double xi;
  double delta;
  double w0;

  StepRadialPotential potential() const { return {w0, winf, delta}; }
};

EtaWindow eta_bounds();

// Unique xi in (j1', j1) with alpha(xi) = beta(eta); eta must lie in the window.
double xi_of_eta(double eta);

// delta = eta / sqrt(winf - mu0), w0 = mu0 - (xi(eta)/delta)^2.
RadialDesign design_radial(double mu0, double winf, double eta);

// g(mu) = alpha(sqrt(mu - w0) delta), h(mu) = beta(sqrt(winf - mu) delta),
// defined for w0 < mu < winf.
double matching_g(const StepRadialPotential& pot, double mu);
double matching_h(const StepRadialPotential& pot, double mu);

struct EigenvalueBracket {
  double lo;
  double hi;
};

// (w0 + (j1'/delta)^2 + eps, w0 + (j1/delta)^2] with eps = 1e-9 (winf - w0).
EigenvalueBracket eigenvalue_bracket(const StepRadialPotential& pot);

// The unique eigenvalue of the radial operator below winf. Throws NoRootError
// when the single-eigenvalue condition fails.
double radial_eigenvalue(const StepRadialPotential& pot);

// Same root, bisected on an explicit bracket to the given width.
double radial_eigenvalue(const StepRadialPotential& pot, EigenvalueBracket bracket, double width);

// Closed-form eigenfunction r^-1 J1(k r) inside, r^-1 K1(kappa r) outside,
// scaled so that u(delta) = 1 from both sides.
class RadialEigenfunction {
 public:
  RadialEigenfunction(const StepRadialPotential& pot, double mu0);

  double operator()(double r) const { return r < delta_ ? inner(r) : outer(r); }
  // Each branch is analytic on (0, inf); evaluating past delta is allowed.
  double inner(double r) const;
  double outer(double r) const;
  double inner_derivative(double r) const;
  double outer_derivative(double r) const;

  double delta() const { return delta_; }

 private:
  double delta_;
  double k_;
  double kappa_;
  double a_;
  double b_;
};

double radial_eigenfunction(const StepRadialPotential& pot, double mu0, double r);

// {mu0} union [winf, inf)
SpectrumSet radial_spectrum(const StepRadialPotential& pot);

}  // namespace curlgap
