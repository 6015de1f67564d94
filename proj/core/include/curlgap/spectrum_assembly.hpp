#pragma once

#include <array>
#include <optional>
#include <string>

#include "curlgap/periodic_spectrum.hpp"
#include "curlgap/radial_spectrum.hpp"
#include "curlgap/spectrum_set.hpp"

namespace curlgap {

// The ordered values (-nu3, mu0, -nu2, -nu1, winf) and whether each of the
// four strict inequalities between neighbours holds.
struct GapChain {
  std::array<double, 5> values{};
  std::array<bool, 4> holds{};

  static constexpr std::array<const char*, 4> kNames = {"-nu3 < mu0", "mu0 < -nu2", "-nu2 < -nu1", "-nu1 < W_inf"};

  static GapChain evaluate(double nu1, double nu2, double nu3, double mu0, double winf);
  bool all_hold() const { return holds[0] && holds[1] && holds[2] && holds[3]; }
  // Name of the first failing inequality, if any.
  std::optional<std::string> first_failure() const;
};

struct GapCertificate {
  double query_point = 0.0;
  double margin = 0.0;  // distance from query_point to the spectrum
  std::optional<GapChain> chain;
};

// mu0 + bands of the periodic part, together with [nu1 + winf, inf).
// `radial` must hold exactly one isolated point and a tail. Throws
// TruncationError if bands above the computed ones might fall below the tail.
SpectrumSet assemble(const SpectrumSet& radial, const BandStructure& periodic, double winf);

GapCertificate gap_margin(const SpectrumSet& s, double x = 0.0);

struct PositivityReport {
  double esssup_V;  // winf + max P
  double esssup_P;
  double nu1;
  bool esssup_V_positive;
  bool nu1_below_esssup_P;
};

struct PotentialDesign {
  PiecewisePotential1D periodic;
  BandStructure bands;
  RadialDesign radial;
  SpectrumSet spectrum;
  GapCertificate certificate;
  PositivityReport positivity;

  // margin predicted directly from the chain values, independent of gap_margin
  double predicted_margin() const;
};

// Places mu0 = -nu3 + mu0_fraction (nu3 - nu2) and designs the radial well
// around it. Throws ChainViolation naming the failing inequality.
PotentialDesign design_potential(const PiecewisePotential1D& P, double winf, double eta, double mu0_fraction,
                                 std::size_t band_count = kDefaultBandCount);

}  // namespace curlgap
