#include "curlgap/spectrum_assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curlgap/errors.hpp"

namespace curlgap {

GapChain GapChain::evaluate(double nu1, double nu2, double nu3, double mu0, double winf) {
  GapChain c;
  c.values = {-nu3, mu0, -nu2, -nu1, winf};
  for (std::size_t k = 0; k < 4; ++k) c.holds[k] = c.values[k] < c.values[k + 1];
  return c;
}

std::optional<std::string> GapChain::first_failure() const {
  for (std::size_t k = 0; k < 4; ++k) {
    if (!holds[k]) return std::string(kNames[k]);
  }
  return std::nullopt;
}

SpectrumSet assemble(const SpectrumSet& radial, const BandStructure& periodic, double winf) {
  if (radial.points().size() != 1 || !radial.intervals().empty() || !radial.tail()) {
    throw PreconditionError("assemble: radial spectrum must be {mu0} union [winf, inf)");
  }
  const double mu0 = radial.points().front();
  const double nu1 = periodic.edges().front();
  const double tail = nu1 + winf;
  if (mu0 + periodic.edges().back() < tail) {
    throw TruncationError("assemble: bands beyond the computed ones may lie below nu1 + winf; request more bands");
  }
  std::vector<Interval> ivs;
  for (const auto& band : periodic.bands()) ivs.push_back({mu0 + band.lo, mu0 + band.hi});
  return SpectrumSet({}, std::move(ivs), tail);
}

GapCertificate gap_margin(const SpectrumSet& s, double x) {
  GapCertificate cert;
  cert.query_point = x;
  cert.margin = s.distance(x);
  return cert;
}

double PotentialDesign::predicted_margin() const {
  const double nu1 = bands.edge(1);
  const double nu2 = bands.edge(2);
  const double nu3 = bands.edge(3);
  const double mu0 = radial.mu0;
  // Spectrum near zero: band 1 image ends at mu0 + nu2 < 0; the next
  // component above 0 is either band 2's image or the tail.
  const double above = std::min(mu0 + nu3, nu1 + radial.winf);
  return std::min(-(mu0 + nu2), above);
}

PotentialDesign design_potential(const PiecewisePotential1D& P, double winf, double eta, double mu0_fraction,
                                 std::size_t band_count) {
  if (!(mu0_fraction > 0.0 && mu0_fraction < 1.0)) {
    throw PreconditionError("design_potential: mu0_fraction must lie in (0, 1)");
  }
  auto bands = band_edges(P, std::max<std::size_t>(band_count, 2));
  const auto gap = first_gap(bands);
  const double nu1 = bands.edge(1);
  const double mu0 = -gap.nu3 + mu0_fraction * (gap.nu3 - gap.nu2);

  const auto chain = GapChain::evaluate(nu1, gap.nu2, gap.nu3, mu0, winf);
  if (auto failing = chain.first_failure()) {
    throw ChainViolation(*failing, "design_potential: chain inequality " + *failing + " fails");
  }

  const auto radial = design_radial(mu0, winf, eta);
  const auto rad_spec = radial_spectrum(radial.potential());
  auto spectrum = assemble(rad_spec, bands, winf);

  auto cert = gap_margin(spectrum, 0.0);
  cert.chain = chain;

  PositivityReport pos{};
  pos.esssup_P = P.max();
  pos.esssup_V = winf + P.max();
  pos.nu1 = nu1;
  pos.esssup_V_positive = pos.esssup_V > 0.0;
  pos.nu1_below_esssup_P = nu1 < P.max();

  return PotentialDesign{P, std::move(bands), radial, std::move(spectrum), cert, pos};
}

}  // namespace curlgap
