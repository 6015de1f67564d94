#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "curlgap/errors.hpp"
#include "curlgap/spectrum_assembly.hpp"

using namespace curlgap;

namespace {

const PiecewisePotential1D kKronigPenney{{0.0, 0.5}, {0.0, 10.0}};

PotentialDesign reference_design() {
  const double nu1 = band_edges(kKronigPenney, 1).edge(1);
  return design_potential(kKronigPenney, -nu1 + 1.0, 3.5, 0.5);
}

}  // namespace

TEST(DesignPotential, KronigPenneyCertificate) {
  const auto d = reference_design();
  ASSERT_TRUE(d.certificate.chain.has_value());
  EXPECT_TRUE(d.certificate.chain->all_hold());
  EXPECT_FALSE(d.certificate.chain->first_failure().has_value());
  EXPECT_GT(d.certificate.margin, 0.0);
  EXPECT_FALSE(d.spectrum.contains(0.0));
  EXPECT_EQ(d.certificate.query_point, 0.0);

  const double nu1 = d.bands.edge(1), nu2 = d.bands.edge(2), nu3 = d.bands.edge(3);
  const auto& v = d.certificate.chain->values;
  EXPECT_EQ(v[0], -nu3);
  EXPECT_EQ(v[2], -nu2);
  EXPECT_EQ(v[3], -nu1);
  EXPECT_NEAR(d.radial.mu0, -nu3 + 0.5 * (nu3 - nu2), 1e-12);
  EXPECT_NEAR(d.radial.winf, -nu1 + 1.0, 1e-12);
}

TEST(DesignPotential, PositivityReport) {
  const auto d = reference_design();
  EXPECT_TRUE(d.positivity.esssup_V_positive);
  EXPECT_TRUE(d.positivity.nu1_below_esssup_P);
  EXPECT_EQ(d.positivity.esssup_P, 10.0);
  EXPECT_NEAR(d.positivity.esssup_V, d.radial.winf + 10.0, 1e-12);
  EXPECT_GT(d.positivity.esssup_V, 0.0);
  EXPECT_LT(d.positivity.nu1, 10.0);
}

TEST(Assemble, MatchesDisplayedFormula) {
  const auto d = reference_design();
  const double mu0 = radial_eigenvalue(d.radial.potential());
  const double tail = d.bands.edge(1) + d.radial.winf;
  ASSERT_TRUE(d.spectrum.tail().has_value());
  EXPECT_DOUBLE_EQ(*d.spectrum.tail(), std::min(tail, *d.spectrum.tail()));
  EXPECT_NEAR(*d.spectrum.tail(), tail, 1e-12);
  EXPECT_TRUE(d.spectrum.points().empty());
  for (std::size_t k = 0; k < d.spectrum.intervals().size(); ++k) {
    EXPECT_NEAR(d.spectrum.intervals()[k].lo, mu0 + d.bands.edge(2 * k + 1), 1e-12);
    EXPECT_NEAR(d.spectrum.intervals()[k].hi, mu0 + d.bands.edge(2 * k + 2), 1e-12);
  }
  for (std::size_t k = 1; k <= d.bands.band_count(); ++k) {
    const double lo = mu0 + d.bands.edge(2 * k - 1);
    const double hi = mu0 + d.bands.edge(2 * k);
    EXPECT_TRUE(d.spectrum.contains(lo));
    EXPECT_TRUE(d.spectrum.contains(hi));
    EXPECT_TRUE(d.spectrum.contains(0.5 * (lo + hi)));
  }
}

TEST(Assemble, EqualsMinkowskiSum) {
  const auto d = reference_design();
  const auto rad = radial_spectrum(d.radial.potential());
  const auto direct = assemble(rad, d.bands, d.radial.winf);
  const auto sum = minkowski_sum(rad, spectrum_1d(d.bands));
  EXPECT_EQ(direct, sum);
}

TEST(Assemble, MinimumIsMuZeroPlusNuOne) {
  const auto d = reference_design();
  EXPECT_NEAR(*d.spectrum.min(), d.radial.mu0 + d.bands.edge(1), 1e-8);
}

TEST(Assemble, Errors) {
  const auto bands = band_edges(kKronigPenney, 1);
  EXPECT_THROW(assemble(SpectrumSet::interval(0.0, 1.0), bands, 5.0), PreconditionError);
  EXPECT_THROW(assemble(SpectrumSet({-1.0, -0.5}, {}, 5.0), bands, 5.0), PreconditionError);
  EXPECT_THROW(assemble(SpectrumSet({-10.0}, {}, 100.0), bands, 100.0), TruncationError);
}

TEST(GapMargin, Examples) {
  const SpectrumSet s({}, {{-4.0, -2.0}}, 1.0);
  EXPECT_EQ(gap_margin(s, 0.0).margin, 1.0);
  EXPECT_EQ(gap_margin(s, -3.0).margin, 0.0);
  EXPECT_FALSE(gap_margin(s).chain.has_value());
}

TEST(GapMargin, MatchesDirectDistance) {
  const auto d = reference_design();
  double direct = std::abs(*d.spectrum.tail());
  for (const auto& iv : d.spectrum.intervals()) {
    direct = std::min(direct, iv.lo > 0.0 ? iv.lo : (iv.hi < 0.0 ? -iv.hi : 0.0));
  }
  EXPECT_NEAR(d.certificate.margin, direct, 1e-12);
  EXPECT_NEAR(d.certificate.margin, d.predicted_margin(), 1e-8);
  const double mu0 = d.radial.mu0;
  const double expected = std::min({-(mu0 + d.bands.edge(2)), mu0 + d.bands.edge(3), d.bands.edge(1) + d.radial.winf});
  EXPECT_NEAR(d.certificate.margin, expected, 1e-8);
}

TEST(GapMargin, PositiveIffOutside) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> x(-10.0, 10.0);
  const SpectrumSet s({-7.0, 3.0}, {{-4.0, -2.0}, {0.5, 1.0}}, 6.0);
  for (int k = 0; k < 2000; ++k) {
    const double t = x(rng);
    EXPECT_EQ(gap_margin(s, t).margin > 0.0, !s.contains(t));
  }
}

TEST(DesignPotential, NamedChainFailures) {
  const double nu1 = band_edges(kKronigPenney, 1).edge(1);
  try {
    design_potential(kKronigPenney, -nu1 - 0.5, 3.5, 0.5);
    FAIL() << "expected a chain violation";
  } catch (const ChainViolation& e) {
    EXPECT_EQ(e.inequality(), "-nu1 < W_inf");
  }
  EXPECT_THROW(design_potential(kKronigPenney, -nu1, 3.5, 0.5), ChainViolation);
  EXPECT_THROW(design_potential(kKronigPenney, -nu1 + 1.0, 3.5, 0.0), PreconditionError);
  EXPECT_THROW(design_potential(kKronigPenney, -nu1 + 1.0, 3.5, 1.0), PreconditionError);
  EXPECT_THROW(design_potential(PiecewisePotential1D::constant(0.0), 1.0, 3.5, 0.5), GapClosedError);
}

TEST(GapChain, EvaluatesEachInequality) {
  const auto c = GapChain::evaluate(1.0, 2.0, 3.0, -2.5, 0.0);
  EXPECT_TRUE(c.all_hold());
  const auto bad = GapChain::evaluate(1.0, 2.0, 3.0, -1.5, 0.0);
  EXPECT_FALSE(bad.holds[1]);
  EXPECT_EQ(bad.first_failure().value(), "mu0 < -nu2");
  const auto low = GapChain::evaluate(1.0, 2.0, 3.0, -3.5, 0.0);
  EXPECT_EQ(low.first_failure().value(), "-nu3 < mu0");
}

TEST(DesignPotential, RandomSuccessfulDesignsAreCertified) {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> value(-5.0, 25.0);
  std::uniform_real_distribution<double> split(0.2, 0.8);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  std::uniform_real_distribution<double> margin(0.1, 10.0);
  const auto w = eta_bounds();
  std::uniform_real_distribution<double> eta(w.eta_star, w.eta_star_upper);
  int successes = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const PiecewisePotential1D P({0.0, split(rng)}, {value(rng), value(rng)});
    if (P.is_constant()) continue;
    const double nu1 = band_edges(P, 1).edge(1);
    try {
      const auto d = design_potential(P, -nu1 + margin(rng), eta(rng), frac(rng));
      ++successes;
      EXPECT_GT(gap_margin(d.spectrum, 0.0).margin, 0.0);
      EXPECT_GT(d.positivity.esssup_V, 0.0);
      EXPECT_TRUE(d.positivity.nu1_below_esssup_P);
      EXPECT_NEAR(*d.spectrum.min(), d.radial.mu0 + nu1, 1e-8);
    } catch (const TruncationError&) {
    }
  }
  EXPECT_GE(successes, 20);
}
