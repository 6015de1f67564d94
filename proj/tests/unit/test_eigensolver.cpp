#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "curlgap/eigensolver.hpp"
#include "curlgap/errors.hpp"
#include "curlgap/spectrum_assembly.hpp"
#include "oracles.hpp"

using namespace curlgap;
namespace oc = curlgap::oracle;

namespace {

double step_w(double r) { return r < 1.5 ? -8.0 : 0.0; }
double cos_p(double z) { return 1.5 * std::cos(2.0 * std::numbers::pi * z); }

Sampler separable() {
  return [](double r, double z) { return step_w(r) + cos_p(z); };
}

std::vector<double> kronecker_oracle(const CylGrid& g, std::size_t count) {
  Eigen::VectorXd wr(static_cast<Eigen::Index>(g.nr()));
  for (std::size_t i = 0; i < g.nr(); ++i) wr[static_cast<Eigen::Index>(i)] = step_w(g.r(i));
  const auto radial = radial_tridiagonal(g.r_max(), g.nr(), wr);
  const auto axial = oc::axial_eigenvalues(g.z_half(), g.nz(), cos_p);
  std::vector<double> sums;
  for (std::size_t i = 0; i < std::min<std::size_t>(count, g.nr()); ++i) {
    for (Eigen::Index j = 0; j < std::min<Eigen::Index>(static_cast<Eigen::Index>(count), axial.size()); ++j) {
      sums.push_back(tridiagonal_eigenvalue(radial, i) + axial[j]);
    }
  }
  std::sort(sums.begin(), sums.end());
  sums.resize(count);
  return sums;
}

void expect_orthonormal(const std::vector<EigenPair>& pairs, double tol) {
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    for (std::size_t b = 0; b < pairs.size(); ++b) {
      EXPECT_NEAR(weighted_inner(pairs[a].vector, pairs[b].vector), a == b ? 1.0 : 0.0, tol);
    }
  }
}

}  // namespace

TEST(Eigensolver, DenseMatchesOracle) {
  const CylGrid g(4.0, 3.0, 16, 14);
  const auto op = assemble_L(g, separable());
  const auto pairs = eigs_lowest(op, 6);
  const auto ref = oc::dense_eigenvalues(op);
  ASSERT_EQ(pairs.size(), 6u);
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_NEAR(pairs[k].value, ref[static_cast<Eigen::Index>(k)], 1e-10);
    EXPECT_LE(pairs[k].residual, 1e-8);
    const Eigen::VectorXd r = op.apply(pairs[k].vector.values()) - pairs[k].value * pairs[k].vector.values();
    EXPECT_LE(weighted_norm(Field(g, r)), 1e-8);
    if (k > 0) EXPECT_LE(pairs[k - 1].value, pairs[k].value);
  }
  expect_orthonormal(pairs, 1e-10);
}

TEST(Eigensolver, IterativeMatchesDenseOnSmallProblem) {
  const CylGrid g(4.0, 3.0, 24, 20);
  const auto op = assemble_L(g, separable());
  EigenOptions opts;
  opts.dense_limit = 0;
  const auto pairs = eigs_lowest(op, 4, opts);
  const auto ref = oc::dense_eigenvalues(op);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(pairs[k].value, ref[static_cast<Eigen::Index>(k)], 1e-8 * std::max(1.0, std::abs(ref[static_cast<Eigen::Index>(k)])));
    EXPECT_LE(pairs[k].residual, opts.tol);
  }
  expect_orthonormal(pairs, 1e-10);
}

TEST(Eigensolver, IterativeMatchesKroneckerSum) {
  const CylGrid g(6.0, 4.0, 60, 64);
  const auto op = assemble_L(g, separable());
  const auto pairs = eigs_lowest(op, 6);
  const auto ref = kronecker_oracle(g, 6);
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_NEAR(pairs[k].value, ref[k], 1e-8 * std::max(1.0, std::abs(ref[k]))) << "k=" << k;
    EXPECT_LE(pairs[k].residual, 1e-8);
  }
  expect_orthonormal(pairs, 1e-10);
}

TEST(Eigensolver, DeterministicForFixedSeed) {
  const CylGrid g(5.0, 3.0, 40, 40);
  const auto op = assemble_L(g, separable());
  const auto a = eigs_lowest(op, 3);
  const auto b = eigs_lowest(op, 3);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(a[k].value, b[k].value);
    EXPECT_EQ(a[k].vector.values(), b[k].vector.values());
  }
}

TEST(Eigensolver, FreeOperatorPositive) {
  const CylGrid g(3.0, 3.0, 12, 12);
  for (const auto& p : eigs_lowest(assemble_L(g, [](double, double) { return 0.0; }), 5)) EXPECT_GT(p.value, 0.0);
}

TEST(Eigensolver, Errors) {
  const auto op = assemble_L(CylGrid(1.0, 1.0, 4, 4), [](double, double) { return 0.0; });
  EXPECT_THROW(eigs_lowest(op, 0), PreconditionError);
  EXPECT_THROW(eigs_lowest(op, 17), PreconditionError);
}

TEST(Eigensolver, InertiaCountMatchesDenseSpectrum) {
  const CylGrid g(4.0, 3.0, 16, 14);
  const auto op = assemble_L(g, separable());
  const auto ev = oc::dense_eigenvalues(op);
  for (double sigma : {-20.0, -6.0, -2.0, 0.0, 3.0, 10.0}) {
    EXPECT_EQ(count_eigenvalues_below(op, sigma), static_cast<std::size_t>((ev.array() < sigma).count())) << sigma;
  }
}

TEST(Eigensolver, RadialReductionMatchesMatchingEigenvalue) {
  const StepRadialPotential W(-12.0, 0.0, 1.2);
  ASSERT_TRUE(W.single_eigenvalue_condition());
  const double mu0 = radial_eigenvalue(W);
  const CylGrid g(12.0, 2.0, 400, 8);
  const auto op = assemble_L(g, [&](double r, double) { return W(r); });
  const double axial = oc::axial_eigenvalues(g.z_half(), g.nz(), [](double) { return 0.0; })[0];
  const double lowest = eigs_lowest(op, 1)[0].value - axial;
  Eigen::VectorXd wr(static_cast<Eigen::Index>(g.nr()));
  for (std::size_t i = 0; i < g.nr(); ++i) wr[static_cast<Eigen::Index>(i)] = W(g.r(i));
  EXPECT_NEAR(lowest, tridiagonal_eigenvalue(radial_tridiagonal(g.r_max(), g.nr(), wr), 0), 1e-8);
  EXPECT_NEAR(lowest, mu0, 2e-2 * std::abs(mu0));
}

TEST(Eigensolver, DesignedPotentialConvergesTowardBottomOfSpectrum) {
  const PiecewisePotential1D P({0.0, 0.5}, {0.0, 10.0});
  const double nu1 = band_edges(P, 1).edge(1);
  const auto d = design_potential(P, -nu1 + 1.0, 3.5, 0.5);
  const auto W = d.radial.potential();
  const double target = *d.spectrum.min();
  const Sampler V = [&](double r, double z) { return W(r) + P(z); };
  AssemblyOptions opts;
  opts.samples_r = 8;
  opts.samples_z = 8;
  double prev = 1e300;
  for (auto [rm, zh, h] : {std::tuple{6.0, 4.0, 0.1}, std::tuple{9.0, 6.0, 0.05}, std::tuple{12.0, 8.0, 0.025}}) {
    const CylGrid g(rm, zh, static_cast<std::size_t>(std::llround(rm / h)), static_cast<std::size_t>(std::llround(2 * zh / h)));
    EigenOptions eo;
    eo.tol = 1e-6;
    const double lam = eigs_lowest(assemble_L(g, V, opts), 1, eo)[0].value;
    const double err = std::abs(lam - target);
    EXPECT_LT(err, prev) << "r_max=" << rm << " lambda=" << lam << " target=" << target;
    prev = err;
  }
}
