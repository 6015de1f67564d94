#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "curlgap/errors.hpp"
#include "curlgap/ground_state.hpp"
#include "curlgap/spectrum_assembly.hpp"
#include "oracles.hpp"

using namespace curlgap;
namespace oc = curlgap::oracle;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double one(double, double) { return 1.0; }

Problem smooth_problem(const CylGrid& g, Mode mode) {
  Problem pr{g, [](double, double z) { return 1.0 + 0.5 * std::sin(z); }, [](double r, double) { return 1.0 + 0.2 * r; },
             3.0, mode, SpectrumSet::half_line(0.5), {}};
  if (mode == Mode::defocusing) {
    pr.V = [](double, double z) { return -1.0 - 0.5 * std::sin(z) * std::sin(z); };
    pr.Gamma = [](double r, double) { return -(1.0 + 0.2 * r); };
  }
  return pr;
}

Problem unit_focusing(std::size_t n) {
  return {CylGrid(12.0, 12.0, n, n), one, one, 3.0, Mode::focusing, SpectrumSet::half_line(1.0), {}};
}

Problem defocusing_problem() {
  return {CylGrid(12.0, 12.0, 64, 64),
          [](double, double) { return -1.0; },
          [](double r, double z) { return -std::pow(1.0 + std::hypot(r, z), 3.0); },
          2.0,
          Mode::defocusing,
          std::nullopt,
          {}};
}

struct Designed {
  PiecewisePotential1D P{{0.0, 0.5}, {0.0, 10.0}};
  PotentialDesign cert;
  StepRadialPotential W;
  Designed()
      : cert(design_potential(P, -band_edges(P, 1).edge(1) + 1.0, 3.5, 0.5)), W(cert.radial.potential()) {}
  Problem problem(std::size_t n) const {
    return {CylGrid(8.0, 8.0, n, n), [this](double r, double z) { return W(r) + P(z); }, one, 3.0, Mode::focusing,
            cert.spectrum, {}};
  }
};

Eigen::VectorXd random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST(Energy, ZeroAndQuadraticPart) {
  const DiscreteProblem dp(smooth_problem(CylGrid(4.0, 4.0, 20, 20), Mode::focusing));
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(400);
  EXPECT_EQ(dp.energy(zero), 0.0);
  EXPECT_EQ(dp.gradient(zero).norm(), 0.0);
  const Eigen::VectorXd u = random_vector(400, 3) * 0.1;
  EXPECT_NEAR(dp.quadratic_energy(u), 0.5 * kTwoPi * dp.op.quadratic_form(u), 1e-12 * dp.quadratic_energy(u));
  EXPECT_NEAR(dp.energy(u), dp.quadratic_energy(u) - dp.nonlinear_integral(u) / (dp.p + 1.0),
              1e-12 * std::abs(dp.quadratic_energy(u)));
}

TEST(Energy, MatchesMonteCarloIntegral) {
  const auto pr = smooth_problem(CylGrid(4.0, 4.0, 128, 128), Mode::focusing);
  const oc::Profile u = [](double r, double z) { return std::exp(-(r * r + z * z)); };
  const Field f(pr.grid, u);
  const DiscreteProblem dp(pr);
  const auto mc = oc::monte_carlo_energy(u, pr.V, pr.Gamma, pr.p, 4.0, 4.0, 1'000'000, 42);
  EXPECT_NEAR(dp.quadratic_energy(f.values()), mc.quadratic, 1e-2 * mc.quadratic);
  EXPECT_NEAR(dp.nonlinear_integral(f.values()) / (pr.p + 1.0), mc.nonlinear, 1e-2 * mc.nonlinear);
  EXPECT_NEAR(energy(pr, f), mc.energy(), 1e-2 * std::abs(mc.energy()));
}

TEST(Energy, GradientMatchesDifferences) {
  for (Mode mode : {Mode::focusing, Mode::defocusing}) {
    const auto pr = smooth_problem(CylGrid(4.0, 4.0, 24, 24), mode);
    const DiscreteProblem dp(pr);
    const Field u(pr.grid, oc::random_gaussians(4.0, 4.0, 77));
    const Eigen::VectorXd g = dp.gradient(u.values());
    EXPECT_EQ(g, el_gradient(pr, u).values());
    for (std::uint64_t k = 0; k < 20; ++k) {
      const Eigen::VectorXd h = random_vector(pr.grid.size(), 500 + k);
      const double step = 1e-6;
      const double fd = (dp.energy(u.values() + step * h) - dp.energy(u.values() - step * h)) / (2.0 * step);
      const double an = dp.weighted_dot(g, h);
      EXPECT_NEAR(an, fd, 1e-6 * std::max(1.0, std::abs(fd))) << "direction " << k;
    }
  }
}

TEST(Problem, ValidationErrors) {
  auto foc = unit_focusing(8);
  EXPECT_NO_THROW(validate(foc));
  for (double p : {1.0, 5.0, 0.5, 6.0}) {
    auto bad = foc;
    bad.p = p;
    EXPECT_THROW(validate(bad), PreconditionError) << p;
  }
  auto neg = foc;
  neg.Gamma = [](double r, double) { return r < 3.0 ? 1.0 : -1.0; };
  EXPECT_THROW(validate(neg), PreconditionError);
  auto none = foc;
  none.spectrum.reset();
  EXPECT_THROW(validate(none), PreconditionError);
  auto inside = foc;
  inside.spectrum = SpectrumSet::half_line(-1.0);
  EXPECT_THROW(validate(inside), PreconditionError);

  auto def = defocusing_problem();
  EXPECT_NO_THROW(validate(def));
  auto wrong_sign = def;
  wrong_sign.Gamma = one;
  EXPECT_THROW(validate(wrong_sign), PreconditionError);
  auto positive_v = def;
  positive_v.V = [](double r, double) { return r < 1.0 ? 0.5 : -1.0; };
  EXPECT_THROW(validate(positive_v), PreconditionError);
}

TEST(Defocusing, SeedHasNegativeEnergy) {
  const DiscreteProblem dp(defocusing_problem());
  const Field seed = defocusing_seed(dp);
  EXPECT_LT(dp.energy(seed.values()), 0.0);
  EXPECT_GT(dp.weighted_norm(seed.values()), 0.0);
}

TEST(Defocusing, SeedCurlEnergyScalesInverselyWithWidth) {
  const Problem pr{CylGrid(12.0, 12.0, 192, 192), [](double, double) { return 0.0; }, [](double, double) { return -1.0; },
                   3.0, Mode::defocusing, std::nullopt, {}};
  const DiscreteProblem dp(pr);
  const double q1 = dp.quadratic_energy(scaled_seed(pr.grid, 1.0, 1.0).values());
  const double q2 = dp.quadratic_energy(scaled_seed(pr.grid, 1.0, 0.5).values());
  const double q4 = dp.quadratic_energy(scaled_seed(pr.grid, 0.5, 1.0).values());
  EXPECT_NEAR(q2 / q1, 2.0, 2e-2);
  EXPECT_NEAR(q4 / q1, 0.25, 1e-12);
}

TEST(Defocusing, GroundStateOfCoerciveProblem) {
  const auto pr = defocusing_problem();
  SolverOptions opts;
  const auto res = solve_defocusing(pr, opts);
  EXPECT_LT(res.energy, 0.0);
  EXPECT_TRUE(res.nontrivial);
  EXPECT_LE(res.el_residual, opts.tol_outer * std::max(1.0, std::abs(res.energy)));
  EXPECT_NEAR(res.energy, energy(pr, res.u), 1e-12 * std::abs(res.energy));
  // the Euler-Lagrange equation tested against u gives J = (p-1)/(2(p+1)) int Gamma |U|^{p+1}
  EXPECT_NEAR(res.energy, res.nehari_identity, 1e-6 * std::abs(res.energy));
  const DiscreteProblem dp(pr);
  EXPECT_LE(res.energy, dp.energy(defocusing_seed(dp).values()));
}

TEST(SpectralSplit, PositiveOperatorHasNoNegativePart) {
  const auto split = spectral_split(unit_focusing(24));
  EXPECT_TRUE(split.basis.empty());
  EXPECT_GT(split.shift, 1.0);
  ASSERT_TRUE(split.lowest_positive.has_value());
  EXPECT_NEAR(weighted_norm(*split.lowest_positive), 1.0, 1e-10);
}

TEST(SpectralSplit, DesignedPotentialNegativeSubspace) {
  const Designed d;
  const auto pr = d.problem(32);
  const DiscreteProblem dp(pr);
  const auto split = spectral_split(dp);
  EXPECT_EQ(split.basis.size(), count_eigenvalues_below(dp.op, 0.0));
  ASSERT_FALSE(split.basis.empty());
  ASSERT_EQ(split.eigenvalues.size(), split.basis.size());
  for (std::size_t a = 0; a < split.basis.size(); ++a) {
    EXPECT_LT(split.eigenvalues[a], 0.0);
    if (a > 0) EXPECT_LE(split.eigenvalues[a - 1], split.eigenvalues[a]);
    for (std::size_t b = 0; b < split.basis.size(); ++b) {
      EXPECT_NEAR(weighted_inner(split.basis[a], split.basis[b]), a == b ? 1.0 : 0.0, 1e-10);
    }
  }
  EXPECT_GT(split.shift, 0.0);
  EXPECT_THROW(spectral_split(dp, split.basis.size() - 1), PreconditionError);
}

TEST(Nehari, ClosedFormWithoutNegativePart) {
  const auto pr = unit_focusing(24);
  const DiscreteProblem dp(pr);
  const auto split = spectral_split(dp);
  const Field w(pr.grid, oc::random_gaussians(12.0, 12.0, 4));
  const auto pt = nehari_project(dp, split, w);
  const double kw = dp.op.quadratic_form(w.values());
  const double nw = dp.nonlinear_integral(w.values()) / kTwoPi;
  EXPECT_NEAR(pt.t, std::pow(kw / nw, 1.0 / (pr.p - 1.0)), 1e-10 * pt.t);
  EXPECT_LE(std::abs(pt.derivative_along_u), 1e-9 * pt.scale);
  EXPECT_GT(pt.energy, 0.0);
}

TEST(Nehari, DesignedPotentialMaximizer) {
  const Designed d;
  const auto pr = d.problem(32);
  const DiscreteProblem dp(pr);
  const auto split = spectral_split(dp);
  ASSERT_TRUE(split.lowest_positive.has_value());
  const Eigen::MatrixXd E = split.basis_matrix();
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    Eigen::VectorXd w = seed == 0 ? split.lowest_positive->values() : Field(pr.grid, oc::random_gaussians(8.0, 8.0, seed)).values();
    for (Eigen::Index k = 0; k < E.cols(); ++k) w -= dp.weighted_dot(E.col(k), w) * E.col(k);
    w /= dp.weighted_norm(w);
    const auto pt = nehari_project(dp, split, Field(pr.grid, w));
    EXPECT_GT(pt.t, 0.0);
    EXPECT_LE(std::abs(pt.derivative_along_u), 1e-9 * pt.scale);
    EXPECT_LE(pt.max_derivative_minus, 1e-9 * pt.scale);
    const Eigen::MatrixXd H = nehari_hessian(dp, split, pt);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    EXPECT_LT(es.eigenvalues().maxCoeff(), 0.0);
    // any perturbation inside the fibre lowers the energy
    const Eigen::VectorXd v = random_vector(static_cast<std::size_t>(E.cols()), 90 + seed);
    EXPECT_LT(dp.energy(pt.u.values() + 1e-3 * (E * v + pt.u.values())), pt.energy);
    // projecting the positive part of the maximizer reproduces it
    const Eigen::VectorXd plus = pt.u.values() - E * pt.c;
    const auto again = nehari_project(dp, split, Field(pr.grid, plus / dp.weighted_norm(plus)));
    EXPECT_NEAR(again.energy, pt.energy, 1e-10 * std::abs(pt.energy));
    EXPECT_NEAR((again.u.values() - pt.u.values()).norm(), 0.0, 1e-6 * pt.u.values().norm());
  }
}

TEST(Focusing, PositiveOperatorGroundState) {
  const auto pr = unit_focusing(64);
  SolverOptions opts;
  opts.random_starts = 4;
  const auto res = solve_focusing(pr, opts);
  EXPECT_TRUE(res.nontrivial);
  EXPECT_GT(res.energy, 0.0);
  EXPECT_LE(res.el_residual, 1e-6 * res.scale);
  EXPECT_LE(std::abs(res.nehari_residuals[0]), 1e-6 * res.scale);
  EXPECT_NEAR(res.energy, res.nehari_identity, 1e-6 * res.energy);
  EXPECT_NEAR(res.energy, energy(pr, res.u), 1e-12 * res.energy);
  ASSERT_GE(res.start_energies.size(), 2u);
  for (double e : res.start_energies) EXPECT_NEAR(e, res.energy, 1e-4 * res.energy);
  EXPECT_DOUBLE_EQ(res.start_energies.front(), res.energy);
}

TEST(Focusing, DesignedPotentialGroundState) {
  const Designed d;
  const auto pr = d.problem(24);
  SolverOptions opts;
  opts.random_starts = 2;
  const auto res = solve_focusing(pr, opts);
  EXPECT_TRUE(res.nontrivial);
  EXPECT_GT(res.energy, 0.0);
  EXPECT_LE(res.el_residual, 1e-6 * res.scale);
  EXPECT_LE(res.nehari_residuals[1], 1e-6 * res.scale);
  EXPECT_NEAR(res.energy, res.nehari_identity, 1e-6 * res.energy);
  for (double e : res.start_energies) EXPECT_NEAR(e, res.energy, 1e-4 * res.energy);
}

TEST(Focusing, Deterministic) {
  const auto pr = unit_focusing(24);
  SolverOptions opts;
  opts.random_starts = 2;
  const auto a = solve_focusing(pr, opts);
  const auto b = solve_focusing(pr, opts);
  EXPECT_EQ(a.energy, b.energy);
  EXPECT_EQ(a.u.values(), b.u.values());
}

TEST(Focusing, RejectsInvalidProblem) {
  auto pr = unit_focusing(16);
  pr.p = 5.0;
  EXPECT_THROW(solve_focusing(pr), PreconditionError);
  EXPECT_THROW(solve_defocusing(unit_focusing(16)), PreconditionError);
}
