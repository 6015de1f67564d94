#include "curlgap/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/SparseCholesky>

#include "curlgap/errors.hpp"

namespace curlgap {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::VectorXd abs_pow(const Eigen::VectorXd& u, double e) { return u.array().abs().pow(e).matrix(); }

}  // namespace

void validate(const Problem& prob) {
  if (!(prob.p > 1.0) || !std::isfinite(prob.p)) throw PreconditionError("problem: p must be a finite real > 1");
  const Eigen::VectorXd v = prob.grid.sample(prob.V);
  const Eigen::VectorXd gamma = prob.grid.sample(prob.Gamma);
  if (!v.allFinite() || !gamma.allFinite()) throw PreconditionError("problem: V and Gamma must be finite on the grid");
  if (prob.mode == Mode::defocusing) {
    if (!(gamma.maxCoeff() < 0.0)) {
      throw PreconditionError("defocusing mode requires Gamma < 0 at every grid node");
    }
    if (!(v.maxCoeff() < 0.0)) throw PreconditionError("defocusing mode requires esssup V < 0 on the grid");
    return;
  }
  if (!(prob.p < 5.0)) throw PreconditionError("focusing mode requires 1 < p < 5");
  if (!(gamma.minCoeff() > 0.0)) throw PreconditionError("focusing mode requires min Gamma > 0");
  if (!prob.spectrum) throw PreconditionError("focusing mode requires a certified spectrum of L");
  if (!(prob.spectrum->distance(0.0) > 0.0)) {
    throw PreconditionError("focusing mode requires 0 outside the spectrum of L (gap margin > 0)");
  }
}

DiscreteProblem::DiscreteProblem(const Problem& prob)
    : op(assemble_L(prob.grid, prob.V, prob.assembly)), gamma(prob.grid.sample(prob.Gamma)), p(prob.p) {
  const auto& g = prob.grid;
  coeff.resize(gamma.size());
  for (std::size_t i = 0; i < g.nr(); ++i) {
    const double rp = std::pow(g.r(i), p - 1.0);
    for (std::size_t j = 0; j < g.nz(); ++j) {
      const auto k = static_cast<Eigen::Index>(g.index(i, j));
      coeff[k] = gamma[k] * rp;
    }
  }
}

double DiscreteProblem::quadratic_energy(const Eigen::VectorXd& u) const { return 0.5 * kTwoPi * op.quadratic_form(u); }

double DiscreteProblem::nonlinear_integral(const Eigen::VectorXd& u) const {
  return kTwoPi * (op.weights().array() * coeff.array() * u.array().abs().pow(p + 1.0)).sum();
}

double DiscreteProblem::energy(const Eigen::VectorXd& u) const {
  return quadratic_energy(u) - nonlinear_integral(u) / (p + 1.0);
}

Eigen::VectorXd DiscreteProblem::gradient(const Eigen::VectorXd& u) const {
  Eigen::VectorXd g = op.apply(u);
  g.array() -= coeff.array() * abs_pow(u, p - 1.0).array() * u.array();
  return kTwoPi * g;
}

double DiscreteProblem::residual_scale(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd f = (coeff.array() * abs_pow(u, p - 1.0).array() * u.array()).matrix();
  return std::max(1.0, kTwoPi * weighted_norm(f));
}

double DiscreteProblem::weighted_dot(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  return (op.weights().array() * u.array() * v.array()).sum();
}

double DiscreteProblem::weighted_norm(const Eigen::VectorXd& u) const { return std::sqrt(weighted_dot(u, u)); }

double energy(const Problem& prob, const Field& u) {
  if (!(u.grid() == prob.grid)) throw GridMismatchError("energy: field and problem grids differ");
  return DiscreteProblem(prob).energy(u.values());
}

Field el_gradient(const Problem& prob, const Field& u) {
  if (!(u.grid() == prob.grid)) throw GridMismatchError("el_gradient: field and problem grids differ");
  return Field(prob.grid, DiscreteProblem(prob).gradient(u.values()));
}

Field scaled_seed(const CylGrid& grid, double s, double t) {
  return Field(grid, [s, t](double r, double z) { return s * t * std::exp(-t * t * (r * r + z * z)); });
}

Field defocusing_seed(const DiscreteProblem& dp) {
  const auto& g = dp.grid();
  const double room = std::min(g.r_max(), g.z_half());
  // keeps e^{-(t rho)^2} below e^{-9} on the boundary
  for (double t = 1.0; 3.0 / t <= room || t == 1.0; t *= 0.5) {
    const Field base = scaled_seed(g, 1.0, t);
    const double q = dp.quadratic_energy(base.values());
    if (!(q < 0.0)) continue;
    for (double s = 1.0; s > 1e-12; s *= 0.5) {
      Field seed = scaled_seed(g, s, t);
      if (dp.energy(seed.values()) < 0.0) return seed;
    }
  }
  throw PreconditionError(
      "defocusing seed: no scaled bump reaches J < 0 on the truncated domain (hypotheses violated)");
}

GroundStateResult solve_defocusing(const Problem& prob, const SolverOptions& options) {
  if (prob.mode != Mode::defocusing) throw PreconditionError("solve_defocusing: problem is not in defocusing mode");
  validate(prob);
  const DiscreteProblem dp(prob);
  const auto& w = dp.op.weights();
  const SparseMatrix k_sym = dp.op.symmetric_form();

  Eigen::VectorXd u = defocusing_seed(dp).values();
  double j = dp.energy(u);
  double tau = 0.0;
  std::size_t iter = 0;
  for (;; ++iter) {
    const Eigen::VectorXd g = dp.gradient(u);
    const double gnorm = dp.weighted_norm(g);
    if (gnorm <= options.tol_outer * std::max(1.0, std::abs(j))) break;
    if (iter >= options.max_iterations) {
      throw ConvergenceError("solve_defocusing: iteration cap reached with ||g||_w = " + std::to_string(gnorm));
    }
    const Eigen::VectorXd euclid = w.cwiseProduct(g);  // dJ[h] = euclid . h
    const Eigen::VectorXd curv =
        (kTwoPi * dp.p * w.array() * (-dp.coeff.array()) * abs_pow(u, dp.p - 1.0).array()).matrix();

    Eigen::VectorXd d;
    for (int attempt = 0;; ++attempt) {
      Eigen::SparseMatrix<double> h = kTwoPi * k_sym;
      for (Eigen::Index i = 0; i < h.outerSize(); ++i) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(h, i); it; ++it) {
          if (it.row() == it.col()) it.valueRef() += curv[i] + tau * w[i];
        }
      }
      Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(h);
      if (llt.info() == Eigen::Success) {
        d = -llt.solve(euclid);
        if (euclid.dot(d) < 0.0) break;
      }
      tau = tau == 0.0 ? 1e-6 * std::max(1.0, dp.op.potential().cwiseAbs().maxCoeff()) : 4.0 * tau;
      if (attempt > 60) throw ConvergenceError("solve_defocusing: could not form a descent direction");
    }

    const double slope = euclid.dot(d);
    double alpha = 1.0;
    double j_new = dp.energy(u + d);
    while (!(j_new <= j + 1e-4 * alpha * slope)) {
      alpha *= 0.5;
      if (alpha < 1e-14) break;
      j_new = dp.energy(u + alpha * d);
    }
    if (alpha < 1e-14) {
      // No decrease achievable in floating point; the gradient test decides.
      const double gn = dp.weighted_norm(dp.gradient(u));
      if (gn <= 1e2 * options.tol_outer * std::max(1.0, std::abs(j))) break;
      throw ConvergenceError("solve_defocusing: line search stalled with ||g||_w = " + std::to_string(gn));
    }
    u += alpha * d;
    j = j_new;
    tau *= alpha == 1.0 ? 0.25 : 1.0;
    if (tau < 1e-12) tau = 0.0;
  }

  GroundStateResult res(Field(prob.grid, u));
  res.energy = j;
  const Eigen::VectorXd g = dp.gradient(u);
  res.el_residual = dp.weighted_norm(g);
  res.scale = dp.residual_scale(u);
  res.nehari_residuals = {dp.weighted_dot(g, u), 0.0};
  res.nehari_identity = (dp.p - 1.0) / (2.0 * (dp.p + 1.0)) * dp.nonlinear_integral(u);
  res.nontrivial = dp.weighted_norm(u) >= options.nontrivial_threshold;
  res.iterations = iter;
  res.starts = 1;
  res.start_energies = {j};
  if (!(j < 0.0) || !res.nontrivial) {
    throw ConvergenceError("solve_defocusing: converged state is not a nontrivial state with J < 0");
  }
  return res;
}

}  // namespace curlgap
