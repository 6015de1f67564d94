#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "curlgap/errors.hpp"
#include "curlgap/ground_state.hpp"
#include "curlgap/parallel.hpp"

namespace curlgap {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Cached pieces of the reduced problem on span{w} + H^-.
struct Reduced {
  const DiscreteProblem& dp;
  const MatrixXd& basis;  // n x m, w-orthonormal
  const VectorXd& lambda;
  const VectorXd& w;
  double bww;

  VectorXd field(double t, const VectorXd& c) const {
    VectorXd u = t * w;
    if (c.size() > 0) u += basis * c;
    return u;
  }

  // Node coefficients of the nonlinear term: w_k c_k.
  VectorXd node_coeff() const { return dp.op.weights().cwiseProduct(dp.coeff); }

  double value(double t, const VectorXd& c) const {
    const VectorXd u = field(t, c);
    double quad = t * t * bww;
    for (Index i = 0; i < c.size(); ++i) quad += lambda[i] * c[i] * c[i];
    return kTwoPi * 0.5 * quad - dp.nonlinear_integral(u) / (dp.p + 1.0);
  }

  // Gradient in (t, c).
  VectorXd grad(double t, const VectorXd& c, const VectorXd& u, const VectorXd& nc) const {
    const VectorXd f = (nc.array() * u.array().abs().pow(dp.p - 1.0) * u.array()).matrix();
    VectorXd gr(1 + c.size());
    gr[0] = kTwoPi * (t * bww - w.dot(f));
    if (c.size() > 0) gr.tail(c.size()) = kTwoPi * (lambda.cwiseProduct(c) - basis.transpose() * f);
    return gr;
  }

  MatrixXd hess(const VectorXd& u, const VectorXd& nc) const {
    const Index m = basis.cols();
    const VectorXd d = (dp.p * nc.array() * u.array().abs().pow(dp.p - 1.0)).matrix();
    MatrixXd b(u.size(), 1 + m);
    b.col(0) = w;
    if (m > 0) b.rightCols(m) = basis;
    MatrixXd h = -(b.transpose() * d.asDiagonal() * b);
    h(0, 0) += bww;
    for (Index i = 0; i < m; ++i) h(1 + i, 1 + i) += lambda[i];
    return kTwoPi * h;
  }
};

struct SplitData {
  MatrixXd basis;
  VectorXd lambda;
  MatrixXd wbasis;  // W basis, for projections
};

SplitData split_data(const DiscreteProblem& dp, const SpectralSplit& split) {
  SplitData s;
  s.basis = split.basis_matrix();
  s.lambda = Eigen::Map<const VectorXd>(split.eigenvalues.data(), static_cast<Index>(split.eigenvalues.size()));
  s.wbasis = dp.op.weights().asDiagonal() * s.basis;
  return s;
}

void project_plus(const SplitData& s, VectorXd& x) {
  if (s.basis.cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) x -= s.basis * (s.wbasis.transpose() * x);
}

NehariPoint project_impl(const DiscreteProblem& dp, const SplitData& s, const VectorXd& wv,
                         const SolverOptions& options, std::optional<double> t0, const VectorXd* c0) {
  const double bww = wv.dot(dp.op.apply_symmetric(wv));
  const Index m = s.basis.cols();
  if (!(bww > 0.0)) {
    throw PreconditionError("nehari_project: quadratic form is not positive at w, no Nehari point on this ray");
  }
  const Reduced red{dp, s.basis, s.lambda, wv, bww};
  const VectorXd nc = red.node_coeff();
  const double nw = (nc.array() * wv.array().abs().pow(dp.p + 1.0)).sum();
  if (!(nw > 0.0)) throw PreconditionError("nehari_project: nonlinear term vanishes at w");
  const double t_ray = std::pow(bww / nw, 1.0 / (dp.p - 1.0));

  double t = t_ray;
  VectorXd c = VectorXd::Zero(m);
  if (m > 0 && t0 && c0 != nullptr && c0->size() == m && *t0 > 0.0 && red.value(*t0, *c0) > red.value(t, c)) {
    t = *t0;
    c = *c0;
  }

  NehariPoint pt(Field(dp.grid()));
  std::size_t iter = 0;
  if (m > 0) {
    double phi = red.value(t, c);
    for (;; ++iter) {
      const VectorXd u = red.field(t, c);
      const VectorXd gr = red.grad(t, c, u, nc);
      const double scale = std::max(1.0, dp.nonlinear_integral(u));
      const double along_u = t * gr[0] + c.dot(gr.tail(m));
      if (std::abs(along_u) <= options.tol_inner * scale && gr.tail(m).cwiseAbs().maxCoeff() <= options.tol_inner * scale) {
        break;
      }
      if (iter >= options.inner_max_iterations) {
        throw ConvergenceError("nehari_project: Newton iteration did not converge");
      }
      const MatrixXd h = red.hess(u, nc);
      VectorXd step;
      Eigen::LLT<MatrixXd> llt(-h);
      const bool concave = llt.info() == Eigen::Success;
      if (concave) {
        step = llt.solve(gr);
      } else {
        // Outside the concave region: scaled gradient ascent.
        step = gr / std::max(1.0, h.cwiseAbs().maxCoeff());
      }
      // A Newton gain below the resolution of phi cannot be line-searched.
      if (concave && t + step[0] > 0.0 &&
          0.5 * gr.dot(step) <= 256.0 * std::numeric_limits<double>::epsilon() * (std::abs(phi) + scale)) {
        t += step[0];
        c += step.tail(m);
        phi = red.value(t, c);
        continue;
      }
      double alpha = 1.0;
      for (;;) {
        const double tn = t + alpha * step[0];
        if (tn > 0.0) {
          const VectorXd cn = c + alpha * step.tail(m);
          const double phin = red.value(tn, cn);
          if (phin >= phi + 1e-4 * alpha * gr.dot(step)) {
            t = tn;
            c = cn;
            phi = phin;
            break;
          }
        }
        alpha *= 0.5;
        if (alpha < 1e-12) {
          // Increase below rounding; accept the current point if stationary enough.
          if (std::abs(along_u) <= 1e2 * options.tol_inner * scale) break;
          throw ConvergenceError("nehari_project: line search stalled");
        }
      }
      if (alpha < 1e-12) break;
    }
  }

  const VectorXd u = red.field(t, c);
  const VectorXd gr = red.grad(t, c, u, nc);
  pt.u = Field(dp.grid(), u);
  pt.t = t;
  pt.c = c;
  pt.energy = dp.energy(u);
  pt.derivative_along_u = t * gr[0] + (m > 0 ? c.dot(gr.tail(m)) : 0.0);
  pt.max_derivative_minus = m > 0 ? gr.tail(m).cwiseAbs().maxCoeff() : 0.0;
  pt.scale = std::max(1.0, dp.nonlinear_integral(u));
  pt.iterations = iter;
  return pt;
}

VectorXd random_bump(const CylGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double len = std::min(g.r_max(), g.z_half());
  VectorXd u = VectorXd::Zero(static_cast<Index>(g.size()));
  for (int q = 0; q < 3; ++q) {
    const double rc = 0.4 * g.r_max() * unit(rng);
    const double zc = 0.4 * g.z_half() * (2.0 * unit(rng) - 1.0);
    const double sigma = len * (0.04 + 0.08 * unit(rng));
    const double amp = 0.5 + unit(rng);
    for (std::size_t i = 0; i < g.nr(); ++i) {
      for (std::size_t j = 0; j < g.nz(); ++j) {
        const double dr = g.r(i) - rc;
        const double dz = g.z(j) - zc;
        u[static_cast<Index>(g.index(i, j))] += amp * std::exp(-(dr * dr + dz * dz) / (2.0 * sigma * sigma));
      }
    }
  }
  return u;
}

struct StartOutcome {
  bool ok = false;
  bool membership_failure = false;
  std::string error;
  VectorXd u;
  double energy = std::numeric_limits<double>::infinity();
  double residual = 0.0;
  std::size_t iterations = 0;
};

class FocusingRun {
 public:
  FocusingRun(const DiscreteProblem& dp, const SpectralSplit& split, const SolverOptions& opt)
      : dp_(dp), s_(split_data(dp, split)), opt_(opt) {
    // Metric: kinetic part plus |V| + 1 on the diagonal.
    Eigen::SparseMatrix<double> t = dp.op.stiffness();
    const VectorXd& w = dp.op.weights();
    for (Index i = 0; i < t.outerSize(); ++i) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(t, i); it; ++it) {
        if (it.row() == it.col()) it.valueRef() += w[i] * (std::abs(dp.op.potential()[i]) + 1.0);
      }
    }
    metric_.compute(t);
    if (metric_.info() != Eigen::Success) throw ConvergenceError("solve_focusing: metric factorization failed");
  }

  StartOutcome run(VectorXd w0) const {
    StartOutcome out;
    try {
      out = descend(std::move(w0));
    } catch (const PreconditionError& e) {
      out.membership_failure = true;
      out.error = e.what();
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    return out;
  }

  const SplitData& split() const { return s_; }

 private:
  double wnorm(const VectorXd& x) const { return dp_.weighted_norm(x); }

  void normalize(VectorXd& x) const {
    const double n = wnorm(x);
    if (!(n > 0.0)) throw PreconditionError("solve_focusing: start has no component in H^+");
    x /= n;
  }

  // w-orthogonal projection onto H^+ intersected with the complement of w.
  VectorXd tangent(const VectorXd& w, VectorXd x) const {
    project_plus(s_, x);
    x -= w * dp_.weighted_dot(w, x);
    return x;
  }

  StartOutcome descend(VectorXd w) const {
    const VectorXd& wts = dp_.op.weights();
    project_plus(s_, w);
    normalize(w);
    NehariPoint pt = project_impl(dp_, s_, w, opt_, std::nullopt, nullptr);

    VectorXd dir_prev;
    VectorXd z_prev;
    VectorXd gtan_prev;
    std::size_t iter = 0;
    StartOutcome out;
    for (;; ++iter) {
      const VectorXd u = pt.u.values();
      const VectorXd g = dp_.gradient(u);
      const double gnorm = wnorm(g);
      const double scale = dp_.residual_scale(u);
      if (gnorm <= opt_.tol_outer * scale) break;
      if (iter >= opt_.max_iterations) {
        throw ConvergenceError("solve_focusing: iteration cap reached with ||g||_w / scale = " +
                               std::to_string(gnorm / scale));
      }
      // Riemannian gradient of w -> J[m(w)] is t * tangent(g); precondition
      // with (t^2 T)^{-1} W so the natural step length is about 1.
      const VectorXd gtan = pt.t * tangent(w, g);
      const VectorXd z = tangent(w, metric_.solve(wts.cwiseProduct(gtan))) / (pt.t * pt.t);
      const double gz = wts.cwiseProduct(gtan).dot(z);
      VectorXd dir = -z;
      if (dir_prev.size() > 0) {
        const double beta = std::max(0.0, wts.cwiseProduct(gtan).dot(z - tangent(w, z_prev)) /
                                              wts.cwiseProduct(gtan_prev).dot(z_prev));
        dir += beta * tangent(w, dir_prev);
      }
      double slope = dp_.weighted_dot(gtan, dir);
      if (!(slope < 0.0)) {
        dir = -z;
        slope = -gz;
      }

      // Below this level energy differences are rounding noise; the step is
      // then judged by the residual instead.
      const double noise = 256.0 * std::numeric_limits<double>::epsilon() *
                           (std::abs(dp_.quadratic_energy(u)) + dp_.nonlinear_integral(u) / dp_.p);
      double alpha = 1.0;
      NehariPoint trial = pt;
      VectorXd w_new;
      for (;;) {
        w_new = w + alpha * dir;
        project_plus(s_, w_new);
        normalize(w_new);
        trial = project_impl(dp_, s_, w_new, opt_, pt.t, &pt.c);
        if (trial.energy <= pt.energy + 1e-4 * alpha * slope) break;
        if (std::abs(trial.energy - pt.energy) <= noise && wnorm(dp_.gradient(trial.u.values())) < gnorm) break;
        alpha *= 0.5;
        if (alpha < 1e-14) break;
      }
      if (alpha < 1e-14) {
        if (gnorm <= 1e2 * opt_.tol_outer * scale) break;
        throw ConvergenceError("solve_focusing: line search stalled at ||g||_w / scale = " +
                               std::to_string(gnorm / scale));
      }
      dir_prev = dir;
      z_prev = z;
      gtan_prev = gtan;
      w = std::move(w_new);
      pt = std::move(trial);
    }
    out.ok = true;
    out.u = pt.u.values();
    out.energy = pt.energy;
    out.residual = wnorm(dp_.gradient(out.u));
    out.iterations = iter;
    return out;
  }

  const DiscreteProblem& dp_;
  SplitData s_;
  SolverOptions opt_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> metric_;
};

}  // namespace

MatrixXd SpectralSplit::basis_matrix() const {
  if (basis.empty()) return MatrixXd(0, 0);
  MatrixXd b(basis.front().values().size(), static_cast<Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) b.col(static_cast<Index>(i)) = basis[i].values();
  return b;
}

SpectralSplit spectral_split(const DiscreteProblem& dp, std::size_t k_neg_max, const EigenOptions& eigen) {
  const std::size_t below = count_eigenvalues_below(dp.op, -1e-8);
  const std::size_t near = count_eigenvalues_below(dp.op, 1e-8);
  if (near != below) {
    throw PreconditionError("spectral_split: discrete eigenvalue within 1e-8 of 0 (gap hypothesis fails numerically)");
  }
  if (below > k_neg_max) {
    throw PreconditionError("spectral_split: " + std::to_string(below) + " negative eigenvalues exceed k_neg_max = " +
                            std::to_string(k_neg_max));
  }
  auto pairs = eigs_lowest(dp.op, below + 1, eigen);
  SpectralSplit split;
  for (std::size_t i = 0; i < below; ++i) {
    if (!(pairs[i].value < 0.0)) throw ConvergenceError("spectral_split: eigensolver disagrees with the inertia count");
    split.basis.push_back(pairs[i].vector);
    split.eigenvalues.push_back(pairs[i].value);
  }
  if (!(pairs[below].value > 0.0)) throw ConvergenceError("spectral_split: eigensolver disagrees with the inertia count");
  split.shift = pairs[below].value;
  split.lowest_positive = pairs[below].vector;
  return split;
}

SpectralSplit spectral_split(const Problem& prob, std::size_t k_neg_max, const EigenOptions& eigen) {
  if (prob.mode != Mode::focusing) throw PreconditionError("spectral_split: problem is not in focusing mode");
  return spectral_split(DiscreteProblem(prob), k_neg_max, eigen);
}

NehariPoint nehari_project(const DiscreteProblem& dp, const SpectralSplit& split, const Field& w_plus,
                           const SolverOptions& options, std::optional<double> t0, const VectorXd* c0) {
  if (!(w_plus.grid() == dp.grid())) throw GridMismatchError("nehari_project: grid mismatch");
  const SplitData s = split_data(dp, split);
  const VectorXd& wv = w_plus.values();
  if (!(dp.weighted_norm(wv) > 0.0)) throw PreconditionError("nehari_project: w_plus must be nonzero");
  if (s.basis.cols() > 0) {
    const double leak = (s.wbasis.transpose() * wv).cwiseAbs().maxCoeff();
    if (leak > 1e-8 * dp.weighted_norm(wv)) throw PreconditionError("nehari_project: w_plus is not in H^+");
  }
  return project_impl(dp, s, wv, options, t0, c0);
}

MatrixXd nehari_hessian(const DiscreteProblem& dp, const SpectralSplit& split, const NehariPoint& pt) {
  const SplitData s = split_data(dp, split);
  const VectorXd w = (pt.u.values() - (s.basis.cols() > 0 ? VectorXd(s.basis * pt.c) : VectorXd::Zero(pt.u.values().size()))) / pt.t;
  const double bww = w.dot(dp.op.apply_symmetric(w));
  const Reduced red{dp, s.basis, s.lambda, w, bww};
  return red.hess(pt.u.values(), red.node_coeff());
}

GroundStateResult solve_focusing(const Problem& prob, const SolverOptions& options) {
  if (prob.mode != Mode::focusing) throw PreconditionError("solve_focusing: problem is not in focusing mode");
  validate(prob);
  const DiscreteProblem dp(prob);
  const SpectralSplit split = spectral_split(dp, options.k_neg_max, options.eigen);
  const FocusingRun run(dp, split, options);

  std::vector<VectorXd> starts;
  if (split.lowest_positive) starts.push_back(split.lowest_positive->values());
  for (std::size_t s = 0; s < options.random_starts; ++s) {
    std::mt19937_64 rng(options.seed + 7919 * (s + 1));
    starts.push_back(random_bump(prob.grid, rng));
  }

  std::vector<StartOutcome> outcomes(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) { outcomes[i] = run.run(starts[i]); });

  const StartOutcome* best = nullptr;
  std::vector<double> energies;
  std::size_t iterations = 0;
  bool all_membership = true;
  std::string last_error;
  for (const auto& o : outcomes) {
    iterations += o.iterations;
    if (!o.ok) {
      last_error = o.error;
      continue;
    }
    all_membership = false;
    energies.push_back(o.energy);
    if (best == nullptr || o.energy < best->energy) best = &o;
  }
  if (best == nullptr) {
    if (all_membership && !outcomes.empty() && outcomes.front().membership_failure) {
      throw PreconditionError("solve_focusing: no start admits a Nehari point: " + last_error);
    }
    throw ConvergenceError("solve_focusing: no start converged: " + last_error);
  }
  std::sort(energies.begin(), energies.end());

  GroundStateResult res(Field(prob.grid, best->u));
  const VectorXd& u = best->u;
  const VectorXd g = dp.gradient(u);
  res.energy = best->energy;
  res.el_residual = dp.weighted_norm(g);
  res.scale = dp.residual_scale(u);
  double max_minus = 0.0;
  for (const auto& e : split.basis) max_minus = std::max(max_minus, std::abs(dp.weighted_dot(g, e.values())));
  res.nehari_residuals = {dp.weighted_dot(g, u), max_minus};
  res.nehari_identity = (dp.p - 1.0) / (2.0 * (dp.p + 1.0)) * dp.nonlinear_integral(u);
  res.nontrivial = dp.weighted_norm(u) >= options.nontrivial_threshold;
  res.iterations = iterations;
  res.starts = starts.size();
  res.start_energies = std::move(energies);
  return res;
}

}  // namespace curlgap
