#include "curlgap/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "curlgap/errors.hpp"
#include "preconditioner.hpp"

namespace curlgap {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Orthonormalizes the columns of v (SVQB, two passes) and drops directions
// that are numerically dependent.
void orthonormalize(MatrixXd& v) {
  for (int pass = 0; pass < 2 && v.cols() > 0; ++pass) {
    MatrixXd gram = v.transpose() * v;
    VectorXd dinv(gram.rows());
    for (Index i = 0; i < gram.rows(); ++i) dinv[i] = gram(i, i) > 0.0 ? 1.0 / std::sqrt(gram(i, i)) : 0.0;
    gram = dinv.asDiagonal() * gram * dinv.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram);
    const VectorXd& lam = es.eigenvalues();
    const double cutoff = 1e-12 * std::max(lam.maxCoeff(), 0.0);
    Index keep = 0;
    for (Index i = 0; i < lam.size(); ++i) keep += lam[i] > cutoff ? 1 : 0;
    const Index first = lam.size() - keep;  // eigenvalues ascend
    MatrixXd t = dinv.asDiagonal() * es.eigenvectors().rightCols(keep);
    for (Index i = 0; i < keep; ++i) t.col(i) /= std::sqrt(lam[first + i]);
    v = v * t;
  }
}

void project_out(const MatrixXd& x, MatrixXd& q) {
  for (int pass = 0; pass < 2; ++pass) q -= x * (x.transpose() * q);
}

std::vector<EigenPair> finish(const DiscreteOperator& op, const MatrixXd& x, const VectorXd& theta,
                              const VectorXd& residuals, std::size_t k) {
  const VectorXd inv_sqrt_w = op.weights().cwiseSqrt().cwiseInverse();
  std::vector<EigenPair> out;
  out.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto jj = static_cast<Index>(j);
    VectorXd u = x.col(jj).cwiseProduct(inv_sqrt_w);
    out.push_back({theta[jj], Field(op.grid(), std::move(u)), residuals[jj]});
  }
  return out;
}

std::vector<EigenPair> dense_lowest(const DiscreteOperator& op, std::size_t k) {
  const MatrixXd s = MatrixXd(op.symmetrized());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s);
  if (es.info() != Eigen::Success) throw ConvergenceError("eigs_lowest: dense eigensolver failed");
  const auto kk = static_cast<Index>(k);
  const MatrixXd x = es.eigenvectors().leftCols(kk);
  const VectorXd theta = es.eigenvalues().head(kk);
  const MatrixXd r = s * x - x * theta.asDiagonal();
  return finish(op, x, theta, r.colwise().norm().transpose(), k);
}

std::vector<EigenPair> lobpcg(const DiscreteOperator& op, std::size_t k, const EigenOptions& opt) {
  const SparseMatrix s = op.symmetrized();
  const Index n = s.rows();
  const auto b = static_cast<Index>(std::min<std::size_t>(k + opt.extra_vectors, static_cast<std::size_t>(n) / 3));
  const detail::SeparablePreconditioner prec(op, opt.preconditioner_floor);

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  MatrixXd x(n, b);
  for (Index j = 0; j < b; ++j) {
    for (Index i = 0; i < n; ++i) x(i, j) = normal(rng);
  }
  {
    MatrixXd smooth;
    prec.apply(x, smooth);
    x = std::move(smooth);
  }
  orthonormalize(x);
  if (x.cols() < b) throw ConvergenceError("eigs_lowest: degenerate starting block");

  MatrixXd sx = s * x;
  VectorXd theta;
  {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(x.transpose() * sx);
    x = x * es.eigenvectors();
    sx = sx * es.eigenvectors();
    theta = es.eigenvalues();
  }

  MatrixXd p(n, 0);
  VectorXd res(b);
  for (std::size_t iter = 0;; ++iter) {
    const MatrixXd r = sx - x * theta.asDiagonal();
    res = r.colwise().norm().transpose();

    std::vector<Index> active;
    bool done = true;
    for (Index j = 0; j < b; ++j) {
      if (res[j] > opt.tol) {
        active.push_back(j);
        if (j < static_cast<Index>(k)) done = false;
      }
    }
    if (done) break;
    if (iter >= opt.max_iterations) {
      throw ConvergenceError("eigs_lowest: LOBPCG reached the iteration cap with residual " +
                             std::to_string(res.head(static_cast<Index>(k)).maxCoeff()));
    }

    const auto na = static_cast<Index>(active.size());
    MatrixXd ra(n, na);
    for (Index a = 0; a < na; ++a) ra.col(a) = r.col(active[static_cast<std::size_t>(a)]);
    MatrixXd w;
    prec.apply(ra, w);

    const Index np = p.cols() > 0 ? na : 0;
    MatrixXd q(n, na + np);
    q.leftCols(na) = w;
    for (Index a = 0; a < np; ++a) q.col(na + a) = p.col(active[static_cast<std::size_t>(a)]);
    project_out(x, q);
    orthonormalize(q);
    const MatrixXd sq = s * q;

    const Index m = b + q.cols();
    MatrixXd g(m, m);
    g.topLeftCorner(b, b) = theta.asDiagonal();
    g.topRightCorner(b, q.cols()) = x.transpose() * sq;
    g.bottomLeftCorner(q.cols(), b) = g.topRightCorner(b, q.cols()).transpose();
    g.bottomRightCorner(q.cols(), q.cols()) = q.transpose() * sq;
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(g);
    const MatrixXd c = es.eigenvectors().leftCols(b);
    theta = es.eigenvalues().head(b);

    const MatrixXd cx = c.topRows(b);
    const MatrixXd cq = c.bottomRows(q.cols());
    p = q * cq;
    x = (x * cx + p).eval();
    sx = (sx * cx + sq * cq).eval();
  }
  return finish(op, x, theta, res, k);
}

}  // namespace

std::vector<EigenPair> eigs_lowest(const DiscreteOperator& op, std::size_t k, const EigenOptions& options) {
  const std::size_t n = op.size();
  if (k == 0) throw PreconditionError("eigs_lowest: k must be >= 1");
  if (k > n) throw PreconditionError("eigs_lowest: k exceeds the matrix dimension");
  if (n <= options.dense_limit || 3 * (k + options.extra_vectors) > n) return dense_lowest(op, k);
  return lobpcg(op, k, options);
}

std::size_t count_eigenvalues_below(const DiscreteOperator& op, double sigma) {
  Eigen::SparseMatrix<double> m = op.symmetric_form();
  for (Index k = 0; k < m.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
      if (it.row() == it.col()) it.valueRef() -= sigma * op.weights()[k];
    }
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(m);
  if (ldlt.info() != Eigen::Success) throw ConvergenceError("count_eigenvalues_below: LDL^T factorization failed");
  const VectorXd d = ldlt.vectorD();
  return static_cast<std::size_t>((d.array() < 0.0).count());
}

}  // namespace curlgap
