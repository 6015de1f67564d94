#include "curlgap/discrete_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curlgap/errors.hpp"

namespace curlgap {
namespace {

double cube(double x) { return x * x * x; }

// r^3 at the lower face of radial cell i; the r = 0 face carries exactly 0.
double face_cube(double hr, std::size_t i) { return cube(static_cast<double>(i) * hr); }

}  // namespace

DiscreteOperator::DiscreteOperator(const CylGrid& grid, SparseMatrix stiffness, Eigen::VectorXd potential)
    : grid_(grid), stiffness_(std::move(stiffness)), potential_(std::move(potential)), weights_(grid.weights()) {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  if (stiffness_.rows() != n || stiffness_.cols() != n || potential_.size() != n) {
    throw GridMismatchError("DiscreteOperator: sizes do not match the grid");
  }
}

SparseMatrix DiscreteOperator::matrix() const {
  SparseMatrix a = stiffness_;
  for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      it.valueRef() /= weights_[k];
      if (it.col() == k) it.valueRef() += potential_[k];
    }
  }
  return a;
}

SparseMatrix DiscreteOperator::symmetric_form() const {
  SparseMatrix a = stiffness_;
  for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      if (it.col() == k) it.valueRef() += weights_[k] * potential_[k];
    }
  }
  return a;
}

SparseMatrix DiscreteOperator::symmetrized() const {
  const Eigen::VectorXd s = weights_.cwiseSqrt().cwiseInverse();
  SparseMatrix a = stiffness_;
  for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      it.valueRef() *= s[k] * s[it.col()];
      if (it.col() == k) it.valueRef() += potential_[k];
    }
  }
  return a;
}

Eigen::VectorXd DiscreteOperator::apply(const Eigen::VectorXd& u) const {
  Eigen::VectorXd out = stiffness_ * u;
  out.array() /= weights_.array();
  out.array() += potential_.array() * u.array();
  return out;
}

Eigen::VectorXd DiscreteOperator::apply_symmetric(const Eigen::VectorXd& u) const {
  Eigen::VectorXd out = stiffness_ * u;
  out.array() += weights_.array() * potential_.array() * u.array();
  return out;
}

double DiscreteOperator::quadratic_form(const Eigen::VectorXd& u) const { return u.dot(apply_symmetric(u)); }

DiscreteOperator DiscreteOperator::shifted(double c) const {
  return DiscreteOperator(grid_, stiffness_, (potential_.array() + c).matrix());
}

Eigen::VectorXd sample_potential(const CylGrid& grid, const Sampler& V, const AssemblyOptions& options) {
  const std::size_t sr = std::max<std::size_t>(options.samples_r, 1);
  const std::size_t sz = std::max<std::size_t>(options.samples_z, 1);
  if (sr == 1 && sz == 1) return grid.sample(V);
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
  const double hr = grid.hr();
  const double hz = grid.hz();
  for (std::size_t i = 0; i < grid.nr(); ++i) {
    for (std::size_t j = 0; j < grid.nz(); ++j) {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t a = 0; a < sr; ++a) {
        const double r = grid.r(i) - 0.5 * hr + (static_cast<double>(a) + 0.5) * hr / static_cast<double>(sr);
        const double wr = cube(r);
        for (std::size_t b = 0; b < sz; ++b) {
          const double z = grid.z(j) - 0.5 * hz + (static_cast<double>(b) + 0.5) * hz / static_cast<double>(sz);
          num += wr * V(r, z);
          den += wr;
        }
      }
      out[static_cast<Eigen::Index>(grid.index(i, j))] = num / den;
    }
  }
  return out;
}

DiscreteOperator assemble_L(const CylGrid& grid, const Sampler& V, const AssemblyOptions& options) {
  const std::size_t nr = grid.nr();
  const std::size_t nz = grid.nz();
  const double hr = grid.hr();
  const double hz = grid.hz();
  const auto n = static_cast<Eigen::Index>(grid.size());

  SparseMatrix k(n, n);
  k.reserve(Eigen::VectorXi::Constant(n, 5));
  for (std::size_t i = 0; i < nr; ++i) {
    const double lower = hz * face_cube(hr, i) / hr;
    const double upper = i + 1 < nr ? hz * face_cube(hr, i + 1) / hr : 2.0 * hz * cube(grid.r_max()) / hr;
    const double axial = grid.radial_mass(i) * hr / hz;
    for (std::size_t j = 0; j < nz; ++j) {
      const auto row = static_cast<Eigen::Index>(grid.index(i, j));
      const double zdiag = (j == 0 || j + 1 == nz) ? 3.0 * axial : 2.0 * axial;
      if (i > 0) k.insert(row, row - static_cast<Eigen::Index>(nz)) = -lower;
      if (j > 0) k.insert(row, row - 1) = -axial;
      k.insert(row, row) = lower + upper + zdiag;
      if (j + 1 < nz) k.insert(row, row + 1) = -axial;
      if (i + 1 < nr) k.insert(row, row + static_cast<Eigen::Index>(nz)) = -upper;
    }
  }
  k.makeCompressed();
  return DiscreteOperator(grid, std::move(k), sample_potential(grid, V, options));
}

Tridiagonal radial_tridiagonal(double r_max, std::size_t nr, const Eigen::VectorXd& potential) {
  if (nr < 2 || potential.size() != static_cast<Eigen::Index>(nr)) {
    throw PreconditionError("radial_tridiagonal: need nr >= 2 potential values");
  }
  const double hr = r_max / static_cast<double>(nr);
  Eigen::VectorXd mass(static_cast<Eigen::Index>(nr));
  for (std::size_t i = 0; i < nr; ++i) {
    const double ri = (static_cast<double>(i) + 0.5) * hr;
    mass[static_cast<Eigen::Index>(i)] = cube(ri) + 0.25 * ri * hr * hr;
  }
  Tridiagonal t;
  t.diag.resize(static_cast<Eigen::Index>(nr));
  t.off.resize(static_cast<Eigen::Index>(nr - 1));
  const double h2 = hr * hr;
  for (std::size_t i = 0; i < nr; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double upper = i + 1 < nr ? face_cube(hr, i + 1) : 2.0 * cube(r_max);
    t.diag[ii] = (face_cube(hr, i) + upper) / (mass[ii] * h2) + potential[ii];
    if (i + 1 < nr) t.off[ii] = -face_cube(hr, i + 1) / (h2 * std::sqrt(mass[ii] * mass[ii + 1]));
  }
  return t;
}

Tridiagonal assemble_radial_1d(double r_max, std::size_t nr, const std::function<double(double)>& W,
                               std::size_t cell_samples) {
  if (!(r_max > 0.0)) throw PreconditionError("assemble_radial_1d: r_max must be positive");
  const CylGrid g(r_max, 1.0, nr, 2);
  AssemblyOptions opts;
  opts.samples_r = cell_samples;
  const Eigen::VectorXd v2 = sample_potential(g, [&W](double r, double) { return W(r); }, opts);
  Eigen::VectorXd v(static_cast<Eigen::Index>(nr));
  for (std::size_t i = 0; i < nr; ++i) v[static_cast<Eigen::Index>(i)] = v2[static_cast<Eigen::Index>(g.index(i, 0))];
  return radial_tridiagonal(r_max, nr, v);
}

double step_cell_average(const StepRadialPotential& W, double a, double b) {
  const double d = std::clamp(W.delta(), a, b);
  const double inner = std::pow(d, 4) - std::pow(a, 4);
  const double outer = std::pow(b, 4) - std::pow(d, 4);
  return (W.w0() * inner + W.winf() * outer) / (inner + outer);
}

Tridiagonal assemble_radial_1d(double r_max, std::size_t nr, const StepRadialPotential& W) {
  if (!(r_max > 0.0) || nr < 2) throw PreconditionError("assemble_radial_1d: need r_max > 0 and nr >= 2");
  const double hr = r_max / static_cast<double>(nr);
  Eigen::VectorXd v(static_cast<Eigen::Index>(nr));
  for (std::size_t i = 0; i < nr; ++i) {
    v[static_cast<Eigen::Index>(i)] =
        step_cell_average(W, static_cast<double>(i) * hr, static_cast<double>(i + 1) * hr);
  }
  return radial_tridiagonal(r_max, nr, v);
}

std::size_t sturm_count(const Tridiagonal& t, double x) {
  const Eigen::Index n = t.diag.size();
  const double pivmin = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  std::size_t count = 0;
  double q = t.diag[0] - x;
  for (Eigen::Index i = 0;; ++i) {
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
    if (i + 1 == n) break;
    q = t.diag[i + 1] - x - t.off[i] * t.off[i] / q;
  }
  return count;
}

double tridiagonal_eigenvalue(const Tridiagonal& t, std::size_t k) {
  const Eigen::Index n = t.diag.size();
  if (static_cast<Eigen::Index>(k) >= n) throw PreconditionError("tridiagonal_eigenvalue: index out of range");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double rad = (i > 0 ? std::abs(t.off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(t.off[i]) : 0.0);
    lo = std::min(lo, t.diag[i] - rad);
    hi = std::max(hi, t.diag[i] + rad);
  }
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(t, mid) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace curlgap
