#include "preconditioner.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "curlgap/errors.hpp"

namespace curlgap::detail {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(static_cast<double*>(fftw_malloc(sizeof(double) * n))) {
    if (data == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  double* data;
};

}  // namespace

struct SeparablePreconditioner::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward != nullptr) fftw_destroy_plan(forward);
    if (backward != nullptr) fftw_destroy_plan(backward);
  }
};

SeparablePreconditioner::SeparablePreconditioner(const DiscreteOperator& op, double floor)
    : nr_(op.grid().nr()), nz_(op.grid().nz()), plans_(std::make_unique<Plans>()) {
  if (!(floor > 0.0)) throw PreconditionError("SeparablePreconditioner: floor must be positive");
  const auto& g = op.grid();
  const auto nr = static_cast<Eigen::Index>(nr_);
  const auto nz = static_cast<Eigen::Index>(nz_);

  Eigen::VectorXd vbar(nr);
  for (Eigen::Index i = 0; i < nr; ++i) vbar[i] = op.potential().segment(i * nz, nz).mean();
  const Tridiagonal radial = radial_tridiagonal(g.r_max(), nr_, vbar);
  off_ = radial.off;

  const double hz = g.hz();
  std::vector<double> lambda_z(nz_);
  for (std::size_t m = 0; m < nz_; ++m) {
    const double s = std::sin(std::numbers::pi * static_cast<double>(m + 1) / (2.0 * static_cast<double>(nz_)));
    lambda_z[m] = 4.0 * s * s / (hz * hz);
  }
  const double shift = floor - (tridiagonal_eigenvalue(radial, 0) + lambda_z[0]);
  model_min_ = floor;

  inv_piv_.resize(nr_ * nz_);
  mult_.resize(nr_ * nz_);
  std::vector<double> piv(nz_);
  for (std::size_t m = 0; m < nz_; ++m) {
    piv[m] = radial.diag[0] + lambda_z[m] + shift;
    inv_piv_[m] = 1.0 / piv[m];
    mult_[m] = 0.0;
  }
  for (std::size_t i = 1; i < nr_; ++i) {
    const double e = radial.off[static_cast<Eigen::Index>(i - 1)];
    const double d = radial.diag[static_cast<Eigen::Index>(i)] + shift;
    for (std::size_t m = 0; m < nz_; ++m) {
      const double l = e / piv[m];
      piv[m] = d + lambda_z[m] - l * e;
      mult_[i * nz_ + m] = l;
      inv_piv_[i * nz_ + m] = 1.0 / piv[m];
    }
  }

  FftwBuffer a(nr_ * nz_);
  FftwBuffer b(nr_ * nz_);
  const int n = static_cast<int>(nz_);
  const int howmany = static_cast<int>(nr_);
  const fftw_r2r_kind fwd = FFTW_RODFT10;
  const fftw_r2r_kind bwd = FFTW_RODFT01;
  std::lock_guard lock(planner_mutex());
  plans_->forward = fftw_plan_many_r2r(1, &n, howmany, a.data, nullptr, 1, n, b.data, nullptr, 1, n, &fwd,
                                       FFTW_ESTIMATE);
  plans_->backward = fftw_plan_many_r2r(1, &n, howmany, b.data, nullptr, 1, n, a.data, nullptr, 1, n, &bwd,
                                        FFTW_ESTIMATE);
  if (plans_->forward == nullptr || plans_->backward == nullptr) {
    throw std::runtime_error("SeparablePreconditioner: FFTW planning failed");
  }
}

SeparablePreconditioner::~SeparablePreconditioner() = default;

void SeparablePreconditioner::apply(const Eigen::MatrixXd& in, Eigen::MatrixXd& out) const {
  const std::size_t n = nr_ * nz_;
  if (static_cast<std::size_t>(in.rows()) != n) throw GridMismatchError("SeparablePreconditioner: size mismatch");
  out.resize(in.rows(), in.cols());
  FftwBuffer a(n);
  FftwBuffer b(n);
  const double scale = 1.0 / (2.0 * static_cast<double>(nz_));
  for (Eigen::Index col = 0; col < in.cols(); ++col) {
    Eigen::Map<Eigen::VectorXd>(a.data, static_cast<Eigen::Index>(n)) = in.col(col);
    fftw_execute_r2r(plans_->forward, a.data, b.data);
    double* y = b.data;
    for (std::size_t i = 1; i < nr_; ++i) {
      double* row = y + i * nz_;
      const double* prev = row - nz_;
      const double* l = mult_.data() + i * nz_;
      for (std::size_t m = 0; m < nz_; ++m) row[m] -= l[m] * prev[m];
    }
    {
      double* row = y + (nr_ - 1) * nz_;
      const double* ip = inv_piv_.data() + (nr_ - 1) * nz_;
      for (std::size_t m = 0; m < nz_; ++m) row[m] *= ip[m];
    }
    for (std::size_t i = nr_ - 1; i-- > 0;) {
      double* row = y + i * nz_;
      const double* next = row + nz_;
      const double e = off_[static_cast<Eigen::Index>(i)];
      const double* ip = inv_piv_.data() + i * nz_;
      for (std::size_t m = 0; m < nz_; ++m) row[m] = (row[m] - e * next[m]) * ip[m];
    }
    fftw_execute_r2r(plans_->backward, b.data, a.data);
    out.col(col) = scale * Eigen::Map<const Eigen::VectorXd>(a.data, static_cast<Eigen::Index>(n));
  }
}

}  // namespace curlgap::detail
