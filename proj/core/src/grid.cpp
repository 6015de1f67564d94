#include "curlgap/grid.hpp"

#include <cmath>

#include "curlgap/errors.hpp"

namespace curlgap {

CylGrid::CylGrid(double r_max, double z_half, std::size_t nr, std::size_t nz)
    : r_max_(r_max), z_half_(z_half), nr_(nr), nz_(nz) {
  if (!(r_max > 0.0) || !(z_half > 0.0) || !std::isfinite(r_max) || !std::isfinite(z_half)) {
    throw PreconditionError("CylGrid: r_max and z_half must be positive and finite");
  }
  if (nr < 2 || nz < 2) throw PreconditionError("CylGrid: need nr >= 2 and nz >= 2");
  hr_ = r_max / static_cast<double>(nr);
  hz_ = 2.0 * z_half / static_cast<double>(nz);
}

double CylGrid::radial_mass(std::size_t i) const {
  const double ri = r(i);
  return ri * ri * ri + 0.25 * ri * hr_ * hr_;
}

Eigen::VectorXd CylGrid::weights() const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < nr_; ++i) {
    const double wi = weight(i, 0);
    w.segment(static_cast<Eigen::Index>(i * nz_), static_cast<Eigen::Index>(nz_)).setConstant(wi);
  }
  return w;
}

Eigen::VectorXd CylGrid::sample(const Sampler& f) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < nr_; ++i) {
    for (std::size_t j = 0; j < nz_; ++j) out[static_cast<Eigen::Index>(index(i, j))] = f(r(i), z(j));
  }
  return out;
}

Field::Field(const CylGrid& grid) : grid_(grid), values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()))) {}

Field::Field(const CylGrid& grid, Eigen::VectorXd values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != static_cast<Eigen::Index>(grid_.size())) {
    throw GridMismatchError("Field: value count does not match the grid");
  }
}

Field::Field(const CylGrid& grid, const Sampler& f) : grid_(grid), values_(grid.sample(f)) {}

double weighted_inner(const Field& u, const Field& v) {
  if (!(u.grid() == v.grid())) throw GridMismatchError("weighted_inner: fields live on different grids");
  const auto& g = u.grid();
  double total = 0.0;
  for (std::size_t i = 0; i < g.nr(); ++i) {
    const auto seg = static_cast<Eigen::Index>(i * g.nz());
    const auto n = static_cast<Eigen::Index>(g.nz());
    total += g.weight(i, 0) * u.values().segment(seg, n).dot(v.values().segment(seg, n));
  }
  return total;
}

double weighted_norm(const Field& u) { return std::sqrt(weighted_inner(u, u)); }

}  // namespace curlgap
