#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Core>

namespace curlgap {

// Sampler of a scalar coefficient in cylindrical coordinates (r, x3).
using Sampler = std::function<double(double r, double x3)>;

// Cell-centered grid on (0, r_max) x (-z_half, z_half). Node (i, j) has flat
// index i * nz + j, so x3 varies fastest.
class CylGrid {
 public:
  CylGrid(double r_max, double z_half, std::size_t nr, std::size_t nz);

  double r_max() const { return r_max_; }
  double z_half() const { return z_half_; }
  std::size_t nr() const { return nr_; }
  std::size_t nz() const { return nz_; }
  std::size_t size() const { return nr_ * nz_; }
  double hr() const { return hr_; }
  double hz() const { return hz_; }

  double r(std::size_t i) const { return (static_cast<double>(i) + 0.5) * hr_; }
  double z(std::size_t j) const { return -z_half_ + (static_cast<double>(j) + 0.5) * hz_; }
  std::size_t index(std::size_t i, std::size_t j) const { return i * nz_ + j; }

  // Mean of r^3 over radial cell i: r_i^3 + r_i hr^2 / 4.
  double radial_mass(std::size_t i) const;
  // Quadrature weight of node (i, j): the exact integral of r^3 over its cell.
  double weight(std::size_t i, std::size_t /*j*/) const { return radial_mass(i) * hr_ * hz_; }
  Eigen::VectorXd weights() const;

  // Samples f at every node in index order.
  Eigen::VectorXd sample(const Sampler& f) const;

  friend bool operator==(const CylGrid& a, const CylGrid& b) {
    return a.r_max_ == b.r_max_ && a.z_half_ == b.z_half_ && a.nr_ == b.nr_ && a.nz_ == b.nz_;
  }

 private:
  double r_max_;
  double z_half_;
  std::size_t nr_;
  std::size_t nz_;
  double hr_;
  double hz_;
};

// Scalar profile u on a grid; the 3D field is u(r, x3) (-x2, x1, 0).
class Field {
 public:
  explicit Field(const CylGrid& grid);
  Field(const CylGrid& grid, Eigen::VectorXd values);
  Field(const CylGrid& grid, const Sampler& f);

  const CylGrid& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  double operator()(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[grid_.index(i, j)]; }

  bool all_finite() const { return values_.allFinite(); }

 private:
  CylGrid grid_;
  Eigen::VectorXd values_;
};

// sum over nodes of w u v; throws GridMismatchError for different grids.
double weighted_inner(const Field& u, const Field& v);
double weighted_norm(const Field& u);

}  // namespace curlgap
