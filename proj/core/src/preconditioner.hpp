#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "curlgap/discrete_operator.hpp"

namespace curlgap::detail {

// Inverse of a separable model of the symmetrized operator,
//   T = (S_r + diag(mean_z V)) (x) I + I (x) S_z + c,
// diagonalized in x3 by a sine transform (DST-II / DST-III pair) and solved
// by tridiagonal elimination in r for each sine mode. The shift c puts the
// smallest eigenvalue of T at `floor`.
class SeparablePreconditioner {
 public:
  SeparablePreconditioner(const DiscreteOperator& op, double floor);
  ~SeparablePreconditioner();
  SeparablePreconditioner(const SeparablePreconditioner&) = delete;
  SeparablePreconditioner& operator=(const SeparablePreconditioner&) = delete;

  // out = T^{-1} in, column by column. Safe to call concurrently.
  void apply(const Eigen::MatrixXd& in, Eigen::MatrixXd& out) const;

  double model_min_eigenvalue() const { return model_min_; }

 private:
  std::size_t nr_;
  std::size_t nz_;
  Eigen::VectorXd off_;          // radial off-diagonal
  std::vector<double> inv_piv_;  // 1 / LDL^T pivots, laid out like a field [i * nz + m]
  std::vector<double> mult_;     // elimination multipliers, same layout
  double model_min_ = 0.0;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

}  // namespace curlgap::detail
