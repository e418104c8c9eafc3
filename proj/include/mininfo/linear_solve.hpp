#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace mininfo {

/// Square linear solver: dense LU up to `kDenseLimit` unknowns, sparse LU
/// beyond. A single refinement pass is applied when the residual exceeds
/// 1e-10.
class LinearSystem {
 public:
  static constexpr int kDenseLimit = 2000;

  explicit LinearSystem(const Eigen::SparseMatrix<double>& matrix);
  ~LinearSystem();
  LinearSystem(LinearSystem&&) noexcept;
  LinearSystem& operator=(LinearSystem&&) noexcept;

  /// False when the factorization detected a singular matrix.
  [[nodiscard]] bool ok() const;
  [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  /// Solves for every column of `rhs` with the same factorization.
  [[nodiscard]] Eigen::MatrixXd solve_columns(const Eigen::MatrixXd& rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mininfo
