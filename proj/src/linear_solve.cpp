#include "mininfo/linear_solve.hpp"

#include <Eigen/LU>
#include <Eigen/SparseLU>

namespace mininfo {

struct LinearSystem::Impl {
  Eigen::SparseMatrix<double> matrix;
  bool dense = true;
  bool ok = true;
  Eigen::PartialPivLU<Eigen::MatrixXd> dense_lu;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> sparse_lu;

  Eigen::VectorXd raw_solve(const Eigen::VectorXd& rhs) {
    if (dense) return dense_lu.solve(rhs);
    return sparse_lu.solve(rhs);
  }
};

LinearSystem::LinearSystem(const Eigen::SparseMatrix<double>& matrix)
    : impl_(std::make_unique<Impl>()) {
  impl_->matrix = matrix;
  impl_->matrix.makeCompressed();
  const auto n = matrix.rows();
  impl_->dense = n <= kDenseLimit;
  if (n == 0) return;
  if (impl_->dense) {
    Eigen::MatrixXd dense = Eigen::MatrixXd(impl_->matrix);
    impl_->dense_lu.compute(dense);
    // PartialPivLU never reports failure; test the pivots directly.
    const auto& lu = impl_->dense_lu.matrixLU();
    const double scale = std::max(1.0, dense.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(lu(i, i)) <= 1e-13 * scale) impl_->ok = false;
    }
  } else {
    impl_->sparse_lu.compute(impl_->matrix);
    impl_->ok = impl_->sparse_lu.info() == Eigen::Success;
  }
}

LinearSystem::~LinearSystem() = default;
LinearSystem::LinearSystem(LinearSystem&&) noexcept = default;
LinearSystem& LinearSystem::operator=(LinearSystem&&) noexcept = default;

bool LinearSystem::ok() const { return impl_->ok; }

Eigen::VectorXd LinearSystem::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() == 0) return rhs;
  Eigen::VectorXd x = impl_->raw_solve(rhs);
  const Eigen::VectorXd residual = rhs - impl_->matrix * x;
  if (residual.lpNorm<Eigen::Infinity>() > 1e-10) x += impl_->raw_solve(residual);
  return x;
}

Eigen::MatrixXd LinearSystem::solve_columns(const Eigen::MatrixXd& rhs) const {
  if (rhs.size() == 0) return rhs;
  if (impl_->dense) {
    Eigen::MatrixXd x = impl_->dense_lu.solve(rhs);
    const Eigen::MatrixXd residual = rhs - impl_->matrix * x;
    if (residual.lpNorm<Eigen::Infinity>() > 1e-10) x += impl_->dense_lu.solve(residual);
    return x;
  }
  Eigen::MatrixXd x(rhs.rows(), rhs.cols());
  for (Eigen::Index j = 0; j < rhs.cols(); ++j) x.col(j) = solve(rhs.col(j));
  return x;
}

}  // namespace mininfo
