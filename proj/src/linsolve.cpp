// SPDX-License-Identifier: Apache-2.0
#include "paratime/linsolve.hpp"

namespace paratime {

namespace {

template <typename Mat, typename Vec>
Vec lu_solve_checked(const Mat& A, const Vec& b, const char* what) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw InvalidArgument("dense_solve: shape mismatch");
  Eigen::PartialPivLU<Mat> lu(A);
  const auto diag = lu.matrixLU().diagonal();
  const double scale =
      std::max(A.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
  for (Eigen::Index i = 0; i < diag.size(); ++i)
    if (std::abs(diag(i)) <= 1e-15 * scale) throw FactorizationError(what);
  return lu.solve(b);
}

}  // namespace

Eigen::VectorXd dense_solve(const Eigen::MatrixXd& A,
                            const Eigen::VectorXd& b) {
  return lu_solve_checked(A, b, "dense_solve: matrix is numerically singular");
}

Eigen::VectorXcd dense_solve(const Eigen::MatrixXcd& A,
                             const Eigen::VectorXcd& b) {
  return lu_solve_checked(A, b, "dense_solve: matrix is numerically singular");
}

}  // namespace paratime
