#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace fracflow {

/// In-place-free inverse of a small k x k matrix stored row-major. Rejects
/// badly conditioned blocks (Frobenius condition estimate > 1e8).
inline void invert_small(const double* a, double* inv, int k,
                         const char* what = "degenerate metric") {
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Mat> A(a, k, k);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) throw std::runtime_error(what);
  Eigen::MatrixXd Ainv = lu.inverse();
  const double cond = A.norm() * Ainv.norm();
  if (!(cond < 1e8)) throw std::runtime_error(what);
  Eigen::Map<Mat>(inv, k, k) = Ainv;
}

inline double det_small(const double* a, int k) {
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Mat> A(a, k, k);
  return A.determinant();
}

/// Min/max eigenvalues of a small symmetric matrix, row-major.
inline void sym_eig_range(const double* a, int k, double& mn, double& mx) {
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Mat> A(a, k, k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  mn = es.eigenvalues().minCoeff();
  mx = es.eigenvalues().maxCoeff();
}

}  // namespace fracflow
