// Thin Eigen aliases plus the matrix norms used throughout the bounds.
#ifndef GCNBOUND_LINALG_HPP
#define GCNBOUND_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace gcnbound {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Largest singular value (spectral / operator 2-norm).
inline double spectral_norm(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

// Induced infinity norm: maximum absolute row sum.
inline double inf_norm(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

inline double frobenius_sq(const Matrix& m) { return m.squaredNorm(); }

}  // namespace gcnbound

#endif  // GCNBOUND_LINALG_HPP
