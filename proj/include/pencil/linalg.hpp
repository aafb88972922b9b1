#pragma once

#include <Eigen/Dense>
#include <complex>

namespace pencil::linalg {

/// Determinant by LU with partial pivoting.
inline std::complex<double> determinant(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 1.0;
  return m.partialPivLu().determinant();
}

/// Singular values, descending.
inline Eigen::VectorXd singular_values(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return {};
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues();
}

}  // namespace pencil::linalg
