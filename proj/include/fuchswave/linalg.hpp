#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace fuchswave {

using cd = std::complex<double>;
using Matrix2cd = Eigen::Matrix2cd;
using Vector2cd = Eigen::Vector2cd;
using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;

constexpr cd kI{0.0, 1.0};

// spectral norm
inline double op_norm(const Matrix2cd& a) {
  // largest eigenvalue of the Hermitian a^H a, closed form
  Matrix2cd g = a.adjoint() * a;
  double p = 0.5 * (g(0, 0).real() + g(1, 1).real());
  double q = 0.5 * (g(0, 0).real() - g(1, 1).real());
  double r = std::sqrt(q * q + std::norm(g(0, 1)));
  return std::sqrt(std::max(p + r, 0.0));
}

inline double op_norm(const MatrixXcd& a) {
  if (a.rows() == 2 && a.cols() == 2) return op_norm(Matrix2cd(a));
  Eigen::JacobiSVD<MatrixXcd> svd(a);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

}  // namespace fuchswave
