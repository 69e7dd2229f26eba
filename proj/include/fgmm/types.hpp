#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fgmm {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Complex = std::complex<Scalar>;
template <typename Scalar>
using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using Vectord = Vector<double>;
using Matrixd = Matrix<double>;
using CVectord = CVector<double>;
using CMatrixd = CMatrix<double>;

/// Tolerance that is `tol` for double and never below a few ulps of Scalar.
template <typename Scalar>
constexpr Scalar scaled_tol(double tol) {
  const Scalar floor = Scalar(64) * std::numeric_limits<Scalar>::epsilon();
  return Scalar(tol) > floor ? Scalar(tol) : floor;
}

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace fgmm
