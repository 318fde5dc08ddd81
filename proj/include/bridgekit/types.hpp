#pragma once

#include <complex>

#include <Eigen/Dense>

namespace bridgekit {

using Complex = std::complex<double>;

/// State vectors live in C^n; real signals embed with zero imaginary part.
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

} // namespace bridgekit
