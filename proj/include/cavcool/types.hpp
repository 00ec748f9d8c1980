#pragma once

#include <complex>

#include <Eigen/Dense>

namespace cavcool {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

}  // namespace cavcool
