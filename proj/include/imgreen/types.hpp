#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace imgreen {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEulerGamma = std::numbers::egamma;
inline constexpr cplx kI{0.0, 1.0};

}  // namespace imgreen
