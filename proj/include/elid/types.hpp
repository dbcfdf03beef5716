#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace elid {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Mat25 = Eigen::Matrix<double, 2, 5>;

inline constexpr double kGravity = 9.81;  // m/s^2

// Reciprocal condition number below which an inertia matrix is treated as singular.
inline constexpr double kMinInertiaRcond = 1e-12;

/// Thrown when a numerical precondition fails (near-singular inertia,
/// non-finite state during integration).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class Model>
using VecQ = Eigen::Matrix<double, Model::kDof, 1>;
template <class Model>
using MatQ = Eigen::Matrix<double, Model::kDof, Model::kDof>;
template <class Model>
using VecW = Eigen::Matrix<double, Model::kParams, 1>;
template <class Model>
using RegressorMat = Eigen::Matrix<double, Model::kDof, Model::kParams>;

template <int Dof>
struct ElStateT {
  Eigen::Matrix<double, Dof, 1> q;   // joint angles [rad]
  Eigen::Matrix<double, Dof, 1> qd;  // joint velocities [rad/s]
};

using ELState = ElStateT<2>;

}  // namespace elid
