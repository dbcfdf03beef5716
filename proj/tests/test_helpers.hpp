#pragma once

#include <random>

#include "elid/el_model.hpp"
#include "elid/types.hpp"

namespace elid::testing {

inline RobotGeometry nominal_geometry() { return {0.7, 0.8, 1.5, 0.5}; }

inline Vec5 nominal_theta() { return theta_from_geometry(nominal_geometry()); }

struct RandomStates {
  std::mt19937 rng;
  std::uniform_real_distribution<double> angle{-3.0, 3.0};
  std::uniform_real_distribution<double> vel{-2.0, 2.0};

  explicit RandomStates(unsigned seed) : rng(seed) {}

  ELState next() {
    ELState s;
    s.q = Vec2(angle(rng), angle(rng));
    s.qd = Vec2(vel(rng), vel(rng));
    return s;
  }
};

// Single-pendulum model used to exercise the generic EL machinery on a
// second instance: M = theta_1, U = theta_2 (1 - cos q).
struct Pendulum {
  static constexpr int kDof = 1;
  static constexpr int kInertiaBasis = 1;
  static constexpr int kPotentialBasis = 1;
  static constexpr int kParams = 2;

  double g = kGravity;

  Eigen::Matrix<double, 1, 1> inertia_basis(const Eigen::Matrix<double, 1, 1>&, int) const {
    return Eigen::Matrix<double, 1, 1>::Identity();
  }
  Eigen::Matrix<double, 1, 1> inertia_basis_dq(const Eigen::Matrix<double, 1, 1>&, int,
                                               int) const {
    return Eigen::Matrix<double, 1, 1>::Zero();
  }
  double potential_basis(const Eigen::Matrix<double, 1, 1>& q, int) const {
    return g * (1.0 - std::cos(q(0)));
  }
  Eigen::Matrix<double, 1, 1> potential_basis_grad(const Eigen::Matrix<double, 1, 1>& q,
                                                   int) const {
    Eigen::Matrix<double, 1, 1> v;
    v(0) = g * std::sin(q(0));
    return v;
  }
};

}  // namespace elid::testing
