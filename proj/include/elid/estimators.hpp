#pragma once

#include "elid/types.hpp"

namespace elid {

// ---------------------------------------------------------------------------
// Parameter update laws. These return time derivatives; integration happens
// with the same fixed step as the plant, inside the coupled system.
// ---------------------------------------------------------------------------

/// Vector gradient on an n x W regression equation:
///   theta_hat_dot = Gain * Reg' (Y - Reg theta_hat).
template <int W>
struct VectorGradientState {
  Eigen::Matrix<double, W, 1> theta_hat = Eigen::Matrix<double, W, 1>::Zero();
  Eigen::Matrix<double, W, W> gain = 25.0 * Eigen::Matrix<double, W, W>::Identity();
};

template <int W, int N>
Eigen::Matrix<double, W, 1> vector_gradient_deriv(const VectorGradientState<W>& s,
                                                  const Eigen::Matrix<double, N, 1>& y,
                                                  const Eigen::Matrix<double, N, W>& reg) {
  return s.gain * (reg.transpose() * (y - reg * s.theta_hat));
}

/// Scalar gradient for one mixed equation ycal = delta * theta. The plain
/// form is the default; `normalized` divides the update by 1 + delta^2.
struct ScalarGradientState {
  double theta_hat = 0.0;
  double gain = 25.0;
  bool normalized = false;
};

inline double drem_gradient_deriv(const ScalarGradientState& s, double ycal, double delta) {
  const double update = s.gain * delta * (ycal - delta * s.theta_hat);
  return s.normalized ? update / (1.0 + delta * delta) : update;
}

/// Normalized gradient on the generated equation Y = Phi21 * theta:
///   theta_hat_dot = gain * Phi21 / (1 + Phi21^2) (Y - Phi21 theta_hat).
inline double newlre_gradient_deriv(const ScalarGradientState& s, double y, double phi21) {
  return s.gain * phi21 / (1.0 + phi21 * phi21) * (y - phi21 * s.theta_hat);
}

}  // namespace elid
