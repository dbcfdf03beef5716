#pragma once

#include "elid/el_model.hpp"
#include "elid/types.hpp"

namespace elid {

// ---------------------------------------------------------------------------
// Filtered linear regression equations. Both realizations use the first-order
// filter H(p) = 1/(p + lambda). Terms of the form p H(p)[x] are realized in
// proper state form
//
//   zdot = -lambda (z + x),    output = z + x,
//
// so no signal is ever differentiated; in particular no joint acceleration is
// read anywhere.
// ---------------------------------------------------------------------------

/// Power-balance LRE:  y = Omega' theta  along plant trajectories, where
///   ydot = -lambda y + qd' tau,   Omega = p H(p)[omega(q, qd)].
/// All filter states start at zero; a plant with nonzero initial energy E0
/// therefore carries a -E0 exp(-lambda t) transient in the identity.
template <class Model>
struct PowerBalanceLre {
  VecW<Model> z = VecW<Model>::Zero();
  double y = 0.0;
};

template <class Model>
VecW<Model> power_balance_regressor(const Model& model, const PowerBalanceLre<Model>& f,
                                    const ElStateT<Model::kDof>& s) {
  return f.z + omega(model, s);
}

template <class Model>
PowerBalanceLre<Model> power_balance_deriv(const Model& model, const PowerBalanceLre<Model>& f,
                                           const ElStateT<Model::kDof>& s,
                                           const VecQ<Model>& tau, double lambda) {
  PowerBalanceLre<Model> d;
  d.z = -lambda * (f.z + omega(model, s));
  d.y = -lambda * f.y + s.qd.dot(tau);
  return d;
}

/// Classical (full equation-of-motion) LRE:  yv = Psi(t) theta, with
///   yvdot = -lambda yv + tau
/// and regressor columns
///   col i   = p H(p)[m_i(q) qd] - H(p)[1/2 grad_q(qd' m_i(q) qd)]
///   col l+j = H(p)[grad U_j(q)].
template <class Model>
struct ClassicalLre {
  Eigen::Matrix<double, Model::kDof, 1> yv =
      Eigen::Matrix<double, Model::kDof, 1>::Zero();
  Eigen::Matrix<double, Model::kDof, Model::kInertiaBasis> z =
      Eigen::Matrix<double, Model::kDof, Model::kInertiaBasis>::Zero();
  Eigen::Matrix<double, Model::kDof, Model::kInertiaBasis> vkin =
      Eigen::Matrix<double, Model::kDof, Model::kInertiaBasis>::Zero();
  Eigen::Matrix<double, Model::kDof, Model::kPotentialBasis> vpot =
      Eigen::Matrix<double, Model::kDof, Model::kPotentialBasis>::Zero();
};

template <class Model>
RegressorMat<Model> classical_regressor(const Model& model, const ClassicalLre<Model>& f,
                                        const ElStateT<Model::kDof>& s) {
  RegressorMat<Model> psi;
  for (int i = 0; i < Model::kInertiaBasis; ++i)
    psi.col(i) = f.z.col(i) + model.inertia_basis(s.q, i) * s.qd + f.vkin.col(i);
  for (int j = 0; j < Model::kPotentialBasis; ++j)
    psi.col(Model::kInertiaBasis + j) = f.vpot.col(j);
  return psi;
}

template <class Model>
ClassicalLre<Model> classical_deriv(const Model& model, const ClassicalLre<Model>& f,
                                    const ElStateT<Model::kDof>& s, const VecQ<Model>& tau,
                                    double lambda) {
  ClassicalLre<Model> d;
  d.yv = -lambda * f.yv + tau;
  for (int i = 0; i < Model::kInertiaBasis; ++i) {
    d.z.col(i) = -lambda * (f.z.col(i) + model.inertia_basis(s.q, i) * s.qd);
    d.vkin.col(i) = -lambda * f.vkin.col(i) - 0.5 * kinetic_gradient(model, s.q, s.qd, i);
  }
  for (int j = 0; j < Model::kPotentialBasis; ++j)
    d.vpot.col(j) = -lambda * f.vpot.col(j) + model.potential_basis_grad(s.q, j);
  return d;
}

/// Friction regressor of the augmented identity y = Omega' theta + w' theta_R
/// for a plant with viscous joint friction R = diag(theta_R):
///   w = H(p)[ (qd_1^2, ..., qd_n^2) ].
template <class Model>
struct FrictionRegressor {
  VecQ<Model> w = VecQ<Model>::Zero();
};

template <class Model>
FrictionRegressor<Model> friction_regressor_deriv(const FrictionRegressor<Model>& f,
                                                  const ElStateT<Model::kDof>& s,
                                                  double lambda) {
  FrictionRegressor<Model> d;
  d.w = -lambda * f.w + s.qd.cwiseProduct(s.qd);
  return d;
}

}  // namespace elid
