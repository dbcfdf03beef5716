#pragma once

#include <array>
#include <cmath>

#include "elid/types.hpp"

namespace elid {

// ---------------------------------------------------------------------------
// Simple Euler-Lagrange systems with a linearly parameterized inertia matrix
// and potential energy:
//
//   M(q)     = sum_i m_i(q) * theta_i          (i = 0 .. kInertiaBasis-1)
//   U(q)     = sum_j U_j(q) * theta_{l+j}      (j = 0 .. kPotentialBasis-1)
//   T(q,qd)  = 1/2 qd' M(q) qd
//
// A model supplies the basis matrices/functions and their gradients; every
// quantity below (inertia, Coriolis matrix, gravity, forward dynamics,
// energy, regressor inputs) is derived from the basis. Fully actuated
// systems only: the input matrix is the identity.
// ---------------------------------------------------------------------------

struct RobotGeometry {
  double l1;  // link lengths [m]
  double l2;
  double m1;  // link masses [kg]
  double m2;
  double g = kGravity;
};

/// Two-link planar manipulator with point masses at the link tips.
/// Lumped parameters:
///   theta = ( l2^2 m2 + l1^2 (m1+m2), l1 l2 m2, l2^2 m2, l2 m2, l1 (m1+m2) )
struct Planar2Dof {
  static constexpr int kDof = 2;
  static constexpr int kInertiaBasis = 3;
  static constexpr int kPotentialBasis = 2;
  static constexpr int kParams = kInertiaBasis + kPotentialBasis;

  double g = kGravity;

  Mat2 inertia_basis(const Vec2& q, int i) const {
    Mat2 m;
    switch (i) {
      case 0:
        m << 1.0, 0.0, 0.0, 0.0;
        break;
      case 1:
        m << 2.0, 1.0, 1.0, 0.0;
        m *= std::cos(q(1));
        break;
      default:
        m << 0.0, 1.0, 1.0, 1.0;
        break;
    }
    return m;
  }

  // d m_i / d q_k
  Mat2 inertia_basis_dq(const Vec2& q, int i, int k) const {
    Mat2 m = Mat2::Zero();
    if (i == 1 && k == 1) {
      m << 2.0, 1.0, 1.0, 0.0;
      m *= -std::sin(q(1));
    }
    return m;
  }

  double potential_basis(const Vec2& q, int j) const {
    if (j == 0) return g * (1.0 + std::sin(q(0) + q(1)));
    return g * (1.0 + std::sin(q(0)));
  }

  Vec2 potential_basis_grad(const Vec2& q, int j) const {
    if (j == 0) {
      const double c12 = std::cos(q(0) + q(1));
      return Vec2(g * c12, g * c12);
    }
    return Vec2(g * std::cos(q(0)), 0.0);
  }
};

/// Lumped parameter vector of the two-link arm from its physical geometry.
/// A massless first link (m1 == 0) is accepted; everything else must be
/// strictly positive.
inline Vec5 theta_from_geometry(const RobotGeometry& geo) {
  if (!(geo.l1 > 0.0) || !(geo.l2 > 0.0))
    throw std::invalid_argument("theta_from_geometry: link lengths must be positive");
  if (!(geo.m1 >= 0.0) || !(geo.m2 > 0.0))
    throw std::invalid_argument("theta_from_geometry: masses must be positive (m1 may be zero)");
  if (!(geo.g > 0.0)) throw std::invalid_argument("theta_from_geometry: g must be positive");
  Vec5 theta;
  theta << geo.l2 * geo.l2 * geo.m2 + geo.l1 * geo.l1 * (geo.m1 + geo.m2),
      geo.l1 * geo.l2 * geo.m2, geo.l2 * geo.l2 * geo.m2, geo.l2 * geo.m2,
      geo.l1 * (geo.m1 + geo.m2);
  return theta;
}

/// Positive definiteness of M(q) over the whole workspace. det M is quadratic
/// in c = cos(q2) with negative curvature, so checking the endpoints c = +/-1
/// is exact.
inline bool theta_physically_valid(const Vec5& theta) {
  if (!(theta(0) > 0.0) || !(theta(2) > 0.0)) return false;
  for (const double c : {1.0, -1.0}) {
    const double coupling = theta(2) + theta(1) * c;
    const double det = (theta(0) + 2.0 * theta(1) * c) * theta(2) - coupling * coupling;
    if (!(det > 0.0)) return false;
  }
  return true;
}

template <class Model>
MatQ<Model> inertia_matrix(const Model& model, const VecQ<Model>& q, const VecW<Model>& theta) {
  MatQ<Model> m = MatQ<Model>::Zero();
  for (int i = 0; i < Model::kInertiaBasis; ++i) m += model.inertia_basis(q, i) * theta(i);
  return m;
}

template <class Model>
double potential(const Model& model, const VecQ<Model>& q, const VecW<Model>& theta) {
  double u = 0.0;
  for (int j = 0; j < Model::kPotentialBasis; ++j)
    u += model.potential_basis(q, j) * theta(Model::kInertiaBasis + j);
  return u;
}

template <class Model>
VecQ<Model> gravity_vector(const Model& model, const VecQ<Model>& q, const VecW<Model>& theta) {
  VecQ<Model> g = VecQ<Model>::Zero();
  for (int j = 0; j < Model::kPotentialBasis; ++j)
    g += model.potential_basis_grad(q, j) * theta(Model::kInertiaBasis + j);
  return g;
}

/// Christoffel-symbol Coriolis matrix of one inertia basis element, so that
/// C(q,qd) = sum_i C_i(q,qd) theta_i is linear in the parameters and
/// dM/dt - 2C is skew-symmetric.
template <class Model>
MatQ<Model> inertia_basis_coriolis(const Model& model, const VecQ<Model>& q,
                                   const VecQ<Model>& qd, int i) {
  constexpr int n = Model::kDof;
  std::array<MatQ<Model>, n> dm;
  for (int k = 0; k < n; ++k) dm[k] = model.inertia_basis_dq(q, i, k);
  MatQ<Model> c;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += 0.5 * (dm[k](a, b) + dm[b](a, k) - dm[a](b, k)) * qd(k);
      c(a, b) = acc;
    }
  return c;
}

template <class Model>
MatQ<Model> coriolis_matrix(const Model& model, const VecQ<Model>& q, const VecQ<Model>& qd,
                            const VecW<Model>& theta) {
  MatQ<Model> c = MatQ<Model>::Zero();
  for (int i = 0; i < Model::kInertiaBasis; ++i)
    c += inertia_basis_coriolis(model, q, qd, i) * theta(i);
  return c;
}

/// Component k equals qd' (d m_i/d q_k) qd; used by the classical regressor.
template <class Model>
VecQ<Model> kinetic_gradient(const Model& model, const VecQ<Model>& q, const VecQ<Model>& qd,
                             int i) {
  VecQ<Model> grad;
  for (int k = 0; k < Model::kDof; ++k)
    grad(k) = qd.dot(model.inertia_basis_dq(q, i, k) * qd);
  return grad;
}

namespace detail {

template <class Model>
void check_inertia_conditioning(const MatQ<Model>& m) {
  Eigen::SelfAdjointEigenSolver<MatQ<Model>> es;
  if constexpr (Model::kDof == 2 || Model::kDof == 3) {
    es.computeDirect(m, Eigen::EigenvaluesOnly);
  } else {
    es.compute(m, Eigen::EigenvaluesOnly);
  }
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || !(hi > 0.0) || lo / hi < kMinInertiaRcond)
    throw NumericalError("inertia matrix is not safely positive definite");
}

}  // namespace detail

/// qdd = M(q)^{-1} (tau - C(q,qd) qd - grad U(q) - R qd), with viscous
/// friction coefficients `friction_diag` (zero for the frictionless model).
template <class Model>
VecQ<Model> forward_dynamics(const Model& model, const ElStateT<Model::kDof>& s,
                             const VecQ<Model>& tau, const VecW<Model>& theta,
                             const VecQ<Model>& friction_diag) {
  const MatQ<Model> m = inertia_matrix(model, s.q, theta);
  detail::check_inertia_conditioning<Model>(m);
  const VecQ<Model> rhs = tau - coriolis_matrix(model, s.q, s.qd, theta) * s.qd -
                          gravity_vector(model, s.q, theta) -
                          friction_diag.cwiseProduct(s.qd);
  return m.llt().solve(rhs);
}

template <class Model>
VecQ<Model> forward_dynamics(const Model& model, const ElStateT<Model::kDof>& s,
                             const VecQ<Model>& tau, const VecW<Model>& theta) {
  return forward_dynamics(model, s, tau, theta, VecQ<Model>::Zero().eval());
}

/// Total mechanical energy T + U.
template <class Model>
double energy(const Model& model, const ElStateT<Model::kDof>& s, const VecW<Model>& theta) {
  return 0.5 * s.qd.dot(inertia_matrix(model, s.q, theta) * s.qd) + potential(model, s.q, theta);
}

/// Energy written against the parameter basis: omega(q,qd)' theta == T + U.
/// Entries are (1/2 qd' m_i qd, ..., U_j, ...).
template <class Model>
VecW<Model> omega(const Model& model, const ElStateT<Model::kDof>& s) {
  VecW<Model> w;
  for (int i = 0; i < Model::kInertiaBasis; ++i)
    w(i) = 0.5 * s.qd.dot(model.inertia_basis(s.q, i) * s.qd);
  for (int j = 0; j < Model::kPotentialBasis; ++j)
    w(Model::kInertiaBasis + j) = model.potential_basis(s.q, j);
  return w;
}

}  // namespace elid
