#pragma once

#include <cmath>
#include <numbers>

#include "elid/el_model.hpp"
#include "elid/types.hpp"

namespace elid {

// ---------------------------------------------------------------------------
// Slotine-Li tracking controller and its reference signals. The control is
// evaluated in regressor form
//
//   tau = Yr(q, qd, qd_ref, qdd_ref) theta_used - K1 s,
//
// which never inverts the estimated inertia matrix, so theta_hat(0) = 0 is a
// legal starting point for the certainty-equivalent loop. The sign of the
// K1 s term is the one that yields the closed loop M sdot + (C + K1) s = 0.
// ---------------------------------------------------------------------------

struct ControllerGains {
  Vec2 k1 = Vec2(7.0, 7.0);  // diagonal of K1
  Vec2 k2 = Vec2(4.0, 4.0);  // diagonal of K2

  bool valid() const { return (k1.array() > 0.0).all() && (k2.array() > 0.0).all(); }
};

enum class ReferenceKind { kRegulation, kTracking };

struct ReferencePoint {
  Vec2 q;
  Vec2 qd;
  Vec2 qdd;
};

inline Vec2 default_regulation_target() {
  return Vec2(0.2 * std::numbers::pi, 0.3 * std::numbers::pi);
}

/// Regulation holds a constant target; tracking follows two incommensurate
/// sinusoid sums, with analytic derivatives.
inline ReferencePoint reference_signals(ReferenceKind kind, double t,
                                        const Vec2& regulation_target = default_regulation_target()) {
  if (kind == ReferenceKind::kRegulation)
    return {regulation_target, Vec2::Zero(), Vec2::Zero()};
  constexpr double pi = std::numbers::pi;
  ReferencePoint r;
  r.q << 0.4 * pi * std::sin(0.4 * t) + 0.3 * pi * std::sin(0.3 * t) + 0.2 * pi,
      0.3 * pi * std::cos(0.3 * t) - 0.1 * pi * std::cos(0.5 * t) + 0.3 * pi;
  r.qd << 0.16 * pi * std::cos(0.4 * t) + 0.09 * pi * std::cos(0.3 * t),
      -0.09 * pi * std::sin(0.3 * t) + 0.05 * pi * std::sin(0.5 * t);
  r.qdd << -0.064 * pi * std::sin(0.4 * t) - 0.027 * pi * std::sin(0.3 * t),
      -0.027 * pi * std::cos(0.3 * t) + 0.025 * pi * std::cos(0.5 * t);
  return r;
}

struct TrackingErrors {
  Vec2 q_err;    // q - q*
  Vec2 qd_err;   // qd - qd*
  Vec2 qd_ref;   // qd* - K2 q_err
  Vec2 qdd_ref;  // qdd* - K2 qd_err
  Vec2 s;        // qd_err + K2 q_err == qd - qd_ref
};

inline TrackingErrors tracking_errors(const ELState& state, const ReferencePoint& ref,
                                      const Vec2& k2) {
  TrackingErrors e;
  e.q_err = state.q - ref.q;
  e.qd_err = state.qd - ref.qd;
  e.qd_ref = ref.qd - k2.cwiseProduct(e.q_err);
  e.qdd_ref = ref.qdd - k2.cwiseProduct(e.qd_err);
  e.s = e.qd_err + k2.cwiseProduct(e.q_err);
  return e;
}

/// Columns multiply theta so that Yr theta = M qdd_ref + C qd_ref + grad U.
template <class Model>
RegressorMat<Model> slotine_li_regressor(const Model& model, const VecQ<Model>& q,
                                         const VecQ<Model>& qd, const VecQ<Model>& qd_ref,
                                         const VecQ<Model>& qdd_ref) {
  RegressorMat<Model> yr;
  for (int i = 0; i < Model::kInertiaBasis; ++i)
    yr.col(i) = model.inertia_basis(q, i) * qdd_ref +
                inertia_basis_coriolis(model, q, qd, i) * qd_ref;
  for (int j = 0; j < Model::kPotentialBasis; ++j)
    yr.col(Model::kInertiaBasis + j) = model.potential_basis_grad(q, j);
  return yr;
}

template <class Model>
VecQ<Model> slotine_li(const Model& model, const ElStateT<Model::kDof>& state,
                       const VecW<Model>& theta_used, const ControllerGains& gains,
                       const ReferencePoint& ref) {
  const TrackingErrors e = tracking_errors(state, ref, gains.k2);
  return slotine_li_regressor(model, state.q, state.qd, e.qd_ref, e.qdd_ref) * theta_used -
         gains.k1.cwiseProduct(e.s);
}

}  // namespace elid
