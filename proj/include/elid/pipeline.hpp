#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "elid/control.hpp"
#include "elid/drem.hpp"
#include "elid/el_model.hpp"
#include "elid/estimators.hpp"
#include "elid/lre.hpp"
#include "elid/lre_gen.hpp"
#include "elid/types.hpp"

namespace elid {

// ---------------------------------------------------------------------------
// The coupled estimation/control system for the two-link arm, flattened into
// one fixed-size state vector so a single fixed-step integrator advances the
// plant, both regression filters, the mixing extension, the per-parameter
// regressor generators, all three estimator banks and the running
// diagnostics simultaneously.
// ---------------------------------------------------------------------------

enum class InputKind { kTauA, kTauB, kTauC, kClosedRegulation, kClosedTracking };
enum class Parameterization { kPowerBalance, kClassical };
enum class EstimatorKind { kGradient, kDrem, kDremNewLre, kTrueParams };

inline bool is_closed_loop(InputKind k) {
  return k == InputKind::kClosedRegulation || k == InputKind::kClosedTracking;
}

/// Open-loop torque programs. tau_b switches off at t = 2 s; integration
/// aligns a step boundary there.
inline Vec2 input_signal(InputKind kind, double t) {
  switch (kind) {
    case InputKind::kTauA:
      return Vec2(std::exp(-0.4 * t), std::exp(-0.5 * t));
    case InputKind::kTauB:
      return t < 2.0 ? Vec2(1.0, 3.0) : Vec2(0.0, 0.0);
    case InputKind::kTauC:
      return std::cos(4.0 * t) / (2.0 + t) * Vec2(1.0, 3.0);
    default:
      throw std::invalid_argument("input_signal: selector is not an open-loop signal");
  }
}

inline std::vector<double> input_breakpoints(InputKind kind) {
  if (kind == InputKind::kTauB) return {2.0};
  return {};
}

struct PipelineConfig {
  Planar2Dof model;
  Vec5 theta_true = theta_from_geometry({0.7, 0.8, 1.5, 0.5});

  InputKind input = InputKind::kTauB;
  Parameterization parameterization = Parameterization::kPowerBalance;
  EstimatorKind active_estimator = EstimatorKind::kDremNewLre;

  double lambda = 1.0;    // regression filter pole
  double lambda_e = 1.0;  // extension filter pole
  PumpDampConfig pump;

  double gamma_gradient = 25.0;  // Gamma = gamma_gradient * I
  double gamma_drem = 25.0;
  double gamma_newlre = 25.0;
  bool drem_normalized = false;

  ControllerGains gains;
  Vec2 regulation_target = default_regulation_target();

  bool friction = false;
  Vec2 friction_diag = Vec2::Zero();

  Vec2 q0 = Vec2(0.6 * std::numbers::pi, 0.7 * std::numbers::pi);
  Vec2 qd0 = Vec2::Zero();
  Vec5 theta_hat0 = Vec5::Zero();
};

struct PipelineLayout {
  static constexpr int kQ = 0;             // 2
  static constexpr int kQd = 2;            // 2
  static constexpr int kPbZ = 4;           // 5
  static constexpr int kPbY = 9;           // 1
  static constexpr int kClY = 10;          // 2
  static constexpr int kClZ = 12;          // 2x3
  static constexpr int kClVkin = 18;       // 2x3
  static constexpr int kClVpot = 24;       // 2x2
  static constexpr int kDremZ = 28;        // 5
  static constexpr int kDremPsi = 33;      // 5x5
  static constexpr int kGen = 58;          // 5 x (z, xi_1, xi_2, phi col-major)
  static constexpr int kGenStride = 7;
  static constexpr int kThGrad = 93;       // 5
  static constexpr int kThDrem = 98;       // 5
  static constexpr int kThNew = 103;       // 5
  static constexpr int kFric = 108;        // 2
  static constexpr int kIntDeltaSq = 110;
  static constexpr int kIntAbsAlphaDelta = 111;
  static constexpr int kIntSupplied = 112;  // integral of qd' tau
  static constexpr int kIntU3 = 113;        // 5
  static constexpr int kIntPhi21Sq = 118;   // 5
  static constexpr int kSize = 123;
};

using PipelineState = Eigen::Matrix<double, PipelineLayout::kSize, 1>;

/// Signals evaluated at one (t, x) point: everything the derivative, the
/// recorder and the tests need.
struct PipelineSignals {
  double t;
  ELState state;
  Vec2 tau;
  double energy;

  double y_pb;       // power-balance filtered output
  Vec5 omega_now;    // raw omega(q, qd)
  Vec5 omega_reg;    // Omega = z + omega
  Vec2 y_cl;         // classical filtered output
  Mat25 psi_cl;      // classical regressor

  Vec5 ycal;         // mixed scalar outputs
  double delta;      // mixing determinant
  Mat5 psi_gram;     // extension gram matrix

  double alpha;      // steering function value
  std::array<Steering, 5> steering;
  std::array<GeneratorState, 5> gen;
  Vec5 y_new;        // per-channel generated outputs
  Vec5 phi11;
  Vec5 phi21;

  Vec5 theta_grad;
  Vec5 theta_drem;
  Vec5 theta_new;
  Vec2 friction_reg;

  double int_delta_sq;
  double int_abs_alpha_delta;
  double int_supplied;
  Vec5 int_u3;
  Vec5 int_phi21_sq;

  // Closed-loop bookkeeping (zero in open loop).
  Vec2 q_star = Vec2::Zero();
  Vec2 q_err = Vec2::Zero();
  Vec2 sliding = Vec2::Zero();
};

class Pipeline {
 public:
  using L = PipelineLayout;

  explicit Pipeline(PipelineConfig cfg) : cfg_(std::move(cfg)) {
    if (!cfg_.gains.valid()) throw std::invalid_argument("pipeline: controller gains must be positive");
    if (!(cfg_.lambda > 0.0) || !(cfg_.lambda_e > 0.0))
      throw std::invalid_argument("pipeline: filter poles must be positive");
    if (!(cfg_.pump.beta > 0.0) || !(cfg_.pump.beta < 0.5))
      throw std::invalid_argument("pipeline: beta must lie in (0, 1/2)");
  }

  const PipelineConfig& config() const { return cfg_; }

  PipelineState initial_state() const {
    PipelineState x = PipelineState::Zero();
    x.segment<2>(L::kQ) = cfg_.q0;
    x.segment<2>(L::kQd) = cfg_.qd0;
    for (int ch = 0; ch < 5; ++ch) {
      // phi = I2, stored column-major
      x(L::kGen + ch * L::kGenStride + 3) = 1.0;
      x(L::kGen + ch * L::kGenStride + 6) = 1.0;
    }
    x.segment<5>(L::kThGrad) = cfg_.theta_hat0;
    x.segment<5>(L::kThDrem) = cfg_.theta_hat0;
    x.segment<5>(L::kThNew) = cfg_.theta_hat0;
    return x;
  }

  std::vector<double> breakpoints() const {
    return is_closed_loop(cfg_.input) ? std::vector<double>{} : input_breakpoints(cfg_.input);
  }

  PipelineSignals evaluate(double t, const PipelineState& x) const {
    PipelineSignals sig;
    sig.t = t;
    sig.state.q = x.segment<2>(L::kQ);
    sig.state.qd = x.segment<2>(L::kQd);

    sig.theta_grad = x.segment<5>(L::kThGrad);
    sig.theta_drem = x.segment<5>(L::kThDrem);
    sig.theta_new = x.segment<5>(L::kThNew);

    sig.tau = applied_torque(t, sig);
    sig.energy = energy(cfg_.model, sig.state, cfg_.theta_true);

    // Power-balance LRE.
    sig.omega_now = omega(cfg_.model, sig.state);
    sig.omega_reg = x.segment<5>(L::kPbZ) + sig.omega_now;
    sig.y_pb = x(L::kPbY);

    // Classical LRE.
    ClassicalLre<Planar2Dof> cl = unpack_classical(x);
    sig.y_cl = cl.yv;
    sig.psi_cl = classical_regressor(cfg_.model, cl, sig.state);

    // Mixing.
    DremState<5> drem;
    drem.extended = x.segment<5>(L::kDremZ);
    drem.gram = Eigen::Map<const Mat5>(x.data() + L::kDremPsi);
    sig.psi_gram = drem.gram;
    const MixedLre<5> mixed = mix(drem);
    sig.ycal = mixed.ycal;
    sig.delta = mixed.delta;

    // Generators.
    sig.alpha = cfg_.pump.alpha(t);
    for (int ch = 0; ch < 5; ++ch) {
      sig.gen[ch] = unpack_generator(x, ch);
      sig.steering[ch] =
          pump_damp_signals(sig.gen[ch].phi, sig.delta, sig.alpha, cfg_.pump.beta);
      const NewLre out = new_lre_output(sig.gen[ch]);
      sig.y_new(ch) = out.y;
      sig.phi21(ch) = out.phi21;
      sig.phi11(ch) = sig.gen[ch].phi(0, 0);
    }

    sig.friction_reg = x.segment<2>(L::kFric);
    sig.int_delta_sq = x(L::kIntDeltaSq);
    sig.int_abs_alpha_delta = x(L::kIntAbsAlphaDelta);
    sig.int_supplied = x(L::kIntSupplied);
    sig.int_u3 = x.segment<5>(L::kIntU3);
    sig.int_phi21_sq = x.segment<5>(L::kIntPhi21Sq);

    if (is_closed_loop(cfg_.input)) {
      const ReferencePoint ref = reference(t);
      const TrackingErrors e = tracking_errors(sig.state, ref, cfg_.gains.k2);
      sig.q_star = ref.q;
      sig.q_err = e.q_err;
      sig.sliding = e.s;
    }
    return sig;
  }

  PipelineState deriv(double t, const PipelineState& x) const {
    const PipelineSignals sig = evaluate(t, x);
    PipelineState dx = PipelineState::Zero();

    // Plant.
    const Vec2 qdd = cfg_.friction
                         ? forward_dynamics(cfg_.model, sig.state, sig.tau, cfg_.theta_true,
                                            cfg_.friction_diag)
                         : forward_dynamics(cfg_.model, sig.state, sig.tau, cfg_.theta_true);
    dx.segment<2>(L::kQ) = sig.state.qd;
    dx.segment<2>(L::kQd) = qdd;

    // Power-balance filters.
    dx.segment<5>(L::kPbZ) = -cfg_.lambda * sig.omega_reg;
    dx(L::kPbY) = -cfg_.lambda * sig.y_pb + sig.state.qd.dot(sig.tau);

    // Classical filters.
    const ClassicalLre<Planar2Dof> cl = unpack_classical(x);
    const ClassicalLre<Planar2Dof> dcl =
        classical_deriv(cfg_.model, cl, sig.state, sig.tau, cfg_.lambda);
    pack_classical(dcl, dx);

    // Extension.
    Vec5 dz;
    Mat5 dpsi;
    if (cfg_.parameterization == Parameterization::kPowerBalance) {
      dz = -cfg_.lambda_e * x.segment<5>(L::kDremZ) + sig.omega_reg * sig.y_pb;
      dpsi = -cfg_.lambda_e * sig.psi_gram + sig.omega_reg * sig.omega_reg.transpose();
    } else {
      dz = -cfg_.lambda_e * x.segment<5>(L::kDremZ) + sig.psi_cl.transpose() * sig.y_cl;
      dpsi = -cfg_.lambda_e * sig.psi_gram + sig.psi_cl.transpose() * sig.psi_cl;
    }
    dx.segment<5>(L::kDremZ) = dz;
    Eigen::Map<Mat5>(dx.data() + L::kDremPsi) = dpsi;

    // Generators and their diagnostics.
    for (int ch = 0; ch < 5; ++ch) {
      const GeneratorState dgen =
          generator_deriv(sig.gen[ch], sig.ycal(ch), sig.delta, sig.steering[ch]);
      pack_generator(dgen, ch, dx);
      dx(L::kIntU3 + ch) = sig.steering[ch].u3;
      dx(L::kIntPhi21Sq + ch) = sig.phi21(ch) * sig.phi21(ch);
    }

    // Estimator banks.
    VectorGradientState<5> grad;
    grad.theta_hat = sig.theta_grad;
    grad.gain = cfg_.gamma_gradient * Mat5::Identity();
    if (cfg_.parameterization == Parameterization::kPowerBalance) {
      const Eigen::Matrix<double, 1, 1> y1(sig.y_pb);
      const Eigen::Matrix<double, 1, 5> reg = sig.omega_reg.transpose();
      dx.segment<5>(L::kThGrad) = vector_gradient_deriv<5, 1>(grad, y1, reg);
    } else {
      dx.segment<5>(L::kThGrad) = vector_gradient_deriv<5, 2>(grad, sig.y_cl, sig.psi_cl);
    }
    for (int ch = 0; ch < 5; ++ch) {
      ScalarGradientState sd{sig.theta_drem(ch), cfg_.gamma_drem, cfg_.drem_normalized};
      dx(L::kThDrem + ch) = drem_gradient_deriv(sd, sig.ycal(ch), sig.delta);
      ScalarGradientState sn{sig.theta_new(ch), cfg_.gamma_newlre, false};
      dx(L::kThNew + ch) = newlre_gradient_deriv(sn, sig.y_new(ch), sig.phi21(ch));
    }

    // Friction regressor filter.
    dx.segment<2>(L::kFric) =
        -cfg_.lambda * sig.friction_reg + sig.state.qd.cwiseProduct(sig.state.qd);

    // Diagnostics.
    dx(L::kIntDeltaSq) = sig.delta * sig.delta;
    dx(L::kIntAbsAlphaDelta) = std::abs(sig.alpha * sig.delta);
    dx(L::kIntSupplied) = sig.state.qd.dot(sig.tau);
    return dx;
  }

  /// Parameter vector the controller runs with.
  Vec5 controller_theta(const PipelineSignals& sig) const {
    switch (cfg_.active_estimator) {
      case EstimatorKind::kGradient:
        return sig.theta_grad;
      case EstimatorKind::kDrem:
        return sig.theta_drem;
      case EstimatorKind::kDremNewLre:
        return sig.theta_new;
      default:
        return cfg_.theta_true;
    }
  }

  ReferencePoint reference(double t) const {
    return reference_signals(cfg_.input == InputKind::kClosedRegulation
                                 ? ReferenceKind::kRegulation
                                 : ReferenceKind::kTracking,
                             t, cfg_.regulation_target);
  }

 private:
  Vec2 applied_torque(double t, const PipelineSignals& sig) const {
    if (!is_closed_loop(cfg_.input)) return input_signal(cfg_.input, t);
    return slotine_li(cfg_.model, sig.state, controller_theta(sig), cfg_.gains, reference(t));
  }

  ClassicalLre<Planar2Dof> unpack_classical(const PipelineState& x) const {
    ClassicalLre<Planar2Dof> cl;
    cl.yv = x.segment<2>(L::kClY);
    cl.z = Eigen::Map<const Eigen::Matrix<double, 2, 3>>(x.data() + L::kClZ);
    cl.vkin = Eigen::Map<const Eigen::Matrix<double, 2, 3>>(x.data() + L::kClVkin);
    cl.vpot = Eigen::Map<const Eigen::Matrix<double, 2, 2>>(x.data() + L::kClVpot);
    return cl;
  }

  void pack_classical(const ClassicalLre<Planar2Dof>& cl, PipelineState& x) const {
    x.segment<2>(L::kClY) = cl.yv;
    Eigen::Map<Eigen::Matrix<double, 2, 3>>(x.data() + L::kClZ) = cl.z;
    Eigen::Map<Eigen::Matrix<double, 2, 3>>(x.data() + L::kClVkin) = cl.vkin;
    Eigen::Map<Eigen::Matrix<double, 2, 2>>(x.data() + L::kClVpot) = cl.vpot;
  }

  GeneratorState unpack_generator(const PipelineState& x, int ch) const {
    const int base = L::kGen + ch * L::kGenStride;
    GeneratorState g;
    g.z = x(base);
    g.xi = x.segment<2>(base + 1);
    g.phi = Eigen::Map<const Mat2>(x.data() + base + 3);
    return g;
  }

  void pack_generator(const GeneratorState& g, int ch, PipelineState& x) const {
    const int base = L::kGen + ch * L::kGenStride;
    x(base) = g.z;
    x.segment<2>(base + 1) = g.xi;
    Eigen::Map<Mat2>(x.data() + base + 3) = g.phi;
  }

  PipelineConfig cfg_;
};

}  // namespace elid
