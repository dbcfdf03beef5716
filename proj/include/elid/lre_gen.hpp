#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "elid/types.hpp"

namespace elid {

// ---------------------------------------------------------------------------
// Regressor generator: from one scalar equation ycal = delta * theta with an
// interval-exciting (but dying) delta, manufacture a new scalar equation
//
//   Y = Phi21 * theta,   Y = z - xi_2,
//
// whose regressor Phi21 is kept excited by steering the pair (Phi11, Phi21)
// onto the energy shell 1/2 (Phi11^2 + Phi21^2) = beta.
// ---------------------------------------------------------------------------

struct PumpDampConfig {
  double beta = 0.25;  // shell level, in (0, 1/2)
  double epsilon = 1e-3;  // diagnostic margin for the excitation floor report
  std::function<double(double)> alpha = [](double t) { return std::sin(0.2 * t); };
};

struct Steering {
  double u1;
  double u2;
  double u3;
};

struct GeneratorState {
  double z = 0.0;
  Vec2 xi = Vec2::Zero();
  Mat2 phi = Mat2::Identity();
};

/// Distance of (Phi11, Phi21) from the energy shell.
inline double shell_potential(const Mat2& phi, double beta) {
  return 0.5 * (phi(0, 0) * phi(0, 0) + phi(1, 0) * phi(1, 0)) - beta;
}

/// u1 = -alpha delta, u2 = alpha, u3 = -(1/2 (Phi11^2 + Phi21^2) - beta).
inline Steering pump_damp_signals(const Mat2& phi, double delta, double alpha_value,
                                  double beta) {
  return {-alpha_value * delta, alpha_value, -shell_potential(phi, beta)};
}

inline Steering pump_damp_signals(const Mat2& phi, double delta, double t,
                                  const PumpDampConfig& cfg) {
  return pump_damp_signals(phi, delta, cfg.alpha(t), cfg.beta);
}

/// One evaluation of the generator vector field
///   zdot   = u2 ycal + u3 z
///   xidot  = A xi + (-u1 z, 0)
///   phidot = A phi,        A = [[0, u1], [u2 delta, u3]].
inline GeneratorState generator_deriv(const GeneratorState& s, double ycal, double delta,
                                      const Steering& u) {
  Mat2 a;
  a << 0.0, u.u1, u.u2 * delta, u.u3;
  GeneratorState d;
  d.z = u.u2 * ycal + u.u3 * s.z;
  d.xi = a * s.xi + Vec2(-u.u1 * s.z, 0.0);
  d.phi = a * s.phi;
  return d;
}

struct NewLre {
  double y;      // z - xi_2
  double phi21;  // the new scalar regressor
};

inline NewLre new_lre_output(const GeneratorState& s) {
  return {s.z - s.xi(1), s.phi(1, 0)};
}

// ---------------------------------------------------------------------------
// Run diagnostics.
// ---------------------------------------------------------------------------

struct ExcitationReport {
  double min_shell_energy = 0.0;   // min_t Phi11^2 + Phi21^2
  bool respects_floor = false;     // min >= 2 beta + epsilon
  double l2_increment_last = 0.0;  // integral of Phi21^2 over the last fifth
  double l2_increment_prev = 0.0;  // ... over the fifth before it
  bool l2_growing = false;         // integral keeps growing near the end
  double phi11_terminal = 0.0;
  bool near_degenerate = false;    // Phi11 settled on sqrt(2 beta)
};

/// Evaluates the excitation guarantees on a recorded generator run sampled
/// uniformly at dt. The not-square-integrable property is proxied by linear
/// growth of int Phi21^2 across the last two fifths of the horizon.
inline ExcitationReport check_excitation_floor(const std::vector<double>& phi11,
                                               const std::vector<double>& phi21, double dt,
                                               const PumpDampConfig& cfg) {
  ExcitationReport r;
  if (phi11.empty() || phi11.size() != phi21.size()) return r;
  const std::size_t n = phi11.size();
  double min_energy = phi11[0] * phi11[0] + phi21[0] * phi21[0];
  for (std::size_t k = 1; k < n; ++k) {
    const double e = phi11[k] * phi11[k] + phi21[k] * phi21[k];
    if (e < min_energy) min_energy = e;
  }
  const std::size_t fifth = n / 5;
  double inc_last = 0.0;
  double inc_prev = 0.0;
  for (std::size_t k = n - fifth; k < n; ++k) inc_last += phi21[k] * phi21[k] * dt;
  for (std::size_t k = n - 2 * fifth; k < n - fifth; ++k) inc_prev += phi21[k] * phi21[k] * dt;
  r.min_shell_energy = min_energy;
  r.respects_floor = min_energy >= 2.0 * cfg.beta + cfg.epsilon;
  r.l2_increment_last = inc_last;
  r.l2_increment_prev = inc_prev;
  r.l2_growing = inc_last >= 0.5 * inc_prev && inc_last > 1e-3;
  r.phi11_terminal = phi11.back();
  const double shell = std::sqrt(2.0 * cfg.beta);
  r.near_degenerate = std::abs(std::abs(r.phi11_terminal) - shell) < 0.05 * shell;
  return r;
}

}  // namespace elid
