#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

#include "elid/types.hpp"

namespace elid {

// ---------------------------------------------------------------------------
// Classical fixed-step fourth-order integration. The whole coupled system is
// advanced simultaneously; step boundaries are aligned with input
// discontinuities so no step straddles a jump.
// ---------------------------------------------------------------------------

namespace detail {

template <class State>
bool state_is_finite(const State& x) {
  if constexpr (std::is_arithmetic_v<State>) {
    return std::isfinite(x);
  } else {
    return x.allFinite();
  }
}

}  // namespace detail

template <class State, class Deriv>
State rk4_step(double t, const State& x, double dt, Deriv&& f) {
  const State k1 = f(t, x);
  const State k2 = f(t + 0.5 * dt, State(x + (0.5 * dt) * k1));
  const State k3 = f(t + 0.5 * dt, State(x + (0.5 * dt) * k2));
  const State k4 = f(t + dt, State(x + dt * k3));
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Knot sequence [t0, ..., t1] that contains every breakpoint falling inside
/// the horizon.
inline std::vector<double> integration_knots(double t0, double t1, std::vector<double> breakpoints) {
  std::vector<double> knots = {t0};
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double b : breakpoints)
    if (b > t0 + 1e-12 && b < t1 - 1e-12) knots.push_back(b);
  knots.push_back(t1);
  return knots;
}

/// Integrates x over [t0, t1]. Each knot segment is covered with equal steps
/// no longer than dt (when dt divides the segment the step is exactly dt), so
/// every breakpoint lands on a step boundary. The observer is called with
/// (t, x) at t0 and after every step. Throws NumericalError if the state
/// stops being finite.
template <class State, class Deriv, class Observer>
void integrate(double t0, double t1, double dt, const std::vector<double>& breakpoints, State& x,
               Deriv&& f, Observer&& observe) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (!(t1 > t0)) throw std::invalid_argument("integrate: empty horizon");
  observe(t0, x);
  const std::vector<double> knots = integration_knots(t0, t1, breakpoints);
  for (std::size_t seg = 0; seg + 1 < knots.size(); ++seg) {
    const double begin = knots[seg];
    const double len = knots[seg + 1] - begin;
    long n = std::lround(len / dt);
    if (n < 1 || std::abs(static_cast<double>(n) * dt - len) > 1e-9 * std::max(1.0, len))
      n = static_cast<long>(std::ceil(len / dt - 1e-12));
    if (n < 1) n = 1;
    const double h = len / static_cast<double>(n);
    for (long k = 0; k < n; ++k) {
      const double t = begin + h * static_cast<double>(k);
      x = rk4_step(t, x, h, f);
      if (!detail::state_is_finite(x))
        throw NumericalError("integrate: state is not finite at t = " + std::to_string(t + h));
      observe(t + h, x);
    }
  }
}

}  // namespace elid
