#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>

#include "elid/integrate.hpp"
#include "elid/lre.hpp"
#include "elid/scenario.hpp"
#include "test_helpers.hpp"

using namespace elid;
using elid::testing::nominal_theta;

namespace {

constexpr double kPi = std::numbers::pi;

// In-test struct arithmetic for standalone filter stepping.
template <class Model>
PowerBalanceLre<Model> axpy(const PowerBalanceLre<Model>& a, double h,
                            const PowerBalanceLre<Model>& d) {
  PowerBalanceLre<Model> out;
  out.z = a.z + h * d.z;
  out.y = a.y + h * d.y;
  return out;
}

template <class Model>
ClassicalLre<Model> axpy(const ClassicalLre<Model>& a, double h, const ClassicalLre<Model>& d) {
  ClassicalLre<Model> out;
  out.yv = a.yv + h * d.yv;
  out.z = a.z + h * d.z;
  out.vkin = a.vkin + h * d.vkin;
  out.vpot = a.vpot + h * d.vpot;
  return out;
}

// One RK4 step of a filter driven by prescribed state/torque signals.
template <class Lre, class Model, class StateFn, class TauFn, class DerivFn>
Lre filter_step(const Model& model, const Lre& f, StateFn&& state_at, TauFn&& tau_at, double t,
                double dt, double lambda, DerivFn&& deriv) {
  const Lre k1 = deriv(model, f, state_at(t), tau_at(t), lambda);
  const Lre k2 = deriv(model, axpy(f, 0.5 * dt, k1), state_at(t + 0.5 * dt),
                       tau_at(t + 0.5 * dt), lambda);
  const Lre k3 = deriv(model, axpy(f, 0.5 * dt, k2), state_at(t + 0.5 * dt),
                       tau_at(t + 0.5 * dt), lambda);
  const Lre k4 = deriv(model, axpy(f, dt, k3), state_at(t + dt), tau_at(t + dt), lambda);
  Lre sum = axpy(f, dt / 6.0, k1);
  sum = axpy(sum, dt / 3.0, k2);
  sum = axpy(sum, dt / 3.0, k3);
  return axpy(sum, dt / 6.0, k4);
}

}  // namespace

TEST_CASE("omega closed forms", "[lre]") {
  const Planar2Dof model;

  // every entry vanishes at rest in the zero-potential configuration
  CHECK(omega(model, ELState{Vec2(-0.5 * kPi, 0.0), Vec2::Zero()}).norm() ==
        Approx(0.0).margin(1e-15));

  const Vec5 w = omega(model, ELState{Vec2(0.6 * kPi, 0.7 * kPi), Vec2::Zero()});
  CHECK(w(0) == 0.0);
  CHECK(w(1) == 0.0);
  CHECK(w(2) == 0.0);
  CHECK(w(3) == Approx(1.873543285182).margin(1e-9));
  CHECK(w(4) == Approx(19.139864424855).margin(1e-9));

  // closed-form entries against the displayed regressor
  elid::testing::RandomStates gen(11);
  for (int trial = 0; trial < 100; ++trial) {
    const ELState s = gen.next();
    const Vec5 v = omega(model, s);
    const double c2 = std::cos(s.q(1));
    CHECK(v(0) == Approx(0.5 * s.qd(0) * s.qd(0)).margin(1e-13));
    CHECK(v(1) == Approx((s.qd(0) * s.qd(0) + s.qd(0) * s.qd(1)) * c2).margin(1e-13));
    CHECK(v(2) == Approx(0.5 * s.qd(1) * s.qd(1) + s.qd(0) * s.qd(1)).margin(1e-13));
    // omega' theta is the mechanical energy
    CHECK(v.dot(nominal_theta()) == Approx(energy(model, s, nominal_theta())).margin(1e-12));
  }
}

TEST_CASE("regressor filter response to constant input", "[lre]") {
  const Planar2Dof model;
  // hold the plant fixed: omega is constant, so Omega(t) = omega exp(-lambda t)
  const ELState held{Vec2(0.3, -1.1), Vec2(0.8, 0.4)};
  const Vec5 w0 = omega(model, held);
  PowerBalanceLre<Planar2Dof> f;
  const double lambda = 1.0;
  const double dt = 1e-3;
  auto state_at = [&](double) { return held; };
  auto tau_at = [](double) { return Vec2::Zero().eval(); };
  auto deriv = [](const Planar2Dof& m, const PowerBalanceLre<Planar2Dof>& s, const ELState& st,
                  const Vec2& tau, double lam) { return power_balance_deriv(m, s, st, tau, lam); };
  CHECK((power_balance_regressor(model, f, held) - w0).norm() == 0.0);  // Omega(0) = omega
  for (int k = 0; k < 3000; ++k)
    f = filter_step(model, f, state_at, tau_at, k * dt, dt, lambda, deriv);
  const Vec5 expected = w0 * std::exp(-lambda * 3.0);
  CHECK((power_balance_regressor(model, f, held) - expected).norm() < 1e-9);
}

TEST_CASE("classical regressor at a held plant", "[lre]") {
  const Planar2Dof model;
  const ELState held{Vec2(0.5, 0.9), Vec2::Zero()};
  ClassicalLre<Planar2Dof> f;
  const double lambda = 1.0;
  const double dt = 1e-3;
  auto state_at = [&](double) { return held; };
  auto tau_at = [](double) { return Vec2::Zero().eval(); };
  auto deriv = [](const Planar2Dof& m, const ClassicalLre<Planar2Dof>& s, const ELState& st,
                  const Vec2& tau, double lam) { return classical_deriv(m, s, st, tau, lam); };
  for (int k = 0; k < 4000; ++k)
    f = filter_step(model, f, state_at, tau_at, k * dt, dt, lambda, deriv);
  const Mat25 psi = classical_regressor(model, f, held);
  // velocity-driven columns stay at zero, gravity columns reach the filtered constants
  CHECK(psi.leftCols<3>().norm() == Approx(0.0).margin(1e-15));
  const double scale = (1.0 - std::exp(-lambda * 4.0)) / lambda;
  for (int j = 0; j < 2; ++j) {
    const Vec2 expected = model.potential_basis_grad(held.q, j) * scale;
    CHECK((psi.col(3 + j) - expected).norm() < 1e-9);
  }
}

TEST_CASE("filter states match a fine-step reference solve", "[lre]") {
  const Planar2Dof model;
  // prescribed analytic trajectory; no plant integration involved
  auto state_at = [](double t) {
    ELState s;
    s.q = Vec2(std::sin(t), 0.5 * std::cos(2.0 * t));
    s.qd = Vec2(std::cos(t), -std::sin(2.0 * t));
    return s;
  };
  auto tau_at = [](double t) { return Vec2(std::sin(0.7 * t), 0.2).eval(); };
  auto deriv = [](const Planar2Dof& m, const ClassicalLre<Planar2Dof>& s, const ELState& st,
                  const Vec2& tau, double lam) { return classical_deriv(m, s, st, tau, lam); };

  auto solve = [&](double dt) {
    ClassicalLre<Planar2Dof> f;
    const long n = std::lround(2.0 / dt);
    for (long k = 0; k < n; ++k)
      f = filter_step(model, f, state_at, tau_at, static_cast<double>(k) * dt, dt, 1.0, deriv);
    return f;
  };
  const ClassicalLre<Planar2Dof> coarse = solve(1e-3);
  const ClassicalLre<Planar2Dof> fine = solve(1e-5);
  const ELState end = state_at(2.0);
  CHECK((classical_regressor(model, coarse, end) - classical_regressor(model, fine, end)).norm() <
        1e-6);
  CHECK((coarse.yv - fine.yv).norm() < 1e-6);
}

TEST_CASE("friction regressor filter", "[lre]") {
  // zero velocity keeps the filter at zero
  FrictionRegressor<Planar2Dof> f;
  const ELState rest{Vec2(1.0, -0.5), Vec2::Zero()};
  auto d0 = friction_regressor_deriv(f, rest, 1.0);
  CHECK(d0.w.norm() == 0.0);

  // constant velocity: first-order response toward (qd1^2, qd2^2)
  const ELState moving{Vec2(0.0, 0.0), Vec2(0.7, -1.2)};
  const Vec2 target = moving.qd.cwiseProduct(moving.qd);
  const double dt = 1e-3;
  for (int k = 0; k < 2000; ++k) {
    const auto k1 = friction_regressor_deriv(f, moving, 1.0);
    FrictionRegressor<Planar2Dof> mid1{f.w + 0.5 * dt * k1.w};
    const auto k2 = friction_regressor_deriv(mid1, moving, 1.0);
    FrictionRegressor<Planar2Dof> mid2{f.w + 0.5 * dt * k2.w};
    const auto k3 = friction_regressor_deriv(mid2, moving, 1.0);
    FrictionRegressor<Planar2Dof> end{f.w + dt * k3.w};
    const auto k4 = friction_regressor_deriv(end, moving, 1.0);
    f.w += dt / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
  }
  const Vec2 expected = target * (1.0 - std::exp(-2.0));
  CHECK((f.w - expected).norm() < 1e-9);
}

TEST_CASE("augmented identity on a frictional plant", "[lre]") {
  // y = Omega' theta + w' theta_R along trajectories of the damped arm
  ScenarioConfig sc;
  sc.name = "friction";
  sc.pipeline.input = InputKind::kTauC;
  sc.pipeline.q0 = Vec2(-0.5 * kPi, 0.0);
  sc.pipeline.friction = true;
  sc.pipeline.friction_diag = Vec2(0.1, 0.1);
  sc.pipeline.gamma_gradient = 0.0;
  sc.pipeline.gamma_drem = 0.0;
  sc.pipeline.gamma_newlre = 0.0;
  sc.horizon = 5.0;
  sc.stride = 1;
  const RunResult run = run_pipeline(sc);
  const Vec5 theta = sc.pipeline.theta_true;
  double worst_plain = 0.0, worst_augmented = 0.0, peak = 0.0;
  for (const auto& s : run.samples) {
    peak = std::max(peak, std::abs(s.y_pb));
    worst_plain = std::max(worst_plain, std::abs(s.y_pb - s.omega_reg.dot(theta)));
    const double augmented =
        s.omega_reg.dot(theta) + s.friction_reg.dot(sc.pipeline.friction_diag);
    worst_augmented = std::max(worst_augmented, std::abs(s.y_pb - augmented));
  }
  CHECK(worst_augmented < 1e-8);
  CHECK(worst_plain > 100.0 * worst_augmented);  // friction term genuinely matters
}

TEST_CASE("identity transient follows the predicted exponential", "[lre]") {
  // nonzero initial energy shifts the identity by exactly -E0 exp(-lambda t)
  ScenarioConfig sc;
  sc.name = "transient";
  sc.pipeline.input = InputKind::kTauA;
  sc.pipeline.q0 = Vec2(-0.5 * kPi + 0.4, 0.2);
  sc.pipeline.gamma_gradient = 0.0;
  sc.pipeline.gamma_drem = 0.0;
  sc.pipeline.gamma_newlre = 0.0;
  sc.horizon = 6.0;
  sc.stride = 1;
  const RunResult run = run_pipeline(sc);
  const Vec5 theta = sc.pipeline.theta_true;
  const double e0 = run.samples.front().energy;
  REQUIRE(e0 > 1.0);
  double worst = 0.0;
  for (const auto& s : run.samples)
    worst = std::max(
        worst, std::abs(s.y_pb - s.omega_reg.dot(theta) + e0 * std::exp(-s.t)));
  CHECK(worst < 1e-6 * e0);
}

TEST_CASE("regressor dimensions", "[lre]") {
  static_assert(decltype(PowerBalanceLre<Planar2Dof>{}.z)::RowsAtCompileTime == 5);
  static_assert(RegressorMat<Planar2Dof>::RowsAtCompileTime == 2);
  static_assert(RegressorMat<Planar2Dof>::ColsAtCompileTime == 5);
  SUCCEED();
}
