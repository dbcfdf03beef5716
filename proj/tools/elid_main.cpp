// elid: simulate parameter estimation and indirect adaptive control of a
// two-link manipulator using the power-balance and classical regression
// parameterizations, Kreisselmeier mixing and the excited-regressor
// generator. Subcommands: run, list, check.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "elid/scenario.hpp"

namespace {

using namespace elid;

struct CliOverrides {
  std::string dt;
  std::string horizon;
  std::string out;
  std::string estimator;
  std::string parameterization;
  std::string input;
  std::string stride;
};

void apply_overrides(ScenarioConfig& sc, const CliOverrides& o) {
  if (!o.dt.empty()) apply_config_entry(sc, "dt", o.dt);
  if (!o.horizon.empty()) apply_config_entry(sc, "horizon", o.horizon);
  if (!o.out.empty()) apply_config_entry(sc, "out", o.out);
  if (!o.estimator.empty()) apply_config_entry(sc, "estimator", o.estimator);
  if (!o.parameterization.empty()) apply_config_entry(sc, "parameterization", o.parameterization);
  if (!o.input.empty()) apply_config_entry(sc, "input", o.input);
  if (!o.stride.empty()) apply_config_entry(sc, "stride", o.stride);
}

int cmd_list() {
  std::printf("%-28s %s\n", "name", "description");
  for (const auto& sc : scenario_catalog())
    std::printf("%-28s %s\n", sc.name.c_str(), sc.description.c_str());
  return 0;
}

int cmd_run(const std::string& target, const CliOverrides& overrides) {
  std::vector<ScenarioConfig> scenarios;
  if (auto sc = find_scenario(target)) {
    scenarios.push_back(*sc);
  } else if (std::filesystem::exists(target)) {
    scenarios = parse_config_file(target);
  } else {
    std::fprintf(stderr,
                 "{\"status\":\"error\",\"message\":\"'%s' is neither a catalog scenario nor a "
                 "config file; see 'elid list'\"}\n",
                 target.c_str());
    return 2;
  }
  for (auto& sc : scenarios) {
    apply_overrides(sc, overrides);
    sc.validate();
    const ScenarioSummary sum = run_scenario(sc);
    print_summary(sc, sum, stdout);
  }
  return 0;
}

// Fast invariant sweep: algebraic identities plus short simulation checks.
struct CheckFailure {
  std::string name;
  std::string detail;
};

void report(std::vector<CheckFailure>& failures, const std::string& name, bool ok,
            const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  if (!ok) failures.push_back({name, detail});
}

int cmd_check() {
  std::vector<CheckFailure> failures;
  const Planar2Dof model;
  const Vec5 theta = theta_from_geometry({0.7, 0.8, 1.5, 0.5});
  std::mt19937 rng(20240811);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  std::uniform_real_distribution<double> vel(-2.0, 2.0);

  {  // adjugate identity on random 5x5 matrices
    double worst = 0.0;
    std::uniform_real_distribution<double> entry(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
      Mat5 a;
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) a(i, j) = entry(rng);
      const double scale = std::pow(a.norm(), 4);
      const double resid =
          (adjugate<5>(a) * a - cofactor_determinant<5>(a) * Mat5::Identity()).norm();
      worst = std::max(worst, resid / scale);
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "max |adj(A)A - det(A)I| / |A|^4 = %.2e", worst);
    report(failures, "adjugate-cayley", worst <= 1e-9, buf);
  }
  {  // skew symmetry of Mdot - 2C with finite-difference Mdot
    double worst = 0.0;
    const double h = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
      const Vec2 q(angle(rng), angle(rng));
      const Vec2 qd(vel(rng), vel(rng));
      const Mat2 mp = inertia_matrix(model, Vec2(q + h * qd), theta);
      const Mat2 mm = inertia_matrix(model, Vec2(q - h * qd), theta);
      const Mat2 mdot = (mp - mm) / (2.0 * h);
      const Mat2 skew = mdot - 2.0 * coriolis_matrix(model, q, qd, theta);
      worst = std::max(worst, (skew + skew.transpose()).norm());
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "max |S + S'| = %.2e over 100 random states", worst);
    report(failures, "mdot-2c-skew", worst <= 1e-6, buf);
  }
  {  // regression identities on a short run from the zero-energy configuration
    ScenarioConfig sc;
    sc.name = "check";
    sc.pipeline.input = InputKind::kTauC;
    sc.pipeline.q0 = Vec2(-0.5 * std::numbers::pi, 0.0);
    sc.horizon = 5.0;
    sc.stride = 1;
    const RunResult run = run_pipeline(sc);
    double worst_pb = 0.0, worst_cl = 0.0, peak_y = 0.0, peak_ycl = 0.0, worst_energy = 0.0,
           worst_liouville = 0.0;
    const double e0 = run.samples.front().energy;
    for (const auto& s : run.samples) {
      worst_pb = std::max(worst_pb, std::abs(s.y_pb - s.omega_reg.dot(theta)));
      peak_y = std::max(peak_y, std::abs(s.y_pb));
      worst_cl = std::max(worst_cl, (s.y_cl - s.psi_cl * theta).norm());
      peak_ycl = std::max(peak_ycl, s.y_cl.norm());
      worst_energy = std::max(worst_energy, std::abs(s.energy - e0 - s.int_supplied));
      worst_liouville =
          std::max(worst_liouville, std::abs(s.gen[0].phi.determinant() - std::exp(s.int_u3(0))));
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max |y - Omega' theta| = %.2e (peak |y| %.2e)", worst_pb,
                  peak_y);
    report(failures, "power-balance-lre", worst_pb <= 1e-4 * peak_y, buf);
    std::snprintf(buf, sizeof buf, "max |y - Psi theta| = %.2e (peak %.2e)", worst_cl, peak_ycl);
    report(failures, "classical-lre", worst_cl <= 1e-4 * peak_ycl, buf);
    std::snprintf(buf, sizeof buf, "max |E - E0 - int qd'tau| = %.2e", worst_energy);
    report(failures, "energy-balance", worst_energy <= 1e-5 * std::max(1.0, peak_y), buf);
    std::snprintf(buf, sizeof buf, "max |det Phi - exp(int u3)| = %.2e", worst_liouville);
    report(failures, "liouville", worst_liouville <= 1e-6, buf);
  }

  if (failures.empty()) {
    std::printf("{\"status\":\"ok\",\"failed\":0}\n");
    return 0;
  }
  std::printf("{\"status\":\"fail\",\"failed\":%zu,\"checks\":[", failures.size());
  for (std::size_t i = 0; i < failures.size(); ++i)
    std::printf("\"%s\"%s", failures[i].name.c_str(), i + 1 < failures.size() ? "," : "");
  std::printf("]}\n");
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-link manipulator estimation and adaptive control simulator"};
  app.require_subcommand(1);

  std::string target;
  CliOverrides overrides;
  auto* run = app.add_subcommand("run", "run a catalog scenario or a config file");
  run->add_option("target", target, "scenario name or config path")->required();
  run->add_option("--dt", overrides.dt, "integration step [s]");
  run->add_option("--horizon", overrides.horizon, "simulation horizon [s]");
  run->add_option("--out", overrides.out, "CSV output path");
  run->add_option("--estimator", overrides.estimator,
                  "gradient|drem|drem_newlre|true_params");
  run->add_option("--parameterization", overrides.parameterization, "power_balance|classical");
  run->add_option("--input", overrides.input, "tau_a|tau_b|tau_c|regulation|tracking");
  run->add_option("--stride", overrides.stride, "record every n-th step");
  auto* list = app.add_subcommand("list", "list the scenario catalog");
  auto* check = app.add_subcommand("check", "run the invariant suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) return cmd_list();
    if (*check) return cmd_check();
    if (*run) return cmd_run(target, overrides);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "{\"status\":\"error\",\"message\":\"%s\"}\n", e.what());
    return 1;
  }
  return 0;
}
