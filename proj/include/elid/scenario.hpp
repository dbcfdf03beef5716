#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "elid/integrate.hpp"
#include "elid/pipeline.hpp"

namespace elid {

// ---------------------------------------------------------------------------
// Scenario harness: a declarative description of one experiment, a catalog
// with the stock experiment matrix, CSV emission and run summaries.
// ---------------------------------------------------------------------------

inline constexpr int kCsvSchemaVersion = 1;

struct ScenarioConfig {
  std::string name = "custom";
  std::string description;
  PipelineConfig pipeline;
  double dt = 1e-3;
  double horizon = 40.0;
  int stride = 10;  // record every stride-th step
  std::string out_path;  // empty: derive from name

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("scenario '" + name + "': dt must be positive");
    if (!(horizon > 0.0))
      throw std::invalid_argument("scenario '" + name + "': horizon must be positive");
    if (stride < 1) throw std::invalid_argument("scenario '" + name + "': stride must be >= 1");
    if (!theta_physically_valid(pipeline.theta_true))
      throw std::invalid_argument("scenario '" + name + "': theta_true is not a valid inertia set");
  }
};

// --------------------------- name <-> enum maps ----------------------------

inline std::string to_string(InputKind k) {
  switch (k) {
    case InputKind::kTauA: return "tau_a";
    case InputKind::kTauB: return "tau_b";
    case InputKind::kTauC: return "tau_c";
    case InputKind::kClosedRegulation: return "regulation";
    default: return "tracking";
  }
}

inline std::string to_string(Parameterization p) {
  return p == Parameterization::kPowerBalance ? "power_balance" : "classical";
}

inline std::string to_string(EstimatorKind e) {
  switch (e) {
    case EstimatorKind::kGradient: return "gradient";
    case EstimatorKind::kDrem: return "drem";
    case EstimatorKind::kDremNewLre: return "drem_newlre";
    default: return "true_params";
  }
}

inline InputKind input_from_string(const std::string& s) {
  if (s == "tau_a") return InputKind::kTauA;
  if (s == "tau_b") return InputKind::kTauB;
  if (s == "tau_c") return InputKind::kTauC;
  if (s == "regulation") return InputKind::kClosedRegulation;
  if (s == "tracking") return InputKind::kClosedTracking;
  throw std::invalid_argument("unknown input selector '" + s +
                              "' (expected tau_a|tau_b|tau_c|regulation|tracking)");
}

inline Parameterization parameterization_from_string(const std::string& s) {
  if (s == "power_balance") return Parameterization::kPowerBalance;
  if (s == "classical") return Parameterization::kClassical;
  throw std::invalid_argument("unknown parameterization '" + s +
                              "' (expected power_balance|classical)");
}

inline EstimatorKind estimator_from_string(const std::string& s) {
  if (s == "gradient") return EstimatorKind::kGradient;
  if (s == "drem") return EstimatorKind::kDrem;
  if (s == "drem_newlre") return EstimatorKind::kDremNewLre;
  if (s == "true_params") return EstimatorKind::kTrueParams;
  throw std::invalid_argument("unknown estimator '" + s +
                              "' (expected gradient|drem|drem_newlre|true_params)");
}

// -------------------------------- catalog ----------------------------------

/// Initial configuration (-pi/2 + d, d/2) at rest: d = 0 is the zero-energy
/// equilibrium, growing d adds swing energy. The catalog picks d per cell so
/// the excitation level stays in the regime the fixed-step integrator (and
/// the mixing determinant, which scales like the tenth power of the motion)
/// can represent; a near-vertical start whirls the arm so hard that no
/// feasible fixed step integrates the estimator banks.
inline Vec2 offset_start(double d) {
  return Vec2(-0.5 * std::numbers::pi + d, 0.5 * d);
}

/// Named experiments. Open-loop estimation scenarios integrate all three
/// estimator banks side by side on the same regression data, so one run per
/// (input, parameterization) covers the gradient / mixing / generated-LRE
/// comparison; the closed-loop entries come in regulation/tracking pairs.
inline std::vector<ScenarioConfig> scenario_catalog() {
  std::vector<ScenarioConfig> out;

  auto open_loop = [](InputKind in, Parameterization par, double d, double dt) {
    ScenarioConfig sc;
    sc.name = "est-" + to_string(in) + "-" +
              (par == Parameterization::kPowerBalance ? std::string("powerbal")
                                                      : std::string("classical"));
    sc.description = "open-loop estimation, input " + to_string(in) + ", " + to_string(par) +
                     " parameterization, all estimator banks";
    sc.pipeline.input = in;
    sc.pipeline.parameterization = par;
    sc.pipeline.active_estimator = EstimatorKind::kDremNewLre;
    const double g = par == Parameterization::kPowerBalance ? 100.0 : 25.0;
    sc.pipeline.gamma_gradient = g;
    sc.pipeline.gamma_drem = g;
    sc.pipeline.gamma_newlre = g;
    sc.pipeline.drem_normalized = true;
    sc.pipeline.q0 = offset_start(d);
    sc.dt = dt;
    sc.stride = static_cast<int>(std::lround(1e-2 / dt));
    sc.horizon = 40.0;
    return sc;
  };
  auto closed_loop = [](InputKind in, Parameterization par, EstimatorKind est) {
    ScenarioConfig sc;
    const std::string obj = in == InputKind::kClosedRegulation ? "reg" : "track";
    sc.name = obj + "-" +
              (par == Parameterization::kPowerBalance ? std::string("powerbal")
                                                      : std::string("classical")) +
              "-" + to_string(est);
    sc.description = "closed-loop " + to_string(in) + ", " + to_string(par) +
                     " parameterization, controller fed by " + to_string(est);
    sc.pipeline.input = in;
    sc.pipeline.parameterization = par;
    sc.pipeline.active_estimator = est;
    sc.pipeline.gamma_gradient = 25.0;
    const double g = in == InputKind::kClosedRegulation ? 10.0 : 25.0;
    sc.pipeline.gamma_drem = g;
    sc.pipeline.gamma_newlre = g;
    sc.pipeline.drem_normalized = true;
    sc.pipeline.q0 = offset_start(0.0);
    sc.dt = 1e-4;
    sc.stride = 100;
    sc.horizon = 60.0;
    return sc;
  };

  out.push_back(open_loop(InputKind::kTauA, Parameterization::kClassical, 0.7, 1e-4));
  out.push_back(open_loop(InputKind::kTauA, Parameterization::kPowerBalance, 0.7, 1e-4));
  out.push_back(open_loop(InputKind::kTauB, Parameterization::kClassical, 0.4, 1e-4));
  out.push_back(open_loop(InputKind::kTauB, Parameterization::kPowerBalance, 0.2, 2e-5));
  out.push_back(open_loop(InputKind::kTauC, Parameterization::kClassical, 0.2, 1e-4));
  out.push_back(open_loop(InputKind::kTauC, Parameterization::kPowerBalance, 0.0, 2e-5));
  for (InputKind in : {InputKind::kClosedRegulation, InputKind::kClosedTracking}) {
    out.push_back(closed_loop(in, Parameterization::kClassical, EstimatorKind::kGradient));
    out.push_back(closed_loop(in, Parameterization::kClassical, EstimatorKind::kDremNewLre));
    out.push_back(closed_loop(in, Parameterization::kPowerBalance, EstimatorKind::kDremNewLre));
  }
  return out;
}

inline std::optional<ScenarioConfig> find_scenario(const std::string& name) {
  for (auto& sc : scenario_catalog())
    if (sc.name == name) return sc;
  return std::nullopt;
}

// ----------------------------- config files --------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_doubles(const std::string& value, const std::string& key,
                                         std::size_t expected) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t pos = 0;
    const double v = std::stod(item, &pos);
    if (pos != item.size())
      throw std::invalid_argument("config key '" + key + "': bad number '" + item + "'");
    out.push_back(v);
  }
  if (out.size() != expected)
    throw std::invalid_argument("config key '" + key + "': expected " +
                                std::to_string(expected) + " comma-separated values");
  return out;
}

inline bool parse_flag(const std::string& value, const std::string& key) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw std::invalid_argument("config key '" + key + "': expected on/off");
}

}  // namespace detail

/// Applies one key = value line to a scenario. Every key has a default taken
/// from the stock experiment setup, so an empty section is runnable.
inline void apply_config_entry(ScenarioConfig& sc, const std::string& key,
                               const std::string& value) {
  using detail::parse_doubles;
  auto& p = sc.pipeline;
  if (key == "input") {
    p.input = input_from_string(value);
  } else if (key == "parameterization") {
    p.parameterization = parameterization_from_string(value);
  } else if (key == "estimator") {
    p.active_estimator = estimator_from_string(value);
  } else if (key == "dt") {
    sc.dt = std::stod(value);
  } else if (key == "horizon") {
    sc.horizon = std::stod(value);
  } else if (key == "stride") {
    sc.stride = std::stoi(value);
  } else if (key == "out") {
    sc.out_path = value;
  } else if (key == "lambda") {
    p.lambda = std::stod(value);
  } else if (key == "lambda_e") {
    p.lambda_e = std::stod(value);
  } else if (key == "beta") {
    p.pump.beta = std::stod(value);
  } else if (key == "alpha_freq") {
    const double w = std::stod(value);
    p.pump.alpha = [w](double t) { return std::sin(w * t); };
  } else if (key == "epsilon") {
    p.pump.epsilon = std::stod(value);
  } else if (key == "gamma_gradient") {
    p.gamma_gradient = std::stod(value);
  } else if (key == "gamma_drem") {
    p.gamma_drem = std::stod(value);
  } else if (key == "gamma_newlre") {
    p.gamma_newlre = std::stod(value);
  } else if (key == "drem_normalized") {
    p.drem_normalized = detail::parse_flag(value, key);
  } else if (key == "k1") {
    const auto v = parse_doubles(value, key, value.find(',') == std::string::npos ? 1 : 2);
    p.gains.k1 = v.size() == 1 ? Vec2(v[0], v[0]) : Vec2(v[0], v[1]);
  } else if (key == "k2") {
    const auto v = parse_doubles(value, key, value.find(',') == std::string::npos ? 1 : 2);
    p.gains.k2 = v.size() == 1 ? Vec2(v[0], v[0]) : Vec2(v[0], v[1]);
  } else if (key == "regulation_target") {
    const auto v = parse_doubles(value, key, 2);
    p.regulation_target = Vec2(v[0], v[1]);
  } else if (key == "q0") {
    const auto v = parse_doubles(value, key, 2);
    p.q0 = Vec2(v[0], v[1]);
  } else if (key == "qd0") {
    const auto v = parse_doubles(value, key, 2);
    p.qd0 = Vec2(v[0], v[1]);
  } else if (key == "theta_hat0") {
    const auto v = parse_doubles(value, key, 5);
    for (int i = 0; i < 5; ++i) p.theta_hat0(i) = v[i];
  } else if (key == "geometry") {  // l1, l2, m1, m2
    const auto v = parse_doubles(value, key, 4);
    p.theta_true = theta_from_geometry({v[0], v[1], v[2], v[3]});
  } else if (key == "friction") {
    p.friction = detail::parse_flag(value, key);
  } else if (key == "friction_diag") {
    const auto v = parse_doubles(value, key, 2);
    p.friction_diag = Vec2(v[0], v[1]);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

/// Flat key = value file with one or more [scenario <name>] sections.
inline std::vector<ScenarioConfig> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::vector<ScenarioConfig> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']') throw std::invalid_argument("unterminated section header");
        std::string header = detail::trim(line.substr(1, line.size() - 2));
        const std::string prefix = "scenario";
        if (header.rfind(prefix, 0) != 0)
          throw std::invalid_argument("section must start with 'scenario'");
        ScenarioConfig sc;
        sc.name = detail::trim(header.substr(prefix.size()));
        if (sc.name.empty()) sc.name = "custom";
        out.push_back(sc);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("expected key = value");
      if (out.empty()) out.push_back(ScenarioConfig{});
      apply_config_entry(out.back(), detail::trim(line.substr(0, eq)),
                         detail::trim(line.substr(eq + 1)));
    } catch (const std::exception& e) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (out.empty()) throw std::invalid_argument(path + ": no scenario defined");
  for (auto& sc : out) sc.validate();
  return out;
}

// ------------------------------- CSV output --------------------------------

inline std::vector<std::string> csv_columns(const ScenarioConfig& sc) {
  std::vector<std::string> cols = {"t", "q1", "q2", "qd1", "qd2", "tau1", "tau2"};
  if (sc.pipeline.parameterization == Parameterization::kPowerBalance) {
    cols.push_back("y");
  } else {
    cols.insert(cols.end(), {"y1", "y2"});
  }
  cols.push_back("delta");
  for (int i = 1; i <= 5; ++i) cols.push_back("ycal" + std::to_string(i));
  for (int i = 1; i <= 5; ++i) cols.push_back("phi21_" + std::to_string(i));
  for (int i = 1; i <= 5; ++i) cols.push_back("ynew" + std::to_string(i));
  const bool open = !is_closed_loop(sc.pipeline.input);
  auto bank = [&cols](const std::string& tag) {
    for (int i = 1; i <= 5; ++i) cols.push_back("thetahat_" + tag + std::to_string(i));
  };
  if (open) {
    bank("grad");
    bank("drem");
    bank("new");
  } else {
    bank("");
  }
  for (int i = 1; i <= 5; ++i) cols.push_back("thetaerr" + std::to_string(i));
  cols.insert(cols.end(), {"int_delta_sq", "int_abs_alpha_delta"});
  for (int i = 1; i <= 5; ++i) cols.push_back("int_phi21sq" + std::to_string(i));
  if (!open) cols.insert(cols.end(), {"qstar1", "qstar2", "qtil1", "qtil2"});
  return cols;
}

inline std::vector<double> csv_row(const ScenarioConfig& sc, const Pipeline& pipe,
                                   const PipelineSignals& s) {
  std::vector<double> row = {s.t,      s.state.q(0),  s.state.q(1), s.state.qd(0),
                             s.state.qd(1), s.tau(0), s.tau(1)};
  if (sc.pipeline.parameterization == Parameterization::kPowerBalance) {
    row.push_back(s.y_pb);
  } else {
    row.push_back(s.y_cl(0));
    row.push_back(s.y_cl(1));
  }
  row.push_back(s.delta);
  for (int i = 0; i < 5; ++i) row.push_back(s.ycal(i));
  for (int i = 0; i < 5; ++i) row.push_back(s.phi21(i));
  for (int i = 0; i < 5; ++i) row.push_back(s.y_new(i));
  const bool open = !is_closed_loop(sc.pipeline.input);
  if (open) {
    for (int i = 0; i < 5; ++i) row.push_back(s.theta_grad(i));
    for (int i = 0; i < 5; ++i) row.push_back(s.theta_drem(i));
    for (int i = 0; i < 5; ++i) row.push_back(s.theta_new(i));
  } else {
    const Vec5 th = pipe.controller_theta(s);
    for (int i = 0; i < 5; ++i) row.push_back(th(i));
  }
  const Vec5 active = pipe.controller_theta(s);
  for (int i = 0; i < 5; ++i) row.push_back(active(i) - sc.pipeline.theta_true(i));
  row.push_back(s.int_delta_sq);
  row.push_back(s.int_abs_alpha_delta);
  for (int i = 0; i < 5; ++i) row.push_back(s.int_phi21_sq(i));
  if (!open) {
    row.insert(row.end(), {s.q_star(0), s.q_star(1), s.q_err(0), s.q_err(1)});
  }
  return row;
}

// -------------------------------- running ----------------------------------

struct RunResult {
  std::vector<PipelineSignals> samples;  // every stride-th step plus the endpoint
  PipelineState final_state;
  double wall_seconds = 0.0;
};

/// Integrates a scenario and records sampled signals. Records every
/// `stride`-th step and always the final instant.
inline RunResult run_pipeline(const ScenarioConfig& sc) {
  sc.validate();
  const Pipeline pipe(sc.pipeline);
  PipelineState x = pipe.initial_state();
  RunResult out;
  out.samples.reserve(static_cast<std::size_t>(sc.horizon / sc.dt) / sc.stride + 2);
  const auto start = std::chrono::steady_clock::now();
  long step = 0;
  const long stride = sc.stride;
  const long total = std::lround(sc.horizon / sc.dt);
  integrate(
      0.0, sc.horizon, sc.dt, pipe.breakpoints(), x,
      [&pipe](double t, const PipelineState& s) { return pipe.deriv(t, s); },
      [&](double t, const PipelineState& s) {
        if (step % stride == 0 || step >= total) out.samples.push_back(pipe.evaluate(t, s));
        ++step;
      });
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.final_state = x;
  return out;
}

struct ScenarioSummary {
  std::string name;
  double wall_seconds = 0.0;
  std::size_t rows = 0;
  std::string csv_path;
  Vec5 theta_err_grad = Vec5::Zero();
  Vec5 theta_err_drem = Vec5::Zero();
  Vec5 theta_err_new = Vec5::Zero();
  double tracking_err = 0.0;  // terminal |q - q*| (closed loop)
  double delta_peak = 0.0;
  double delta_terminal = 0.0;
  double ie_integral = 0.0;        // int delta^2
  double alpha_delta_l1 = 0.0;     // int |alpha delta|
  bool alpha_delta_converged = false;
  ExcitationReport excitation;
};

inline std::string default_csv_path(const ScenarioConfig& sc) {
  return sc.out_path.empty() ? sc.name + ".csv" : sc.out_path;
}

inline void write_csv(const ScenarioConfig& sc, const Pipeline& pipe,
                      const std::vector<PipelineSignals>& samples, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
  const auto cols = csv_columns(sc);
  for (std::size_t i = 0; i < cols.size(); ++i)
    std::fprintf(f, "%s%s", cols[i].c_str(), i + 1 == cols.size() ? "\n" : ",");
  for (const auto& s : samples) {
    const auto row = csv_row(sc, pipe, s);
    for (std::size_t i = 0; i < row.size(); ++i)
      std::fprintf(f, "%.17g%s", row[i], i + 1 == row.size() ? "\n" : ",");
  }
  std::fclose(f);
}

inline ScenarioSummary summarize(const ScenarioConfig& sc, const RunResult& run) {
  ScenarioSummary sum;
  sum.name = sc.name;
  sum.wall_seconds = run.wall_seconds;
  sum.rows = run.samples.size();
  const PipelineSignals& last = run.samples.back();
  sum.theta_err_grad = last.theta_grad - sc.pipeline.theta_true;
  sum.theta_err_drem = last.theta_drem - sc.pipeline.theta_true;
  sum.theta_err_new = last.theta_new - sc.pipeline.theta_true;
  sum.tracking_err = last.q_err.norm();
  for (const auto& s : run.samples) sum.delta_peak = std::max(sum.delta_peak, std::abs(s.delta));
  sum.delta_terminal = std::abs(last.delta);
  sum.ie_integral = last.int_delta_sq;
  sum.alpha_delta_l1 = last.int_abs_alpha_delta;
  // L1 convergence flag: the last fifth of the run contributes < 5% of the total.
  if (run.samples.size() > 5) {
    const auto& tail_start = run.samples[run.samples.size() - run.samples.size() / 5];
    const double tail = last.int_abs_alpha_delta - tail_start.int_abs_alpha_delta;
    sum.alpha_delta_converged = tail < 0.05 * std::max(last.int_abs_alpha_delta, 1e-12);
  }
  std::vector<double> phi11(run.samples.size()), phi21(run.samples.size());
  for (std::size_t k = 0; k < run.samples.size(); ++k) {
    phi11[k] = run.samples[k].phi11(0);
    phi21[k] = run.samples[k].phi21(0);
  }
  sum.excitation =
      check_excitation_floor(phi11, phi21, sc.dt * sc.stride, sc.pipeline.pump);
  return sum;
}

inline ScenarioSummary run_scenario(const ScenarioConfig& sc, bool write_output = true) {
  const RunResult run = run_pipeline(sc);
  ScenarioSummary sum = summarize(sc, run);
  if (write_output) {
    const Pipeline pipe(sc.pipeline);
    sum.csv_path = default_csv_path(sc);
    write_csv(sc, pipe, run.samples, sum.csv_path);
  }
  return sum;
}

inline void print_summary(const ScenarioConfig& sc, const ScenarioSummary& sum, std::FILE* f) {
  std::fprintf(f, "scenario %s\n", sum.name.c_str());
  std::fprintf(f, "  input=%s parameterization=%s estimator=%s dt=%g horizon=%g\n",
               to_string(sc.pipeline.input).c_str(),
               to_string(sc.pipeline.parameterization).c_str(),
               to_string(sc.pipeline.active_estimator).c_str(), sc.dt, sc.horizon);
  if (!sum.csv_path.empty())
    std::fprintf(f, "  csv: %s (%zu rows, schema v%d)\n", sum.csv_path.c_str(), sum.rows,
                 kCsvSchemaVersion);
  auto bank = [&](const char* tag, const Vec5& err) {
    std::fprintf(f, "  |theta_err| %-9s", tag);
    for (int i = 0; i < 5; ++i) std::fprintf(f, " %.3e", std::abs(err(i)));
    std::fprintf(f, "\n");
  };
  if (is_closed_loop(sc.pipeline.input)) {
    std::fprintf(f, "  terminal |q - q*| = %.3e rad\n", sum.tracking_err);
    switch (sc.pipeline.active_estimator) {
      case EstimatorKind::kGradient: bank("gradient", sum.theta_err_grad); break;
      case EstimatorKind::kDrem: bank("drem", sum.theta_err_drem); break;
      case EstimatorKind::kDremNewLre: bank("newlre", sum.theta_err_new); break;
      default: std::fprintf(f, "  known-parameter controller (no adaptation)\n");
    }
  } else {
    bank("gradient", sum.theta_err_grad);
    bank("drem", sum.theta_err_drem);
    bank("newlre", sum.theta_err_new);
  }
  std::fprintf(f, "  delta: peak %.3e terminal %.3e, int delta^2 = %.6e\n", sum.delta_peak,
               sum.delta_terminal, sum.ie_integral);
  std::fprintf(f, "  int |alpha delta| = %.6e (%s over horizon)\n", sum.alpha_delta_l1,
               sum.alpha_delta_converged ? "converged" : "still growing");
  std::fprintf(f, "  excitation: min(phi11^2+phi21^2) = %.4f, int phi21^2 %s\n",
               sum.excitation.min_shell_energy,
               sum.excitation.l2_growing ? "growing (PE proxy holds)" : "flat");
  std::fprintf(f, "  wall time %.2f s\n", sum.wall_seconds);
}

}  // namespace elid
