#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "elid/scenario.hpp"

using namespace elid;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

ScenarioConfig tiny_scenario() {
  ScenarioConfig sc;
  sc.name = "tiny";
  sc.pipeline.input = InputKind::kTauC;
  sc.pipeline.q0 = offset_start(0.2);
  sc.pipeline.gamma_gradient = 0.0;
  sc.pipeline.gamma_drem = 1.0;
  sc.pipeline.gamma_newlre = 1.0;
  sc.dt = 1e-3;
  sc.horizon = 1.0;
  sc.stride = 10;
  return sc;
}

}  // namespace

TEST_CASE("catalog is well-formed", "[scenario]") {
  const auto catalog = scenario_catalog();
  CHECK(catalog.size() == 12);
  std::set<std::string> names;
  for (const auto& sc : catalog) {
    CHECK_NOTHROW(sc.validate());
    CHECK(names.insert(sc.name).second);
    CHECK_FALSE(sc.description.empty());
  }
  CHECK(find_scenario("est-tau_b-powerbal").has_value());
  CHECK_FALSE(find_scenario("nonsense").has_value());
}

TEST_CASE("config file parsing", "[scenario]") {
  const auto path = temp_file("elid_test_config.cfg");
  {
    std::ofstream out(path);
    out << "# comment line\n"
           "[scenario my-run]\n"
           "input = tau_b\n"
           "parameterization = power_balance\n"
           "estimator = drem\n"
           "dt = 0.002\n"
           "horizon = 12.5\n"
           "lambda = 2\n"
           "beta = 0.3\n"
           "gamma_drem = 7\n"
           "k1 = 5\n"
           "k2 = 3, 4\n"
           "q0 = 0.1, -0.2   # inline comment\n"
           "drem_normalized = on\n"
           "geometry = 0.5, 0.5, 1.0, 1.0\n"
           "\n"
           "[scenario second]\n"
           "input = tracking\n";
  }
  const auto scenarios = parse_config_file(path.string());
  REQUIRE(scenarios.size() == 2);
  const ScenarioConfig& sc = scenarios[0];
  CHECK(sc.name == "my-run");
  CHECK(sc.pipeline.input == InputKind::kTauB);
  CHECK(sc.pipeline.parameterization == Parameterization::kPowerBalance);
  CHECK(sc.pipeline.active_estimator == EstimatorKind::kDrem);
  CHECK(sc.dt == 0.002);
  CHECK(sc.horizon == 12.5);
  CHECK(sc.pipeline.lambda == 2.0);
  CHECK(sc.pipeline.pump.beta == 0.3);
  CHECK(sc.pipeline.gamma_drem == 7.0);
  CHECK(sc.pipeline.gains.k1(0) == 5.0);
  CHECK(sc.pipeline.gains.k1(1) == 5.0);
  CHECK(sc.pipeline.gains.k2(0) == 3.0);
  CHECK(sc.pipeline.gains.k2(1) == 4.0);
  CHECK(sc.pipeline.q0(0) == 0.1);
  CHECK(sc.pipeline.drem_normalized);
  CHECK(sc.pipeline.theta_true(0) == Approx(0.25 + 0.25 * 2.0));
  CHECK(scenarios[1].pipeline.input == InputKind::kClosedTracking);
  std::filesystem::remove(path);
}

TEST_CASE("config errors carry field-level messages", "[scenario]") {
  const auto path = temp_file("elid_bad_config.cfg");

  auto write_and_parse = [&](const std::string& body) {
    std::ofstream(path) << body;
    return path.string();
  };

  CHECK_THROWS_WITH(parse_config_file(write_and_parse("[scenario x]\nwhatever = 1\n")),
                    Catch::Contains("unknown config key 'whatever'"));
  CHECK_THROWS_WITH(parse_config_file(write_and_parse("[scenario x]\ninput = tau_q\n")),
                    Catch::Contains("unknown input selector"));
  CHECK_THROWS_WITH(parse_config_file(write_and_parse("[scenario x]\nq0 = 1\n")),
                    Catch::Contains("expected 2"));
  CHECK_THROWS_WITH(parse_config_file(write_and_parse("[scenario x]\ndt = -1\n")),
                    Catch::Contains("dt must be positive"));
  CHECK_THROWS_WITH(parse_config_file(write_and_parse("")), Catch::Contains("no scenario"));
  CHECK_THROWS_AS(parse_config_file("/nonexistent/path.cfg"), std::invalid_argument);
  std::filesystem::remove(path);
}

TEST_CASE("csv schema is pinned", "[scenario]") {
  ScenarioConfig open = tiny_scenario();
  open.pipeline.parameterization = Parameterization::kPowerBalance;
  const auto open_cols = csv_columns(open);
  const std::vector<std::string> expected_head = {"t",    "q1",   "q2", "qd1",
                                                  "qd2",  "tau1", "tau2", "y", "delta"};
  REQUIRE(open_cols.size() >= expected_head.size());
  for (std::size_t i = 0; i < expected_head.size(); ++i) CHECK(open_cols[i] == expected_head[i]);
  // 9 + ycal(5) + phi21(5) + ynew(5) + 3 banks(15) + err(5) + 2 ints + intphi(5)
  CHECK(open_cols.size() == 9 + 5 + 5 + 5 + 15 + 5 + 2 + 5);

  ScenarioConfig closed = tiny_scenario();
  closed.pipeline.input = InputKind::kClosedTracking;
  closed.pipeline.parameterization = Parameterization::kClassical;
  const auto closed_cols = csv_columns(closed);
  CHECK(closed_cols[7] == "y1");
  CHECK(closed_cols[8] == "y2");
  CHECK(closed_cols.back() == "qtil2");
  // 10 + ycal(5) + phi21(5) + ynew(5) + active bank(5) + err(5) + 2 + 5 + qstar/qtil(4)
  CHECK(closed_cols.size() == 10 + 5 + 5 + 5 + 5 + 5 + 2 + 5 + 4);
}

TEST_CASE("scenario runs are deterministic and write the declared schema", "[scenario]") {
  ScenarioConfig sc = tiny_scenario();
  const auto out1 = temp_file("elid_det_1.csv");
  const auto out2 = temp_file("elid_det_2.csv");
  sc.out_path = out1.string();
  const ScenarioSummary sum1 = run_scenario(sc);
  sc.out_path = out2.string();
  const ScenarioSummary sum2 = run_scenario(sc);

  const std::string bytes1 = slurp(out1.string());
  const std::string bytes2 = slurp(out2.string());
  REQUIRE_FALSE(bytes1.empty());
  CHECK(bytes1 == bytes2);

  // header row matches csv_columns exactly
  std::string header = bytes1.substr(0, bytes1.find('\n'));
  std::stringstream ss(header);
  std::string col;
  std::vector<std::string> cols;
  while (std::getline(ss, col, ',')) cols.push_back(col);
  CHECK(cols == csv_columns(sc));

  CHECK(sum1.rows == sum2.rows);
  CHECK(sum1.rows == 101);  // 1 s at dt 1e-3, stride 10, plus the initial row
  std::filesystem::remove(out1);
  std::filesystem::remove(out2);
}

TEST_CASE("scenario summary surfaces the run diagnostics", "[scenario]") {
  ScenarioConfig sc = tiny_scenario();
  sc.horizon = 2.0;
  const ScenarioSummary sum = run_scenario(sc, /*write_output=*/false);
  CHECK(sum.name == "tiny");
  CHECK(sum.rows == 201);
  CHECK(sum.ie_integral >= 0.0);
  CHECK(sum.delta_peak >= sum.delta_terminal);
  CHECK(sum.wall_seconds > 0.0);
  CHECK(sum.csv_path.empty());
}

TEST_CASE("invalid selector strings are rejected", "[scenario]") {
  CHECK_THROWS_AS(input_from_string("tau_x"), std::invalid_argument);
  CHECK_THROWS_AS(parameterization_from_string("pb"), std::invalid_argument);
  CHECK_THROWS_AS(estimator_from_string("lsq"), std::invalid_argument);
  CHECK(to_string(input_from_string("regulation")) == "regulation");
}
