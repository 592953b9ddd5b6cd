#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hso/harness/config.hpp"
#include "hso/harness/runner.hpp"
#include "hso/harness/svg_plot.hpp"

namespace hso::harness {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hso_harness_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

TEST(ParseConfig, AcademicDefaults) {
  const RunConfig c = parse_config("scenario = academic\n");
  EXPECT_EQ(c.scenario.schedule.cond_threshold, 1e8);
  EXPECT_EQ(c.scenario.schedule.purge_period, 2.0);
  EXPECT_EQ(c.scenario.schedule.data_period, 0.08);
  EXPECT_EQ(c.scenario.name, "academic");
  const RunConfig empty = parse_config("");
  EXPECT_EQ(empty.scenario.schedule.cond_threshold, 1e8);
}

TEST(ParseConfig, QuadcopterDefaults) {
  const RunConfig c = parse_config("scenario = quadcopter\n");
  EXPECT_EQ(c.scenario.schedule.epsilon, 0.002);
  EXPECT_EQ(c.scenario.sys.A.rows(), 12);
}

TEST(ParseConfig, Overrides) {
  const RunConfig c = parse_config(
      "# header comment\n"
      "scenario = academic\n"
      "scenario.epsilon = 0.5   # trailing comment\n"
      "scenario.purge_policy = or\n"
      "scenario.observer_poles = -1, -2, -3\n"
      "scenario.x0 = 1 2 3\n"
      "run.T = 4\n"
      "run.h = 0.004\n"
      "run.seed = 9\n"
      "run.emit_svg = true\n"
      "excitation.count = 3\n"
      "excitation.recorded_input = applied\n"
      "cost.Q = 1,0,0; 0,2,0; 0,0,3\n"
      "certify.hjb_tol = 0.01\n");
  EXPECT_EQ(c.scenario.schedule.epsilon, 0.5);
  EXPECT_EQ(c.scenario.schedule.purge_policy, PurgePolicy::kOr);
  EXPECT_EQ(c.scenario.schedule.observer_poles, (std::vector<double>{-1, -2, -3}));
  EXPECT_EQ(c.scenario.x0, Eigen::Vector3d(1, 2, 3));
  EXPECT_EQ(c.horizon, 4.0);
  EXPECT_EQ(c.step, 0.004);
  EXPECT_EQ(c.scenario.excitation.seed, 9u);
  EXPECT_TRUE(c.emit_svg);
  EXPECT_EQ(c.scenario.excitation.count, 3);
  EXPECT_EQ(c.scenario.excitation.recorded_input, RecordedInput::kAppliedInput);
  EXPECT_EQ(c.scenario.expert_cost.Q(2, 2), 3.0);
  EXPECT_EQ(c.hjb_tol, 0.01);
}

TEST(ParseConfig, QuadParameters) {
  const RunConfig c = parse_config("scenario = quadcopter\nquad.mass = 1.104\n");
  EXPECT_NEAR(c.scenario.sys.A(kXDot, kXDot), -0.01 / 1.104, 1e-15);
  EXPECT_THROW(parse_config("scenario = academic\nquad.mass = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("scenario = quadcopter\nquad.massive = 1\n"), ConfigError);
}

TEST(ParseConfig, CustomScenario) {
  const RunConfig c = parse_config(
      "scenario = custom\n"
      "system.A = 0 1; -1 0\n"
      "system.B = 0; 1\n"
      "cost.Q = 1 0; 0 1\n"
      "cost.R = 2\n"
      "scenario.observer_poles = -1, -2\n");
  EXPECT_EQ(c.scenario.sys.B.cols(), 1);
  EXPECT_EQ(c.scenario.schedule.stack_size, BasisLayout(2, 1).reduced_size());
  EXPECT_THROW(parse_config("scenario = custom\nsystem.A = 1\n"), ConfigError);
}

TEST(ParseConfig, UnknownKeyReportsLineAndKey) {
  try {
    parse_config("scenario = academic\n\nscenario.epsilom = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.key(), "scenario.epsilom");
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(ParseConfig, RejectsMalformedInput) {
  EXPECT_THROW(parse_config("scenario = academic\nrun.T = 1\nrun.T = 2\n"), ConfigError);
  EXPECT_THROW(parse_config("run.T = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("just words\n"), ConfigError);
  EXPECT_THROW(parse_config("scenario = bogus\n"), ConfigError);
  EXPECT_THROW(parse_config("system.A = 1 2; 3\n"), ConfigError);
  EXPECT_THROW(parse_config("scenario.purge_policy = maybe\n"), ConfigError);
  EXPECT_THROW(parse_config("run.emit_svg = perhaps\n"), ConfigError);
}

TEST(ParseConfig, InvariantViolationsNameTheKey) {
  try {
    parse_config("run.h = 0.1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "run.h");
    EXPECT_EQ(e.line(), 1);
  }
  EXPECT_THROW(parse_config("run.T = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("run.h = -1\n"), ConfigError);
  EXPECT_THROW(parse_config("scenario.observer_poles = -1, -2\n"), ConfigError);
  EXPECT_THROW(parse_config("scenario.observer_poles = -1, 2, -3\n"), ConfigError);
  EXPECT_THROW(parse_config("observer.K3 = 1 0; 0 1\n"), ConfigError);
  EXPECT_THROW(parse_config("excitation.channels = 5\n"), ConfigError);
}

TEST(ParseConfig, OutputDirectoryFromEnvironment) {
  ::setenv(kOutputDirEnv, "/tmp/hso_env_dir", 1);
  EXPECT_EQ(parse_config("").output_dir, fs::path("/tmp/hso_env_dir"));
  EXPECT_EQ(parse_config("run.output_dir = elsewhere\n").output_dir, fs::path("elsewhere"));
  ::unsetenv(kOutputDirEnv);
  EXPECT_EQ(parse_config("").output_dir, fs::path("hso_out"));
}

TEST(LoadConfig, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/hso.cfg"), ConfigError);
}

TEST(LoadConfig, ReadsFile) {
  const fs::path dir = scratch("load");
  fs::create_directories(dir);
  std::ofstream(dir / "c.cfg") << "scenario = quadcopter\nrun.T = 3\n";
  EXPECT_EQ(load_config(dir / "c.cfg").horizon, 3.0);
}

RunConfig short_run(const std::string& name) {
  RunConfig c = parse_config("scenario = academic\nrun.T = 30\nrun.h = 0.002\n");
  c.output_dir = scratch(name);
  return c;
}

TEST(Run, WritesTimeseriesWithContractColumns) {
  const RunConfig c = short_run("columns");
  const RunSummary s = run(c);
  const std::string text = slurp(c.output_dir / "timeseries.csv");
  std::stringstream ss(text);
  std::string header, row;
  std::getline(ss, header);
  const auto cols = split(header);
  ASSERT_EQ(cols.size(), 5u + 3 + 3 + 3 + 3 + 3);
  EXPECT_EQ(cols[0], "t");
  EXPECT_EQ(cols[1], "delta_norm");
  EXPECT_EQ(cols[2], "gain_error_fro");
  EXPECT_EQ(cols[3], "sigma_u_residual");
  EXPECT_EQ(cols[4], "cond_reg");
  EXPECT_EQ(cols[5], "q_hat_0");
  EXPECT_EQ(cols[8], "r_hat_0");
  EXPECT_EQ(cols[11], "x_0");
  EXPECT_EQ(cols[14], "x_hat_0");
  EXPECT_EQ(cols[17], "u_0");
  int rows = 0;
  std::string last;
  while (std::getline(ss, row)) {
    ++rows;
    EXPECT_EQ(split(row).size(), cols.size());
    last = row;
  }
  EXPECT_EQ(rows, 376);  // t = 0, 0.08, ..., 30.0
  // %.9g formatting: at most nine significant digits per value.
  for (const std::string& cell : split(last)) {
    std::string digits;
    for (char ch : cell.substr(0, cell.find('e'))) {
      if (std::isdigit(static_cast<unsigned char>(ch))) digits += ch;
    }
    const auto first = digits.find_first_not_of('0');
    EXPECT_LE(first == std::string::npos ? 0 : digits.size() - first, 9u) << cell;
  }
  EXPECT_TRUE(fs::exists(c.output_dir / "final_solution.csv"));
  EXPECT_TRUE(fs::exists(c.output_dir / "stack_h1.csv"));
  EXPECT_EQ(s.scenario, "academic");
  EXPECT_GE(s.swap_count, 1);
  EXPECT_NE(s.line().find("swaps="), std::string::npos);
}

TEST(Run, ByteIdenticalAcrossRuns) {
  const RunConfig a = short_run("det_a");
  const RunConfig b = short_run("det_b");
  run(a);
  run(b);
  EXPECT_EQ(slurp(a.output_dir / "timeseries.csv"), slurp(b.output_dir / "timeseries.csv"));
  EXPECT_EQ(slurp(a.output_dir / "final_solution.csv"),
            slurp(b.output_dir / "final_solution.csv"));
}

TEST(Run, EmitsWellFormedSvgs) {
  RunConfig c = short_run("svg");
  c.emit_svg = true;
  run(c);
  for (const char* name : {"delta_norm.svg", "gain_error.svg", "q_hat_diag.svg", "r_hat_diag.svg"}) {
    const std::string svg = slurp(c.output_dir / name);
    ASSERT_FALSE(svg.empty()) << name;
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u) << name;
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_NE(svg.find("<polyline"), std::string::npos) << name;
  }
}

TEST(Run, FlushesPartialCsvOnFailure) {
  RunConfig c = parse_config(
      "scenario = academic\nrun.T = 3\n"
      "observer.K3 = -1000 0 0; 0 -1000 0; 0 0 -1000\n");
  c.output_dir = scratch("partial");
  EXPECT_THROW(run(c), Error);
  const std::string text = slurp(c.output_dir / "timeseries.csv");
  EXPECT_NE(text.find("\n0.08,"), std::string::npos);
}

TEST(CheckInformativity, ZeroDataNeverInformative) {
  RunConfig c = parse_config(
      "scenario = academic\nrun.T = 3\nrun.h = 0.004\nexcitation.count = 0\n"
      "scenario.x0 = 0 0 0\n");
  const InformativitySummary s = check_informativity(c);
  EXPECT_FALSE(s.first_fi_time.has_value());
  std::ostringstream os;
  print_informativity(os, s);
  EXPECT_NE(os.str().find("first_fi_t=never"), std::string::npos);
  EXPECT_NE(os.str().find("span_ok=no"), std::string::npos);
}

TEST(SynthLqr, PrintsGainAndResidual) {
  std::ostringstream os;
  print_expert(os, synth_lqr(parse_config("")));
  EXPECT_NE(os.str().find("K_EP"), std::string::npos);
  EXPECT_NE(os.str().find("-1.3092503"), std::string::npos);
  EXPECT_NE(os.str().find("riccati_residual"), std::string::npos);
}

TEST(LineChart, BreaksOnNonFiniteValues) {
  const std::vector<double> x = {0, 1, 2, 3, 4};
  const std::string svg = line_chart_svg(
      x, {{"a", {1, 2, std::nan(""), 4, 5}}}, {.title = "t<1>"});
  std::size_t count = 0;
  for (auto p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) {
    ++count;
  }
  EXPECT_EQ(count, 2u);
  EXPECT_NE(svg.find("t&lt;1&gt;"), std::string::npos);
  EXPECT_THROW(line_chart_svg(x, {{"b", {1, 2}}}, {}), DimensionMismatch);
}

TEST(LineChart, LogAxisSkipsNonPositive) {
  const std::string svg =
      line_chart_svg({0, 1, 2}, {{"a", {1e-3, 0.0, 10.0}}}, {.title = "", .log_y = true});
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_NE(svg.find("1e"), std::string::npos);
}

}  // namespace
}  // namespace hso::harness
