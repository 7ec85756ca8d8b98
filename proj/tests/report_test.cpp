#include "buckle/disc_oracle.hpp"
#include "buckle/report.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace buckle;

namespace {

RunConfig quick_config() {
  RunConfig c;
  c.h = 0.1;
  c.levels = 2;
  return c;
}

int count_lines(const std::string& s) {
  std::istringstream is(s);
  int n = 0;
  for (std::string line; std::getline(is, line);) ++n;
  return n;
}

}  // namespace

TEST(Config, TextAndJsonRoundTrips) {
  RunConfig c;
  c.curve = "fourier";
  c.cos_coeffs = {0.0, 0.1 / 3.0, -0.02};
  c.sin_coeffs = {0.0, 0.0, 1e-3 / 7.0};
  c.scale = 1.0 / 3.0;
  c.field = "translation";
  c.mode = 2;
  c.seed = 7u;
  EXPECT_EQ(parse_config(config_to_text(c)), c);
  EXPECT_EQ(config_from_json(config_to_json(c)), c);
  EXPECT_EQ(parse_config(config_to_json(c).dump()), c);
}

TEST(Config, KeyValueTextWithComments) {
  const RunConfig c = parse_config(
      "# ellipse run\n"
      "curve = ellipse\n"
      "semi_a = 1.25   # major\n"
      "semi_b = 0.8\n"
      "\n"
      "levels = 2\n");
  EXPECT_EQ(c.curve, "ellipse");
  EXPECT_EQ(c.semi_a, 1.25);
  EXPECT_EQ(c.semi_b, 0.8);
  EXPECT_EQ(c.levels, 2);
  EXPECT_EQ(c.h, RunConfig{}.h);
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse_config("curve disc\n"), ConfigError);
  EXPECT_THROW(parse_config("colour = red\n"), ConfigError);
  EXPECT_THROW(parse_config("levels = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("levels = 7\n"), ConfigError);
  EXPECT_THROW(parse_config("tolerance = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("h = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("curve = square\n"), ConfigError);
  EXPECT_THROW(parse_config("{\"levels\": "), ConfigError);
  EXPECT_THROW(parse_config("{\"levels\": \"two\"}"), ConfigError);
}

TEST(Config, HashIsStableAndSensitive) {
  const RunConfig a;
  RunConfig b;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.h = 0.05;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(parse_config(config_to_text(b))), config_hash(b));
}

TEST(Config, FinestMeshSize) {
  RunConfig c;
  c.h = 0.2;
  c.levels = 3;
  EXPECT_DOUBLE_EQ(c.finest_h(), 0.05);
}

TEST(Commands, OracleReportsAnalyticDiscValues) {
  RunConfig c;
  c.radius = 2.0;
  const CommandResult r = cmd_oracle(c);
  EXPECT_EQ(r.status, exit_ok);
  EXPECT_NEAR(r.report["lambda"].get<double>(), disc_buckling(2.0).eigenvalue, 1e-14);
  EXPECT_NEAR(r.report["lambda"].get<double>(), r.report["lambda2"].get<double>(), 1e-12);
  EXPECT_EQ(r.report["config_hash"], config_hash(c));
  EXPECT_EQ(r.report["version"], version_string());
}

TEST(Commands, GuardMapsFailuresToExitCodes) {
  RunConfig c = quick_config();
  c.curve = "ellipse";
  const CommandResult oracle = run_guarded("oracle", c, cmd_oracle);
  EXPECT_EQ(oracle.status, exit_input);
  EXPECT_TRUE(oracle.report.contains("error"));

  c.levels = 1;
  const CommandResult psi = run_guarded("psi", c, cmd_psi);
  EXPECT_EQ(psi.status, exit_refused);
  EXPECT_EQ(psi.report["error"]["kind"], "gate_refusal");

  const CommandResult var = run_guarded("variations", c, cmd_variations);
  EXPECT_EQ(var.status, exit_refused);
  EXPECT_EQ(var.report["second"]["status"], "refused");
  EXPECT_TRUE(var.report["first"].contains("formula"));
}

TEST(Commands, SolveWritesConvergenceTable) {
  const RunConfig c = quick_config();
  const CommandResult r = cmd_solve(c);
  ASSERT_EQ(r.status, exit_ok);
  ASSERT_EQ(r.report["levels"].size(), 2u);
  const double e0 = std::abs(r.report["levels"][0]["lambda"].get<double>() - r.report["reference"].get<double>());
  const double e1 = std::abs(r.report["levels"][1]["lambda"].get<double>() - r.report["reference"].get<double>());
  EXPECT_LT(e1, 0.5 * e0);
  EXPECT_TRUE(r.report["criticality"]["critical"].get<bool>());
  EXPECT_GT(r.report["observed_order"].get<double>(), 1.5);
  ASSERT_TRUE(r.files.contains("convergence.csv"));
  ASSERT_TRUE(r.files.contains("convergence.svg"));
  EXPECT_EQ(count_lines(r.files.at("convergence.csv")), 3);
  EXPECT_NE(r.files.at("convergence.csv").find("relative_error"), std::string::npos);
  EXPECT_EQ(r.files.at("convergence.svg").rfind("<svg", 0), 0u);
  // reruns are bit-identical
  EXPECT_EQ(cmd_solve(c).report.dump(), r.report.dump());
}

TEST(Commands, ConvergenceCsvWithoutReference) {
  LevelRow row;
  row.level = 0;
  row.h = 0.1;
  row.lambda = 14.7;
  const std::string csv = convergence_csv({row}, std::numeric_limits<double>::quiet_NaN());
  EXPECT_EQ(csv.find("relative_error"), std::string::npos);
  EXPECT_EQ(count_lines(csv), 2);
}

TEST(Format, ShortestRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 14.681970642123893, -2.5e-17})
    EXPECT_EQ(std::stod(format_double(x)), x);
  EXPECT_EQ(format_double(0.5), "0.5");
}
