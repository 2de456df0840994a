#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlscatter/cli.hpp"
#include "nlscatter/errors.hpp"

using namespace nlscatter;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("nlscatter_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_text(const std::string& json, const fs::path& out) {
  fs::create_directories(out);
  const auto cfg = out / "config.json";
  std::ofstream(cfg) << json;
  std::ostringstream log;
  return run_config_file(cfg.string(), (out / "run").string(), 1, log);
}

}  // namespace

TEST(Config, RoundTripIsExact) {
  RunConfig c;
  c.kind = "expand";
  c.expand.eps = {0.3, 0.1 / 3.0};
  c.nonlinearity.name = "polynomial";
  c.nonlinearity.coeffs = {0.0, 0.0, 0.0, 0.1, 0.0, 1.0};
  c.field.kind = "table";
  c.field.values = {0.1, -0.2, 1e-17};
  c.seed = 42;
  const auto text = dump_config(c);
  const auto back = parse_config(text);
  EXPECT_EQ(dump_config(back), text);
  EXPECT_EQ(back.expand.eps[1], 0.1 / 3.0);
  EXPECT_EQ(back.seed, 42u);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("{"), ConfigurationError);
  EXPECT_THROW(parse_config(R"({"kind":"validate"})"), ConfigurationError);
  EXPECT_THROW(parse_config(R"({"schema":2,"kind":"validate"})"), ConfigurationError);
  EXPECT_THROW(parse_config(R"({"schema":1,"kind":"plot"})"), ConfigurationError);
  EXPECT_THROW(parse_config(R"({"schema":1,"grid":{"r_max":1,"nn":4}})"), ConfigurationError);
  EXPECT_THROW(parse_config(R"({"schema":1,"grid":{"n":"many"}})"), ConfigurationError);
  EXPECT_THROW(parse_config(R"({"schema":1,"solver":{"cfl_ratio":1.5}})"), ConfigurationError);
  EXPECT_THROW(parse_config(R"({"schema":1,"kind":"scatter","field":{"kind":"file","path":"/nonexistent"}})"),
               ConfigurationError);
  EXPECT_NO_THROW(parse_config(R"({"schema":1,"kind":"geometry","cones":{"type":"quadruple"}})"));
}

TEST(Cli, ValidateQuinticPasses) {
  const auto out = scratch("validate");
  EXPECT_EQ(run_text(R"({"schema":1,"kind":"validate"})", out), kExitOk);
  const auto m = slurp(out / "run" / "manifest.json");
  EXPECT_NE(m.find("\"status\": \"complete\""), std::string::npos);
  EXPECT_NE(m.find("\"all_passed\": 1.0"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "run" / "validation.csv"));
}

TEST(Cli, ZeroFieldScattersToZero) {
  const auto out = scratch("scatter");
  EXPECT_EQ(run_text(R"({"schema":1,"kind":"scatter","field":{"kind":"zero"}})", out), kExitOk);
  std::ifstream is(out / "run" / "forward.csv");
  std::string line;
  std::getline(is, line);
  int rows = 0;
  while (std::getline(is, line)) {
    EXPECT_EQ(std::stod(line.substr(line.find(',') + 1)), 0.0);
    ++rows;
  }
  EXPECT_GT(rows, 0);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_text(R"({"schema":1,"kind":"bogus"})", scratch("bogus")), kExitPrecondition);
  const auto out = scratch("guard");
  EXPECT_EQ(run_text(R"({"schema":1,"kind":"solve","grid":{"r_max":10,"n":256},
                          "data":{"amplitude":50,"width":0.3},"solver":{"end_time":5}})",
                     out),
            kExitNumericalGuard);
  const auto m = slurp(out / "run" / "manifest.json");
  EXPECT_NE(m.find("\"status\": \"incomplete\""), std::string::npos);
  std::ostringstream log;
  EXPECT_EQ(run_config_file((out / "missing.json").string(), (out / "x").string(), 1, log), kExitPrecondition);
}

TEST(Cli, DeterministicOutputs) {
  const std::string cfg = R"({"schema":1,"kind":"geometry","cones":{"n_theta":16}})";
  const auto a = scratch("det_a"), b = scratch("det_b");
  ASSERT_EQ(run_text(cfg, a), kExitOk);
  ASSERT_EQ(run_text(cfg, b), kExitOk);
  EXPECT_EQ(slurp(a / "run" / "pattern.csv"), slurp(b / "run" / "pattern.csv"));
  EXPECT_EQ(slurp(a / "run" / "plane_1.csv"), slurp(b / "run" / "plane_1.csv"));
}

TEST(Cli, ReconstructionFromConfiguredNonlinearity) {
  const auto out = scratch("recover");
  EXPECT_EQ(run_text(R"({"schema":1,"kind":"recover"})", out), kExitOk);
  const auto m = slurp(out / "run" / "manifest.json");
  const auto k = m.find("sup_error_vs_configured");
  ASSERT_NE(k, std::string::npos);
  EXPECT_LT(std::stod(m.substr(m.find(':', k) + 1)), 1e-6);
}
