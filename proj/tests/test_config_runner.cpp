#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ssep/config.hpp"
#include "ssep/errors.hpp"
#include "ssep/runner.hpp"

namespace ssep {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("ssep_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const int status = std::system((std::string(SSEP_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Config, DefaultsAndFile) {
  const auto c = load_config("", {});
  EXPECT_EQ(c.degree, 2);
  EXPECT_EQ(c.seed, 12345U);
  EXPECT_FALSE(c.radius.has_value());
  const auto dir = scratch("cfg");
  const auto path = write_file(dir / "a.ini",
                               "[model]\ndegree = 3\nradius = 4\n[function]\nkind = product\nsites = root,0\n"
                               "[run]\nt = 10, 20\nreps = 77\n");
  const auto d = load_config(path, {"run.seed=9", "model.density=0.25"});
  EXPECT_EQ(d.degree, 3);
  EXPECT_EQ(d.radius, 4);
  EXPECT_EQ(d.t_grid, (std::vector<double>{10, 20}));
  EXPECT_EQ(d.reps, 77U);
  EXPECT_EQ(d.seed, 9U);
  EXPECT_EQ(d.density, 0.25);
  EXPECT_EQ(d.function().m(), 2U);
  EXPECT_NEAR(d.function().table()[3], 1 - 0.0625, 1e-15);
}

TEST(Config, AutoRadiusUsesHorizonAndSupport) {
  const auto c = load_config("", {"function.sites=0.1"});
  EXPECT_EQ(c.support_radius(), 2.0);
  EXPECT_EQ(c.radius_for(40.0), truncation_radius(2, 2.0, 40.0, 3.0));
  EXPECT_EQ(load_config("", {"model.radius=7"}).radius_for(40.0), 7);
}

TEST(Config, FieldLevelErrors) {
  const auto expect_field = [](const std::vector<std::string>& o, const std::string& field) {
    try {
      load_config("", o);
      ADD_FAILURE() << "accepted " << o.front();
    } catch (const ValidationError& e) {
      EXPECT_EQ(std::string(e.what()).rfind(field + ":", 0), 0U) << e.what();
    }
  };
  expect_field({"model.degree=1"}, "model.degree");
  expect_field({"model.density=1.5"}, "model.density");
  expect_field({"run.gamma=0.4"}, "run.gamma");
  expect_field({"run.reps=abc"}, "run.reps");
  expect_field({"model.colour=red"}, "model.colour");
  expect_field({"function.kind=table", "function.table=1,2,3"}, "function.table");
  EXPECT_THROW(load_config("", {"novalue"}), ValidationError);
  EXPECT_THROW(load_config("/nonexistent/ssep.ini", {}), ValidationError);
}

TEST(Config, EnvironmentOverrides) {
  setenv("SSEP_WORKERS", "3", 1);
  setenv("SSEP_OUTPUT_DIR", "/tmp/ssep_env_dir", 1);
  const auto c = load_config("", {});
  unsetenv("SSEP_WORKERS");
  unsetenv("SSEP_OUTPUT_DIR");
  EXPECT_EQ(c.workers, 3U);
  EXPECT_EQ(c.output_dir, "/tmp/ssep_env_dir");
}

TEST(Config, ResolvedRoundTrip) {
  const auto dir = scratch("resolved");
  const auto c = load_config("", {"model.degree=3", "run.t=5,7.5", "function.sites=1"});
  std::ostringstream os;
  c.write(os);
  const auto back = load_config(write_file(dir / "r.ini", os.str()), {});
  std::ostringstream os2;
  back.write(os2);
  EXPECT_EQ(os.str(), os2.str());
}

TEST(Runner, VerifyPassesAndWritesResolvedConfig) {
  const auto dir = scratch("verify");
  auto c = load_config("", {"run.output_dir=" + dir.string()});
  std::ostringstream report;
  EXPECT_EQ(run("verify", c, report), kExitOk) << report.str();
  EXPECT_EQ(report.str().find("FAIL"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "verify.resolved.ini"));
}

TEST(Runner, SigmaRefusesUncenteredFunction) {
  auto c = load_config("", {"function.kind=table", "function.sites=", "function.table=0,1"});
  std::ostringstream report;
  try {
    run("sigma", c, report);
    FAIL() << "uncentered F was accepted";
  } catch (const NotCentered& e) {
    EXPECT_NE(std::string(e.what()).find("center"), std::string::npos);
    EXPECT_EQ(exit_code_for(e), kExitInvalidConfig);
  }
}

TEST(Runner, SimulateIsReproducible) {
  const auto a = scratch("sim_a"), b = scratch("sim_b");
  const std::vector<std::string> base{"run.t=2,4", "run.reps=50", "model.radius=12"};
  auto ca = base, cb = base;
  ca.push_back("run.output_dir=" + a.string());
  cb.push_back("run.output_dir=" + b.string());
  cb.push_back("run.workers=3");
  std::ostringstream sink;
  ASSERT_EQ(run("simulate", load_config("", ca), sink), kExitOk);
  ASSERT_EQ(run("simulate", load_config("", cb), sink), kExitOk);
  const auto xa = read_file(a / "xi.csv");
  EXPECT_EQ(xa, read_file(b / "xi.csv"));
  EXPECT_EQ(xa.rfind("# ssep-xi v1\npath_id,t,xi,seed\n", 0), 0U);
  // 50 paths x 2 times
  EXPECT_EQ(std::count(xa.begin(), xa.end(), '\n'), 102);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  const std::string out = " -s run.output_dir=" + dir.string();
  EXPECT_EQ(cli("verify" + out), 0);
  EXPECT_EQ(cli("verify -s model.degree=one" + out), 2);
  EXPECT_EQ(cli("bogus"), 2);
  EXPECT_EQ(cli("verify -c " + write_file(dir / "bad.ini", "[model]\ndensity = -1\n") + out), 2);
  EXPECT_EQ(cli("sigma -s function.kind=table -s function.sites= -s function.table=0,1" + out), 2);
  EXPECT_EQ(cli("decompose -s run.decompose_radius=3 -s model.tuple_cap=10" + out), 3);
}

}  // namespace
}  // namespace ssep
