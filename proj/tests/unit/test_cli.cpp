#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(ORLICZ_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("orlicz_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& body) {
    std::ofstream(dir_ / name) << body;
    return dir_ / name;
  }

  fs::path dir_;
};

const char* solve_cfg = R"([run]
experiment = solve
[orlicz]
kind = power
p = 2
[domain]
lo = [-1]
hi = [1]
cells = 512
[function]
id = poly
coeffs = [0, 0, 1]
[space]
m = 1
[opts]
seed = 7
)";

}  // namespace

TEST_F(Cli, Help) { EXPECT_EQ(cli("--help"), 0); }

TEST_F(Cli, VerifyCoreWritesSummary) {
  EXPECT_EQ(cli("verify-core --out " + (dir_ / "v").string()), 0);
  const auto j = nlohmann::json::parse(slurp(dir_ / "v" / "summary.json"));
  EXPECT_EQ(j["status"], "pass");
}

TEST_F(Cli, SolveIsReproducible) {
  const auto cfg = write("solve.ini", solve_cfg);
  ASSERT_EQ(cli("solve --config " + cfg.string() + " --out " + (dir_ / "a").string()), 0);
  ASSERT_EQ(cli("solve --config " + cfg.string() + " --out " + (dir_ / "b").string()), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "summary.json"), slurp(dir_ / "b" / "summary.json"));
  EXPECT_EQ(slurp(dir_ / "a" / "trace.csv"), slurp(dir_ / "b" / "trace.csv"));
}

TEST_F(Cli, OverridesApply) {
  const auto cfg = write("solve.ini", solve_cfg);
  ASSERT_EQ(cli("solve --config " + cfg.string() + " --seed 11 --resolution 256 --out " + dir_.string()), 0);
  const auto j = nlohmann::json::parse(slurp(dir_ / "summary.json"));
  EXPECT_EQ(j["seed"], 11);
  EXPECT_EQ(j["result"]["grid_points"], 256);
}

TEST_F(Cli, ConfigProblemsExitTwo) {
  EXPECT_EQ(cli("solve"), 2);
  EXPECT_EQ(cli("solve --config " + (dir_ / "missing.ini").string() + " --out " + dir_.string()), 2);
  const auto cfg = write("solve.ini", solve_cfg);
  EXPECT_EQ(cli("extend --config " + cfg.string() + " --out " + (dir_ / "e").string()), 2);
  const auto j = nlohmann::json::parse(slurp(dir_ / "e" / "summary.json"));
  EXPECT_EQ(j["error"]["field"], "run.experiment");
  EXPECT_EQ(cli("frobnicate"), 2);
}

TEST_F(Cli, NumericFailureExitsThree) {
  std::string body = solve_cfg;
  body.replace(body.find("id = poly\ncoeffs = [0, 0, 1]"), 28, "id = exp\nrate = 1000");
  const auto cfg = write("bad.ini", body);
  EXPECT_EQ(cli("solve --config " + cfg.string() + " --out " + dir_.string()), 3);
}

TEST_F(Cli, ListFunctions) {
  EXPECT_EQ(cli("list-functions --out " + dir_.string()), 0);
  const auto j = nlohmann::json::parse(slurp(dir_ / "functions.json"));
  EXPECT_EQ(j.size(), 8u);
}
