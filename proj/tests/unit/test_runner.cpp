#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "orlicz/config.hpp"
#include "orlicz/runner.hpp"

using namespace orlicz;
using nlohmann::json;

namespace {

RunArtifacts run_text(const std::string& text) {
  std::istringstream in(text);
  return run(parse_config(in));
}

const std::string solve_cfg = R"([run]
experiment = solve
[orlicz]
kind = piecewise_linear
breakpoints = [1]
slopes = [1, 2]
[domain]
lo = [-1]
hi = [1]
cells = 1024
[function]
id = signed_pow
[space]
m = 1
[opts]
seed = 7
)";

const std::string local_cfg = R"([run]
experiment = local_converge
[orlicz]
kind = power
p = 2
[function]
id = signed_pow
[space]
m = 1
[opts]
x = [0]
seed = 5
trials = 2000
sandwich_samples = 10
eps = [0.5, 0.25, 0.125, 0.0625]
)";

}  // namespace

TEST(Runner, VerifyCorePasses) {
  const auto art = run_text("[run]\nexperiment = verify_core\n");
  EXPECT_EQ(art.exit_code, exit_pass);
  const auto j = json::parse(art.summary_json);
  EXPECT_EQ(j["status"], "pass");
  EXPECT_TRUE(j["seed"].is_null());
  EXPECT_GE(j["checks"].size(), 20u);
  for (const auto& c : j["checks"]) EXPECT_TRUE(c["pass"].get<bool>()) << c["name"];
}

TEST(Runner, SolveSummaryAndTrace) {
  const auto art = run_text(solve_cfg);
  EXPECT_EQ(art.exit_code, exit_pass) << art.summary_json;
  const auto j = json::parse(art.summary_json);
  EXPECT_EQ(j["experiment"], "solve");
  EXPECT_EQ(j["seed"], 7);
  ASSERT_FALSE(art.files.empty());
  EXPECT_EQ(art.files[0].first, "trace.csv");
  EXPECT_EQ(art.files[0].second.rfind("iteration,objective\n", 0), 0u);
  std::set<std::string> names;
  for (const auto& c : j["checks"]) names.insert(c["name"]);
  EXPECT_TRUE(names.count("characterization_residual"));
  EXPECT_TRUE(names.count("solution_bound"));
}

TEST(Runner, ByteIdenticalReruns) {
  const auto a = run_text(solve_cfg);
  const auto b = run_text(solve_cfg);
  EXPECT_EQ(a.summary_json, b.summary_json);
  EXPECT_EQ(a.files, b.files);
}

TEST(Runner, ConfigErrorExitsTwo) {
  std::string text = solve_cfg;
  text.replace(text.find("seed = 7\n"), 9, "");
  const auto art = run_text(text);
  EXPECT_EQ(art.exit_code, exit_config_error);
  const auto j = json::parse(art.summary_json);
  EXPECT_EQ(j["status"], "error");
  EXPECT_EQ(j["error"]["kind"], "config");
  EXPECT_EQ(j["error"]["field"], "opts.seed");
}

TEST(Runner, NumericFailureExitsThree) {
  std::string text = solve_cfg;
  text.replace(text.find("id = signed_pow"), 15, "id = exp\nrate = 1000");
  const auto art = run_text(text);
  EXPECT_EQ(art.exit_code, exit_numeric_failure);
  EXPECT_EQ(json::parse(art.summary_json)["status"], "error");
}

TEST(Runner, FailedCheckExitsOne) {
  // the error at eps = 1/16 is 3/64, far above the default 1e-3
  const auto art = run_text(local_cfg);
  EXPECT_EQ(art.exit_code, exit_check_failed);
  const auto j = json::parse(art.summary_json);
  EXPECT_EQ(j["status"], "fail");
  EXPECT_TRUE(j["result"]["constants"].contains("C1"));
  bool saw_failure = false;
  for (const auto& c : j["checks"])
    if (c["name"] == "final_coefficient_error") saw_failure = !c["pass"].get<bool>();
  EXPECT_TRUE(saw_failure);

  EXPECT_EQ(run_text(local_cfg + "error_tol = 0.1\n").exit_code, exit_pass);
}

TEST(Runner, WritesArtifacts) {
  const auto dir = std::filesystem::temp_directory_path() / "orlicz_runner_test";
  std::filesystem::remove_all(dir);
  const auto art = run_text(solve_cfg);
  write_artifacts(art, dir);
  std::ifstream in(dir / "summary.json");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), art.summary_json);
  EXPECT_TRUE(std::filesystem::exists(dir / "trace.csv"));
  std::filesystem::remove_all(dir);
}

TEST(Runner, ErrorRecordAndFunctionList) {
  const auto j = json::parse(error_record("solve", "config", "opts.seed", "missing"));
  EXPECT_EQ(j["exit_code"], 2);
  EXPECT_EQ(json::parse(error_record("solve", "numeric", "", "x"))["exit_code"], 3);
  const auto list = json::parse(list_functions_json());
  ASSERT_TRUE(list.is_array());
  EXPECT_EQ(list.size(), 8u);
  EXPECT_EQ(list[0]["id"], "poly");
}
