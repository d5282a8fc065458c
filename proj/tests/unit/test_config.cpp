#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "orlicz/config.hpp"
#include "orlicz/errors.hpp"

using namespace orlicz;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string field_of(const std::string& text, bool with_validate = true) {
  try {
    const auto cfg = parse(text);
    if (with_validate) validate(cfg);
  } catch (const ConfigError& e) {
    return e.field_path();
  }
  return "<none>";
}

const std::string solve_cfg = R"([run]
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

TEST(Config, ParsesSolveExperiment) {
  const auto cfg = parse(solve_cfg);
  EXPECT_EQ(cfg.experiment, Experiment::solve);
  ASSERT_TRUE(cfg.orlicz.has_value());
  EXPECT_EQ(kind_name(cfg.orlicz->spec), "power");
  EXPECT_EQ(cfg.domain.cells, std::vector<std::size_t>{512});
  ASSERT_TRUE(cfg.function.has_value());
  EXPECT_EQ(cfg.function->id, "poly");
  EXPECT_EQ(cfg.function->params.at("coeffs"), (std::vector<double>{0, 0, 1}));
  EXPECT_EQ(cfg.m, 1);
  EXPECT_EQ(cfg.opts.seed, 7u);
  EXPECT_NO_THROW(validate(cfg));
  EXPECT_EQ(cfg.domain.build().size(), 512u);
}

TEST(Config, ExperimentNames) {
  EXPECT_EQ(parse_experiment("local-converge"), Experiment::local_converge);
  EXPECT_EQ(parse_experiment("local_converge"), Experiment::local_converge);
  EXPECT_EQ(parse_experiment("verify-core"), Experiment::verify_core);
  EXPECT_FALSE(parse_experiment("bogus").has_value());
  EXPECT_EQ(to_string(Experiment::continuity), "continuity");
}

TEST(Config, NumberLists) {
  EXPECT_EQ(parse_number_list("[1, 2.5]", "x"), (std::vector<double>{1, 2.5}));
  EXPECT_EQ(parse_number_list("1, 2.5", "x"), (std::vector<double>{1, 2.5}));
  EXPECT_EQ(parse_number_list("3", "x"), (std::vector<double>{3}));
  EXPECT_THROW(parse_number_list("[1, two]", "x"), ConfigError);
  EXPECT_THROW(parse_number_list("[1, 2", "x"), ConfigError);
}

TEST(Config, ErrorsCarryFieldPaths) {
  EXPECT_EQ(field_of("[run]\nexperiment = dance\n"), "run.experiment");
  EXPECT_EQ(field_of("[orlicz]\nkind = power\n"), "run.experiment");
  EXPECT_EQ(field_of(solve_cfg + "[extra]\nkey = 1\n"), "extra");
  EXPECT_EQ(field_of(solve_cfg + "[output]\nfolder = x\n"), "output.folder");

  auto replace = [](std::string s, const std::string& from, const std::string& to) {
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  EXPECT_EQ(field_of(replace(solve_cfg, "seed = 7\n", "")), "opts.seed");
  EXPECT_EQ(field_of(replace(solve_cfg, "seed = 7", "seed = -3")), "opts.seed");
  EXPECT_EQ(field_of(replace(solve_cfg, "p = 2", "p = two")), "orlicz.p");
  EXPECT_EQ(field_of(replace(solve_cfg, "p = 2\n", "")), "orlicz.p");
  EXPECT_EQ(field_of(replace(solve_cfg, "kind = power", "kind = cubic")), "orlicz.kind");
  EXPECT_EQ(field_of(replace(solve_cfg, "id = poly", "id = wavelet")), "function.id");
  EXPECT_EQ(field_of(replace(solve_cfg, "coeffs", "weights")), "function");
  EXPECT_EQ(field_of(replace(solve_cfg, "cells = 512", "cells = 0")), "domain.cells");
  EXPECT_EQ(field_of(replace(solve_cfg, "hi = [1]", "hi = [-2]")), "domain.hi");
  EXPECT_EQ(field_of(replace(solve_cfg, "m = 1", "m = 1\nn = 2")), "space.n");
  EXPECT_EQ(field_of(replace(solve_cfg, "m = 1", "m = -1")), "space.m");
  EXPECT_EQ(field_of(replace(solve_cfg, "seed = 7", "seed = 7\ntol = 0")), "opts.tol");
}

TEST(Config, GeneratorErrorsMapToOrliczSection) {
  OrliczConfig bad{PowerGenerator{1.0}, {}};
  try {
    build_orlicz(bad);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field_path(), "orlicz");
  }
}

TEST(Config, LocalScheduleNeedsFourRadii) {
  const std::string local = R"([run]
experiment = local-converge
[orlicz]
kind = power
p = 2
[function]
id = signed_pow
[space]
m = 1
[opts]
x = [0]
seed = 1
eps = [0.5, 0.25, 0.125]
)";
  EXPECT_EQ(field_of(local), "opts.eps");
}

TEST(Config, VerifyCoreNeedsNoSeed) {
  EXPECT_EQ(field_of("[run]\nexperiment = verify_core\n"), "<none>");
}

TEST(Config, OtherGeneratorKinds) {
  const auto cfg = parse(
      "[run]\nexperiment = verify_core\n[orlicz]\nkind = piecewise_power\nbreakpoints = [1]\n"
      "coefficients = [1, 2]\nexponents = [1, 2]\nlambda_phi = 20\n");
  ASSERT_TRUE(cfg.orlicz.has_value());
  EXPECT_EQ(kind_name(cfg.orlicz->spec), "piecewise_power");
  EXPECT_EQ(cfg.orlicz->declared.lambda_phi, 20.0);
  EXPECT_NO_THROW(build_orlicz(*cfg.orlicz));
  const auto table = parse("[run]\nexperiment = verify_core\n[orlicz]\nkind = table\ns = [0, 1, 1, 100]\npsi = [0, 1, 2, 200]\n");
  EXPECT_NEAR(build_orlicz(*table.orlicz).phi(2.0), 3.5, 1e-12);
  EXPECT_EQ(field_of("[run]\nexperiment = verify_core\n[orlicz]\nkind = table\ns = [0, 1]\npsi = [0, 1]\n"
                     "interpolation = cubic\n"),
            "orlicz.interpolation");
}

TEST(Config, BallDomain) {
  const auto cfg = parse(
      "[run]\nexperiment = verify_core\n[domain]\nshape = ball\ncenter = [0, 0]\nradius = 0.5\ncells = 64\n");
  EXPECT_EQ(cfg.domain.dim(), 2);
  const auto d = cfg.domain.build();
  EXPECT_EQ(d.shape(), Shape::ball);
  EXPECT_EQ(d.cells(), (std::vector<std::size_t>{64, 64}));
  EXPECT_EQ(cfg.domain.build(128).cells(), (std::vector<std::size_t>{128, 128}));
}

TEST(Config, MissingFileIsConfigError) { EXPECT_THROW(load_config("/nonexistent/cfg.ini"), ConfigError); }
