// orlicz-approx: experiment driver for best polynomial approximation in
// Orlicz modulars.
//
//   orlicz-approx solve --config problem.ini --out results/ --seed 7
//   orlicz-approx verify-core
//   orlicz-approx list-functions

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "orlicz/config.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/runner.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> resolution;
};

void add_flags(CLI::App* cmd, Flags& f, bool config_required) {
  auto* opt = cmd->add_option("--config", f.config, "experiment description (INI)");
  if (config_required) opt->required();
  cmd->add_option("--out", f.out, "output directory (default: [output] dir, else ./out)");
  cmd->add_option("--seed", f.seed, "seed for every randomised step (overrides [opts] seed)");
  cmd->add_option("--resolution", f.resolution, "grid cells (per axis in 2-D), overrides [domain] cells")
      ->check(CLI::PositiveNumber);
}

int execute(orlicz::Experiment expected, const Flags& flags) {
  using namespace orlicz;
  const std::string name = to_string(expected);
  std::filesystem::path out = flags.out.empty() ? "out" : flags.out;
  try {
    ExperimentConfig cfg;
    if (flags.config.empty()) {
      cfg.experiment = expected;
    } else {
      cfg = load_config(flags.config);
    }
    if (cfg.experiment != expected) {
      throw ConfigError("run.experiment", "config describes '" + to_string(cfg.experiment) + "' but the subcommand is '" + name + "'");
    }
    if (flags.seed) cfg.opts.seed = flags.seed;
    if (flags.resolution) cfg.resolution = flags.resolution;
    if (flags.out.empty() && cfg.output_dir) out = *cfg.output_dir;

    const RunArtifacts art = run(cfg);
    write_artifacts(art, out);
    const char* status = art.exit_code == exit_pass ? "pass" : (art.exit_code == exit_check_failed ? "fail" : "error");
    std::cout << name << ": " << status << " (exit " << art.exit_code << ") -> " << (out / "summary.json").string() << "\n";
    if (art.exit_code >= exit_config_error) std::cerr << art.summary_json;
    return art.exit_code;
  } catch (const ConfigError& e) {
    const std::string rec = error_record(name, "config", e.field_path(), e.what());
    std::cerr << rec;
    try {
      write_artifacts(RunArtifacts{exit_config_error, rec, {}}, out);
    } catch (const std::exception&) {
    }
    return exit_config_error;
  } catch (const std::exception& e) {
    const std::string rec = error_record(name, "numeric", "", e.what());
    std::cerr << rec;
    return exit_numeric_failure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Best polynomial approximation in Orlicz modulars"};
  app.require_subcommand(1);

  Flags solve_f, extend_f, local_f, verify_f, cont_f;
  add_flags(app.add_subcommand("solve", "best approximation of a sampled function"), solve_f, true);
  add_flags(app.add_subcommand("extend", "extended approximation by truncation"), extend_f, true);
  add_flags(app.add_subcommand("local-converge", "local fits on shrinking balls"), local_f, true);
  add_flags(app.add_subcommand("verify-core", "structural inequalities of the built-in generators"), verify_f, false);
  add_flags(app.add_subcommand("continuity", "continuity of the extended operator"), cont_f, true);
  std::string list_out;
  auto* list = app.add_subcommand("list-functions", "print the test-function registry as JSON");
  list->add_option("--out", list_out, "also write functions.json into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return orlicz::exit_config_error;
  }

  using orlicz::Experiment;
  if (app.got_subcommand("solve")) return execute(Experiment::solve, solve_f);
  if (app.got_subcommand("extend")) return execute(Experiment::extend, extend_f);
  if (app.got_subcommand("local-converge")) return execute(Experiment::local_converge, local_f);
  if (app.got_subcommand("verify-core")) return execute(Experiment::verify_core, verify_f);
  if (app.got_subcommand("continuity")) return execute(Experiment::continuity, cont_f);

  const std::string json = orlicz::list_functions_json();
  std::cout << json;
  if (!list_out.empty()) {
    std::filesystem::create_directories(list_out);
    std::ofstream(std::filesystem::path(list_out) / "functions.json") << json;
  }
  return orlicz::exit_pass;
}
