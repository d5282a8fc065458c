#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "orlicz/generator.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/registry.hpp"

namespace orlicz {

enum class Experiment { solve, extend, local_converge, verify_core, continuity };

std::string to_string(Experiment e);
/// Accepts "local_converge" and "local-converge" alike.
std::optional<Experiment> parse_experiment(const std::string& name);

struct OrliczConfig {
  GeneratorSpec spec;
  DeclaredConstants declared;
};

struct DomainConfig {
  Shape shape = Shape::box;
  std::vector<double> lo{-1.0};
  std::vector<double> hi{1.0};
  std::vector<double> center{0.0};
  double radius = 1.0;
  /// Empty: the default resolution for the shape and dimension.
  std::vector<std::size_t> cells;

  int dim() const { return static_cast<int>(shape == Shape::box ? lo.size() : center.size()); }
  QuadDomain build(std::optional<std::size_t> resolution = std::nullopt) const;
};

struct FunctionConfig {
  std::string id;
  Params params;
};

struct OptsConfig {
  double tol = 1e-4;
  std::size_t max_iter = 2000;
  std::optional<std::uint64_t> seed;
  std::vector<double> levels;
  double cauchy_tol = 1e-5;
  std::vector<double> eps;
  std::vector<double> x;
  std::size_t trials = 20000;
  std::size_t random_tests = 64;
  std::size_t sandwich_samples = 100;
  std::vector<double> n_values;
  double error_tol = 1e-3;
  double continuity_tol = 1e-3;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::solve;
  std::optional<OrliczConfig> orlicz;
  DomainConfig domain;
  std::optional<FunctionConfig> function;
  std::optional<FunctionConfig> perturbation;
  int n = 1;
  int m = 0;
  OptsConfig opts;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> resolution;
};

/// Parses the INI experiment description. Every problem is a ConfigError
/// carrying the dotted field path ("orlicz.slopes").
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Rejects configurations that cannot run (missing seed for randomised
/// experiments, unknown function ids, dimension mismatches).
void validate(const ExperimentConfig& cfg);

/// Generator spec from one config section's key/value pairs.
OrliczFunction build_orlicz(const OrliczConfig& cfg);

/// "[1, 2.5]", "1, 2.5" or "1".
std::vector<double> parse_number_list(const std::string& text, const std::string& field);

}  // namespace orlicz
