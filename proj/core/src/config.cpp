#include "orlicz/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "orlicz/errors.hpp"

namespace orlicz {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.empty() || ec != std::errc() || ptr != last) throw ConfigError(field, "expected a number, got '" + t + "'");
  return v;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(field, "expected a non-negative integer, got '" + t + "'");
  }
  return v;
}

int parse_int(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(field, "expected an integer, got '" + t + "'");
  }
  return v;
}

using Section = std::map<std::string, std::string>;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run", {"experiment"}},
      {"orlicz",
       {"kind", "p", "breakpoints", "slopes", "coefficients", "exponents", "s", "psi", "interpolation", "lambda_phi",
        "lambda_psi_minus", "lambda_psi_plus"}},
      {"domain", {"shape", "lo", "hi", "cells", "center", "radius"}},
      {"function", {}},
      {"perturbation", {}},
      {"space", {"n", "m"}},
      {"opts",
       {"tol", "max_iter", "seed", "levels", "cauchy_tol", "eps", "x", "trials", "random_tests", "sandwich_samples",
        "n_values", "error_tol", "continuity_tol"}},
      {"output", {"dir"}},
  };
  return keys;
}

const std::string& require(const Section& s, const std::string& section, const std::string& key) {
  const auto it = s.find(key);
  if (it == s.end()) throw ConfigError(section + "." + key, "missing required key");
  return it->second;
}

std::optional<std::string> get(const Section& s, const std::string& key) {
  const auto it = s.find(key);
  if (it == s.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> to_counts(const std::vector<double>& v, const std::string& field) {
  std::vector<std::size_t> out;
  for (double d : v) {
    if (!(d >= 1.0) || std::floor(d) != d) throw ConfigError(field, "cell counts must be positive integers");
    out.push_back(static_cast<std::size_t>(d));
  }
  return out;
}

OrliczConfig parse_orlicz(const Section& s) {
  const std::string kind = trim(require(s, "orlicz", "kind"));
  OrliczConfig cfg{PowerGenerator{}, {}};
  auto list = [&](const std::string& key) { return parse_number_list(require(s, "orlicz", key), "orlicz." + key); };
  if (kind == "power") {
    cfg.spec = PowerGenerator{parse_number(require(s, "orlicz", "p"), "orlicz.p")};
  } else if (kind == "piecewise_linear") {
    cfg.spec = PiecewiseLinearGenerator{list("breakpoints"), list("slopes")};
  } else if (kind == "piecewise_power") {
    const auto bp = list("breakpoints");
    const auto co = list("coefficients");
    const auto ex = list("exponents");
    if (co.size() != ex.size()) throw ConfigError("orlicz.exponents", "needs one exponent per coefficient");
    PiecewisePowerGenerator g{bp, {}};
    for (std::size_t i = 0; i < co.size(); ++i) g.segments.push_back({co[i], ex[i]});
    cfg.spec = g;
  } else if (kind == "table") {
    const std::string rule = trim(get(s, "interpolation").value_or("linear"));
    if (rule != "linear") throw ConfigError("orlicz.interpolation", "only 'linear' is supported");
    cfg.spec = TableGenerator{list("s"), list("psi"), Interpolation::linear};
  } else {
    throw ConfigError("orlicz.kind", "unknown generator kind '" + kind + "'");
  }
  if (auto v = get(s, "lambda_phi")) cfg.declared.lambda_phi = parse_number(*v, "orlicz.lambda_phi");
  if (auto v = get(s, "lambda_psi_minus")) cfg.declared.lambda_psi_minus = parse_number(*v, "orlicz.lambda_psi_minus");
  if (auto v = get(s, "lambda_psi_plus")) cfg.declared.lambda_psi_plus = parse_number(*v, "orlicz.lambda_psi_plus");
  // Validate now so the error carries the section path.
  build_orlicz(cfg);
  return cfg;
}

FunctionConfig parse_function(const Section& s, const std::string& section) {
  FunctionConfig fc;
  fc.id = trim(require(s, section, "id"));
  for (const auto& [k, v] : s) {
    if (k == "id") continue;
    fc.params[k] = parse_number_list(v, section + "." + k);
  }
  return fc;
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::solve:
      return "solve";
    case Experiment::extend:
      return "extend";
    case Experiment::local_converge:
      return "local_converge";
    case Experiment::verify_core:
      return "verify_core";
    case Experiment::continuity:
      return "continuity";
  }
  return "?";
}

std::optional<Experiment> parse_experiment(const std::string& name) {
  std::string n = trim(name);
  std::replace(n.begin(), n.end(), '-', '_');
  for (auto e : {Experiment::solve, Experiment::extend, Experiment::local_converge, Experiment::verify_core,
                 Experiment::continuity}) {
    if (to_string(e) == n) return e;
  }
  return std::nullopt;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& field) {
  std::string t = trim(text);
  if (!t.empty() && t.front() == '[') {
    if (t.back() != ']') throw ConfigError(field, "unterminated list");
    t = t.substr(1, t.size() - 2);
  }
  std::vector<double> out;
  if (trim(t).empty()) return out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, field));
  return out;
}

OrliczFunction build_orlicz(const OrliczConfig& cfg) {
  try {
    return OrliczFunction(cfg.spec, cfg.declared);
  } catch (const std::exception& e) {
    throw ConfigError("orlicz", e.what());
  }
}

QuadDomain DomainConfig::build(std::optional<std::size_t> resolution) const {
  const int d = dim();
  std::vector<std::size_t> c = cells;
  if (resolution) c = {*resolution};
  if (shape == Shape::box) {
    if (c.empty()) c = {d == 1 ? std::size_t{4096} : std::size_t{256}};
    return QuadDomain::box(lo, hi, c);
  }
  if (c.empty()) c = {d == 1 ? std::size_t{2048} : std::size_t{256}};
  return QuadDomain::ball(center, radius, c.front());
}

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", std::string("malformed INI: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  std::map<std::string, Section> sections;
  for (const auto& [name, node] : tree) {
    if (node.empty()) throw ConfigError(name, "keys must live inside a [section]");
    const auto known = known_keys().find(name);
    if (known == known_keys().end()) throw ConfigError(name, "unknown section");
    Section s;
    for (const auto& [key, child] : node) {
      if (!known->second.empty() && !known->second.count(key)) throw ConfigError(name + "." + key, "unknown key");
      s[key] = child.data();
    }
    sections[name] = std::move(s);
  }

  ExperimentConfig cfg;
  const auto run = sections.find("run");
  if (run == sections.end()) throw ConfigError("run.experiment", "missing required key");
  const auto ex = parse_experiment(require(run->second, "run", "experiment"));
  if (!ex) throw ConfigError("run.experiment", "unknown experiment '" + run->second.at("experiment") + "'");
  cfg.experiment = *ex;

  if (auto it = sections.find("orlicz"); it != sections.end()) cfg.orlicz = parse_orlicz(it->second);
  if (auto it = sections.find("function"); it != sections.end()) cfg.function = parse_function(it->second, "function");
  if (auto it = sections.find("perturbation"); it != sections.end()) {
    cfg.perturbation = parse_function(it->second, "perturbation");
  }

  if (auto it = sections.find("domain"); it != sections.end()) {
    const auto& s = it->second;
    const std::string shape = trim(get(s, "shape").value_or("box"));
    if (shape == "box") {
      cfg.domain.shape = Shape::box;
      cfg.domain.lo = parse_number_list(require(s, "domain", "lo"), "domain.lo");
      cfg.domain.hi = parse_number_list(require(s, "domain", "hi"), "domain.hi");
      if (cfg.domain.lo.size() != cfg.domain.hi.size() || cfg.domain.lo.empty() || cfg.domain.lo.size() > 2) {
        throw ConfigError("domain.hi", "lo and hi need the same length, 1 or 2");
      }
      for (std::size_t i = 0; i < cfg.domain.lo.size(); ++i) {
        if (!(cfg.domain.lo[i] < cfg.domain.hi[i])) throw ConfigError("domain.hi", "needs lo < hi on every axis");
      }
    } else if (shape == "ball") {
      cfg.domain.shape = Shape::ball;
      cfg.domain.center = parse_number_list(require(s, "domain", "center"), "domain.center");
      cfg.domain.radius = parse_number(require(s, "domain", "radius"), "domain.radius");
      if (cfg.domain.center.empty() || cfg.domain.center.size() > 2) throw ConfigError("domain.center", "needs 1 or 2 coordinates");
      if (!(cfg.domain.radius > 0.0)) throw ConfigError("domain.radius", "must be positive");
    } else {
      throw ConfigError("domain.shape", "expected 'box' or 'ball'");
    }
    if (auto v = get(s, "cells")) cfg.domain.cells = to_counts(parse_number_list(*v, "domain.cells"), "domain.cells");
  }

  cfg.n = cfg.domain.dim();
  if (auto it = sections.find("space"); it != sections.end()) {
    if (auto v = get(it->second, "n")) cfg.n = parse_int(*v, "space.n");
    if (auto v = get(it->second, "m")) cfg.m = parse_int(*v, "space.m");
  }

  if (auto it = sections.find("opts"); it != sections.end()) {
    const auto& s = it->second;
    auto& o = cfg.opts;
    if (auto v = get(s, "tol")) o.tol = parse_number(*v, "opts.tol");
    if (auto v = get(s, "max_iter")) o.max_iter = parse_unsigned(*v, "opts.max_iter");
    if (auto v = get(s, "seed")) o.seed = parse_unsigned(*v, "opts.seed");
    if (auto v = get(s, "levels")) o.levels = parse_number_list(*v, "opts.levels");
    if (auto v = get(s, "cauchy_tol")) o.cauchy_tol = parse_number(*v, "opts.cauchy_tol");
    if (auto v = get(s, "eps")) o.eps = parse_number_list(*v, "opts.eps");
    if (auto v = get(s, "x")) o.x = parse_number_list(*v, "opts.x");
    if (auto v = get(s, "trials")) o.trials = parse_unsigned(*v, "opts.trials");
    if (auto v = get(s, "random_tests")) o.random_tests = parse_unsigned(*v, "opts.random_tests");
    if (auto v = get(s, "sandwich_samples")) o.sandwich_samples = parse_unsigned(*v, "opts.sandwich_samples");
    if (auto v = get(s, "n_values")) o.n_values = parse_number_list(*v, "opts.n_values");
    if (auto v = get(s, "error_tol")) o.error_tol = parse_number(*v, "opts.error_tol");
    if (auto v = get(s, "continuity_tol")) o.continuity_tol = parse_number(*v, "opts.continuity_tol");
    if (!(o.tol > 0.0)) throw ConfigError("opts.tol", "must be positive");
    if (!(o.cauchy_tol > 0.0)) throw ConfigError("opts.cauchy_tol", "must be positive");
  }
  if (auto it = sections.find("output"); it != sections.end()) {
    if (auto v = get(it->second, "dir")) cfg.output_dir = trim(*v);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  return parse_config(in);
}

void validate(const ExperimentConfig& cfg) {
  const bool randomised = cfg.experiment != Experiment::verify_core;
  if (randomised && !cfg.opts.seed) throw ConfigError("opts.seed", "a seed is required for randomised experiments");
  if (cfg.experiment == Experiment::verify_core) return;
  if (!cfg.orlicz) throw ConfigError("orlicz.kind", "missing required key");
  if (!cfg.function) throw ConfigError("function.id", "missing required key");
  if (cfg.m < 0) throw ConfigError("space.m", "degree must be >= 0");

  const int dim = cfg.experiment == Experiment::local_converge ? static_cast<int>(cfg.opts.x.size()) : cfg.domain.dim();
  if (cfg.experiment == Experiment::local_converge && (dim < 1 || dim > 2)) {
    throw ConfigError("opts.x", "the centre needs 1 or 2 coordinates");
  }
  if (cfg.n != dim) throw ConfigError("space.n", "does not match the domain dimension");

  auto check_function = [&](const FunctionConfig& fc, const std::string& section) {
    const auto entries = registry_list();
    const bool known = std::any_of(entries.begin(), entries.end(), [&](const auto& e) { return e.id == fc.id; });
    if (!known) throw ConfigError(section + ".id", "unknown test function '" + fc.id + "'");
    try {
      make_test_function(fc.id, fc.params, dim);
    } catch (const std::exception& e) {
      throw ConfigError(section, e.what());
    }
  };
  check_function(*cfg.function, "function");
  if (cfg.perturbation) check_function(*cfg.perturbation, "perturbation");

  for (double l : cfg.opts.levels) {
    if (!(l > 0.0)) throw ConfigError("opts.levels", "levels must be positive");
  }
  for (double e : cfg.opts.eps) {
    if (!(e > 0.0)) throw ConfigError("opts.eps", "radii must be positive");
  }
  if (cfg.experiment == Experiment::local_converge && !cfg.opts.eps.empty() && cfg.opts.eps.size() < 4) {
    throw ConfigError("opts.eps", "the schedule needs at least 4 radii");
  }
}

}  // namespace orlicz
