#include "orlicz/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "orlicz/csv.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/extension.hpp"
#include "orlicz/local.hpp"
#include "orlicz/solver.hpp"

namespace orlicz {

using nlohmann::ordered_json;

namespace {

struct Check {
  std::string name;
  double value;
  double bound;
  std::string relation;
  bool pass;
};

Check at_most(std::string name, double value, double bound) {
  return {std::move(name), value, bound, "<=", value <= bound};
}

Check at_least(std::string name, double value, double bound) {
  return {std::move(name), value, bound, ">=", value >= bound};
}

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(format_number(v)); }

ordered_json coefficients_json(const Polynomial& P) {
  ordered_json out = ordered_json::object();
  const auto alphas = P.space().multi_indices();
  for (std::size_t i = 0; i < alphas.size(); ++i) out[alphas[i].label(P.dim())] = num(P.coeffs()[i]);
  return out;
}

ordered_json polynomial_json(const Polynomial& P) {
  return {{"center", P.center()}, {"degree", P.degree()}, {"coefficients", coefficients_json(P)}};
}

ordered_json bound_json(const BoundCheck& b) { return {{"lhs", num(b.lhs)}, {"rhs", num(b.rhs)}, {"ok", b.ok}}; }

std::vector<std::string> coefficient_labels(const PolynomialSpace& space, const std::string& prefix) {
  std::vector<std::string> out;
  for (const auto& a : space.multi_indices()) out.push_back(prefix + a.label(space.dim));
  return out;
}

struct Context {
  const ExperimentConfig& cfg;
  ordered_json result = ordered_json::object();
  std::vector<Check> checks;
  std::vector<std::pair<std::string, std::string>> files;
};

TestFunction test_function(const FunctionConfig& fc, int dim) { return make_test_function(fc.id, fc.params, dim); }

std::shared_ptr<const QuadDomain> domain_of(const ExperimentConfig& cfg, std::size_t multiplier = 1) {
  DomainConfig d = cfg.domain;
  if (cfg.resolution) d.cells = {*cfg.resolution};
  if (multiplier != 1) {
    if (d.cells.empty()) d.cells = {d.dim() == 1 ? (d.shape == Shape::box ? std::size_t{4096} : std::size_t{2048}) : std::size_t{256}};
    // multiplier is the total refinement; spread it over the axes
    const std::size_t per_axis = d.dim() == 1 ? multiplier : static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(multiplier))));
    for (auto& c : d.cells) c *= per_axis;
  }
  return std::make_shared<const QuadDomain>(d.build());
}

double modular_of(const OrliczFunction& F, const SampledFunction& f, Quantity q) {
  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = F.evaluate(q, std::abs(f.values[i]));
  return integrate(*f.domain, g);
}

std::string trace_csv(const std::vector<double>& trace) {
  std::ostringstream out;
  CsvWriter w(out);
  w.header({"iteration", "objective"});
  for (std::size_t i = 0; i < trace.size(); ++i) w.row({static_cast<double>(i), trace[i]});
  return out.str();
}

SolveOptions solve_options(const ExperimentConfig& cfg) {
  SolveOptions so;
  so.tol = cfg.opts.tol;
  so.max_iter = cfg.opts.max_iter;
  so.seed = cfg.opts.seed.value_or(0);
  so.random_tests = cfg.opts.random_tests;
  return so;
}

ExtendOptions extend_options(const ExperimentConfig& cfg) {
  ExtendOptions eo;
  if (!cfg.opts.levels.empty()) eo.levels = cfg.opts.levels;
  eo.cauchy_tol = cfg.opts.cauchy_tol;
  eo.tol = cfg.opts.tol;
  eo.seed = cfg.opts.seed.value_or(0);
  eo.random_tests = cfg.opts.random_tests;
  eo.max_iter = cfg.opts.max_iter;
  return eo;
}

void run_solve(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const OrliczFunction F = build_orlicz(*cfg.orlicz);
  const auto dom = domain_of(cfg);
  const TestFunction tf = test_function(*cfg.function, dom->dim());
  const SampledFunction f = sample(dom, tf);
  const ApproxProblem prob(F, f, cfg.m);

  ApproxResult res;
  try {
    res = solve(prob, solve_options(cfg));
  } catch (const ConvergenceError& e) {
    ctx.files.emplace_back("trace.csv", trace_csv(e.trace()));
    throw;
  }
  const auto bound = check_solution_bound(prob, res.P);
  const auto masks = sign_set_measures(f, res.P);

  ctx.result["P"] = polynomial_json(res.P);
  ctx.result["objective"] = num(res.objective);
  ctx.result["residual_max"] = num(res.residual_max);
  ctx.result["residual_tolerance"] = num(res.residual_tolerance);
  ctx.result["iterations"] = res.iterations;
  ctx.result["solution_bound"] = bound_json(bound);
  ctx.result["sign_set_measures"] = {{"above", num(masks.above)}, {"below", num(masks.below)}};
  ctx.result["grid_points"] = dom->size();

  ctx.checks.push_back(at_most("characterization_residual", res.residual_max, res.residual_tolerance));
  ctx.checks.push_back(at_most("solution_bound", bound.lhs, bound.rhs * (1.0 + 1e-9)));
  if (res.objective > 0.0) {
    ctx.checks.push_back({"sign_sets_positive", std::min(masks.above, masks.below), 0.0, ">", masks.above > 0.0 && masks.below > 0.0});
  }

  if (dom->dim() == 1 && dom->shape() == Shape::box) {
    const auto* pw = std::get_if<PowerGenerator>(&F.spec());
    if (pw && pw->p == 2.0) {
      const double lo = dom->center()[0] - dom->half_widths()[0];
      const double hi = dom->center()[0] + dom->half_widths()[0];
      if (const auto oracle = l2_projection(tf, lo, hi, cfg.m)) {
        ctx.result["l2_oracle"] = {{"P", polynomial_json(oracle->recentered(res.P.center()))},
                                   {"max_coefficient_error", num(coefficient_distance(res.P, *oracle))}};
      }
    }
  }
  ctx.files.emplace_back("trace.csv", trace_csv(res.trace));
}

std::string levels_csv(const ExtensionRun& run) {
  std::ostringstream out;
  CsvWriter w(out);
  w.header({"level", "coeff_delta", "sup_norm", "extended_residual", "reused", "iterations"});
  for (const auto& r : run.levels) {
    w.row({r.level, r.coeff_delta, r.sup_norm, r.extended_residual, r.reused ? 1.0 : 0.0, static_cast<double>(r.iterations)});
  }
  return out.str();
}

std::string level_coefficients_csv(const ExtensionRun& run) {
  std::ostringstream out;
  CsvWriter w(out);
  if (run.levels.empty()) return {};
  std::vector<std::string> header{"level"};
  for (auto& l : coefficient_labels(run.levels.front().P.space(), "")) header.push_back(l);
  w.header(header);
  for (const auto& r : run.levels) {
    std::vector<double> row{r.level};
    for (double c : r.P.coeffs()) row.push_back(c);
    w.row(row);
  }
  return out.str();
}

ordered_json run_json(const ExtensionRun& run) {
  ordered_json levels = ordered_json::array();
  for (const auto& r : run.levels) {
    levels.push_back({{"level", num(r.level)},
                      {"coefficients", coefficients_json(r.P)},
                      {"coeff_delta", num(r.coeff_delta)},
                      {"sup_norm", num(r.sup_norm)},
                      {"extended_residual", num(r.extended_residual)},
                      {"reused", r.reused}});
  }
  ordered_json out = {{"levels", levels},
                      {"cauchy_level", run.cauchy_level ? num(*run.cauchy_level) : ordered_json(nullptr)},
                      {"final_P", polynomial_json(run.final_P)},
                      {"extended_residual", num(run.extended_residual)},
                      {"residual_tolerance", num(run.residual_tolerance)},
                      {"extension_bound", bound_json(run.bound)},
                      {"accepted", run.accepted}};
  if (!run.failure.empty()) out["failure"] = run.failure;
  return out;
}

void run_extend(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const OrliczFunction F = build_orlicz(*cfg.orlicz);
  const auto dom = domain_of(cfg);
  const auto fine = domain_of(cfg, 4);
  const TestFunction tf = test_function(*cfg.function, dom->dim());
  const SampledFunction f = sample(dom, tf);
  const SampledFunction f_fine = sample(fine, tf);

  const double psi_r = psi_plus_modular(F, f);
  const double psi_4r = psi_plus_modular(F, f_fine);
  const double phi_r = modular_of(F, f, Quantity::phi);
  const double phi_4r = modular_of(F, f_fine, Quantity::phi);
  const double psi_ratio = psi_4r / psi_r;
  const double phi_ratio = phi_4r / phi_r;
  ctx.result["membership"] = {{"resolutions", {dom->size(), fine->size()}},
                              {"psi_plus_sums", {num(psi_r), num(psi_4r)}},
                              {"psi_plus_ratio", num(psi_ratio)},
                              {"likely_not_in_psi_plus", psi_ratio > 1.5},
                              {"phi_sums", {num(phi_r), num(phi_4r)}},
                              {"phi_ratio", num(phi_ratio)},
                              {"likely_not_in_phi", phi_ratio > 1.5},
                              {"registry", tf.membership(F).note}};
  ctx.checks.push_back(at_most("psi_plus_membership_ratio", psi_ratio, 1.5));

  const auto eo = extend_options(cfg);
  ExtensionRun run;
  try {
    run = extend(F, f, cfg.m, eo);
  } catch (const ExtensionError& e) {
    ctx.result["run"] = run_json(e.run());
    ctx.files.emplace_back("trace.csv", levels_csv(e.run()));
    throw;
  }
  ctx.result["run"] = run_json(run);
  ctx.checks.push_back(at_most("cauchy_delta", run.levels.back().coeff_delta, eo.cauchy_tol));
  ctx.checks.push_back(at_most("extended_residual", run.extended_residual, run.residual_tolerance));
  ctx.checks.push_back(at_most("extension_bound", run.bound.lhs, run.bound.rhs * (1.0 + 1e-9)));

  if (dom->dim() == 1 && dom->shape() == Shape::box) {
    const auto* pw = std::get_if<PowerGenerator>(&F.spec());
    if (pw && pw->p == 2.0) {
      const double lo = dom->center()[0] - dom->half_widths()[0];
      const double hi = dom->center()[0] + dom->half_widths()[0];
      if (const auto oracle = l2_projection(tf, lo, hi, cfg.m)) {
        ctx.result["moment_oracle"] = {{"P", polynomial_json(oracle->recentered(run.final_P.center()))},
                                       {"max_coefficient_error", num(coefficient_distance(run.final_P, *oracle))}};
      }
    }
  }
  ctx.files.emplace_back("trace.csv", levels_csv(run));
  ctx.files.emplace_back("plotdata_levels.csv", level_coefficients_csv(run));
}

void run_local(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const OrliczFunction F = build_orlicz(*cfg.orlicz);
  const int dim = static_cast<int>(cfg.opts.x.size());
  LocalProblem lp = make_local_problem(F, test_function(*cfg.function, dim), cfg.opts.x, cfg.m);
  if (!lp.reference_P) throw DomainError("the test function has no analytic derivatives up to order m at x");
  if (cfg.resolution) lp.cells = *cfg.resolution;
  lp.opts = extend_options(cfg);
  const auto schedule = cfg.opts.eps.empty() ? default_eps_schedule() : cfg.opts.eps;
  const std::uint64_t seed = cfg.opts.seed.value_or(0);
  const auto constants = estimate_local_constants(F, lp.space(), cfg.opts.trials, seed, lp.cells);
  const auto tr = convergence_experiment(lp, schedule, constants, cfg.opts.error_tol);

  ctx.result["constants"] = {{"C1", num(constants.C1)},
                             {"C", num(constants.C)},
                             {"K_sup", num(constants.K_sup)},
                             {"K", num(constants.K)},
                             {"k", constants.k},
                             {"trials", cfg.opts.trials}};
  ctx.result["reference_P"] = polynomial_json(*lp.reference_P);

  const auto space = lp.space();
  std::vector<std::string> header{"eps"};
  for (auto& s : coefficient_labels(space, "coef_")) header.push_back(s);
  for (auto& s : coefficient_labels(space, "err_")) header.push_back(s);
  header.push_back("rho");
  for (auto& s : coefficient_labels(space, "bound_ratio_")) header.push_back(s);
  header.push_back("sup_bound_lhs");
  header.push_back("sup_bound_rhs");
  for (auto& s : coefficient_labels(space, "chain_")) header.push_back(s);
  std::ostringstream trace, plot;
  CsvWriter tw(trace), pw(plot);
  tw.header(header);
  pw.header({"log2_eps", "log10_max_error", "log10_rho"});

  ordered_json rows = ordered_json::array();
  double worst_ratio = 0.0;
  std::size_t k = 0;
  for (const auto& row : tr.rows) {
    const auto sw = sandwich_check(lp, row.eps, constants, cfg.opts.sandwich_samples, seed + 1 + k++);
    std::vector<double> values{row.eps};
    const Polynomial R = row.P.recentered(lp.x);
    for (double c : R.coeffs()) values.push_back(c);
    for (double e : row.errors) values.push_back(e);
    values.push_back(row.rho);
    for (double r : row.bound_ratios) values.push_back(r);
    values.push_back(row.sup_bound.lhs);
    values.push_back(row.sup_bound.rhs);
    for (double c : row.chain) values.push_back(c);
    tw.row(values);
    pw.row({std::log2(row.eps), std::log10(row.max_error), std::log10(row.rho)});

    const double max_ratio = *std::max_element(row.bound_ratios.begin(), row.bound_ratios.end());
    worst_ratio = std::max(worst_ratio, max_ratio);
    const std::string tag = "[eps=" + format_number(row.eps) + "]";
    ctx.checks.push_back(at_most("coefficient_bound" + tag, max_ratio, 1.0));
    ctx.checks.push_back(at_most("local_sup_bound" + tag, row.sup_bound.lhs, row.sup_bound.rhs * (1.0 + 1e-9)));
    ctx.checks.push_back(at_most("sandwich_lower" + tag, sw.worst_lower, 1.0 + 1e-12));
    ctx.checks.push_back(at_most("sandwich_upper" + tag, sw.worst_upper, 1.0 + 1e-12));
    const double min_mono = *std::min_element(row.monotone.begin(), row.monotone.end());
    if (row.eps <= 1.0) ctx.checks.push_back(at_least("psi_plus_monotone" + tag, min_mono, 1.0 - 1e-12));

    rows.push_back({{"eps", num(row.eps)},
                    {"coefficients", coefficients_json(R)},
                    {"errors", row.errors},
                    {"max_error", num(row.max_error)},
                    {"rho", num(row.rho)},
                    {"bound_ratios", row.bound_ratios},
                    {"sup_bound", {{"lhs", num(row.sup_bound.lhs)}, {"rhs", num(row.sup_bound.rhs)}, {"ok", row.sup_bound.ok}}},
                    {"chain", row.chain},
                    {"sandwich", {{"samples", sw.samples}, {"worst_lower", num(sw.worst_lower)}, {"worst_upper", num(sw.worst_upper)}, {"ok", sw.ok}}}});
  }
  ctx.result["rows"] = rows;
  ctx.result["slope"] = num(tr.slope);
  ctx.result["final_error"] = num(tr.final_error);
  ctx.result["errors_decay"] = tr.errors_decay;
  ctx.result["in_tm"] = tr.in_tm;
  ctx.checks.push_back(at_most("final_coefficient_error", tr.final_error, cfg.opts.error_tol));
  ctx.checks.push_back({"errors_decay", tr.errors_decay ? 1.0 : 0.0, 1.0, "==", tr.errors_decay});
  ctx.files.emplace_back("trace.csv", trace.str());
  ctx.files.emplace_back("plotdata_loglog.csv", plot.str());
}

void run_verify(Context& ctx) {
  auto gens = builtin_generators();
  std::vector<DeclaredConstants> declared(gens.size());
  if (ctx.cfg.orlicz) {
    gens.emplace_back("configured", ctx.cfg.orlicz->spec);
    declared.push_back(ctx.cfg.orlicz->declared);
  }
  std::ostringstream out;
  CsvWriter w(out);
  w.header({"generator/check", "max_violation", "tolerance", "evaluations", "ok"});
  ordered_json gj = ordered_json::array();
  for (std::size_t g = 0; g < gens.size(); ++g) {
    const OrliczFunction F(gens[g].second, declared[g]);
    const auto grid = F.default_check_grid();
    const auto rep = verify_structure(F, grid);
    ordered_json checks = ordered_json::array();
    for (const auto& c : rep.checks) {
      ctx.checks.push_back(at_most(gens[g].first + "/" + c.name, c.max_violation, c.tolerance));
      w.row(gens[g].first + "/" + c.name, {c.max_violation, c.tolerance, static_cast<double>(c.evaluations), c.ok ? 1.0 : 0.0});
      checks.push_back({{"name", c.name}, {"max_violation", num(c.max_violation)}, {"tolerance", num(c.tolerance)}, {"ok", c.ok}});
    }
    const auto g2 = ratio_bounds(F, 2.0, grid);
    const auto gh = ratio_bounds(F, 0.5, grid);
    gj.push_back({{"name", gens[g].first},
                  {"kind", kind_name(gens[g].second)},
                  {"grid_points", grid.size()},
                  {"lambda_phi", num(F.lambda_phi())},
                  {"lambda_psi_minus", num(F.lambda_psi_minus())},
                  {"lambda_psi_plus", num(F.lambda_psi_plus())},
                  {"ratio_bounds_eta_2", {num(g2.g1), num(g2.g2)}},
                  {"ratio_bounds_eta_half", {num(gh.g1), num(gh.g2)}},
                  {"checks", checks}});
  }
  ctx.result["generators"] = gj;
  ctx.files.emplace_back("trace.csv", out.str());
}

void run_continuity(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const OrliczFunction F = build_orlicz(*cfg.orlicz);
  const auto dom = domain_of(cfg);
  const TestFunction th = test_function(*cfg.function, dom->dim());
  const FunctionConfig bump_cfg = cfg.perturbation.value_or(FunctionConfig{"bump", {}});
  const TestFunction tb = test_function(bump_cfg, dom->dim());
  const SampledFunction h = sample(dom, th);
  const SampledFunction b = sample(dom, tb);
  SampledFunction H = h;
  for (std::size_t i = 0; i < H.size(); ++i) H.values[i] = std::abs(h.values[i]) + std::abs(b.values[i]);

  std::vector<double> ns = cfg.opts.n_values;
  if (ns.empty()) ns = {1, 2, 4, 8, 16, 32, 64};
  std::vector<Perturbation> perts;
  for (double n : ns) perts.push_back({n, add(h, scaled(b, 1.0 / n))});
  const auto rows = continuity_probe(F, h, perts, H, cfg.m, extend_options(cfg));

  std::ostringstream out;
  CsvWriter w(out);
  w.header({"n", "psi_distance", "poly_distance"});
  ordered_json rj = ordered_json::array();
  std::vector<double> dist;
  for (const auto& r : rows) {
    w.row({r.n, r.psi_distance, r.poly_distance});
    rj.push_back({{"n", num(r.n)}, {"psi_distance", num(r.psi_distance)}, {"poly_distance", num(r.poly_distance)}});
    dist.push_back(r.poly_distance);
  }
  ctx.result["rows"] = rj;
  const bool mono = decreasing_up_to_noise(dist, 0.1);
  ctx.checks.push_back({"poly_distance_decreasing", mono ? 1.0 : 0.0, 1.0, "==", mono});
  if (!dist.empty()) ctx.checks.push_back(at_most("final_poly_distance", dist.back(), cfg.opts.continuity_tol));
  ctx.files.emplace_back("trace.csv", out.str());
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string error_record(const std::string& experiment, const std::string& kind, const std::string& field,
                         const std::string& message) {
  ordered_json j = {{"experiment", experiment},
                    {"status", "error"},
                    {"exit_code", kind == "config" ? exit_config_error : exit_numeric_failure},
                    {"error", {{"kind", kind}, {"field", field}, {"message", message}}}};
  return dump(j);
}

RunArtifacts run(const ExperimentConfig& cfg) {
  const std::string name = to_string(cfg.experiment);
  Context ctx{cfg, ordered_json::object(), {}, {}};
  RunArtifacts art;
  auto fail = [&](int code, const std::string& kind, const std::string& field, const std::string& msg) {
    art.exit_code = code;
    ordered_json j = ordered_json::parse(error_record(name, kind, field, msg));
    if (!ctx.result.empty()) j["result"] = ctx.result;
    art.summary_json = dump(j);
    art.files = std::move(ctx.files);
    return art;
  };
  try {
    validate(cfg);
    switch (cfg.experiment) {
      case Experiment::solve:
        run_solve(ctx);
        break;
      case Experiment::extend:
        run_extend(ctx);
        break;
      case Experiment::local_converge:
        run_local(ctx);
        break;
      case Experiment::verify_core:
        run_verify(ctx);
        break;
      case Experiment::continuity:
        run_continuity(ctx);
        break;
    }
  } catch (const ConfigError& e) {
    return fail(exit_config_error, "config", e.field_path(), e.what());
  } catch (const ConvergenceError& e) {
    return fail(exit_numeric_failure, "convergence", "", e.what());
  } catch (const NumericError& e) {
    return fail(exit_numeric_failure, "numeric", "", e.what());
  } catch (const DomainError& e) {
    return fail(exit_numeric_failure, "domain", "", e.what());
  } catch (const RangeError& e) {
    return fail(exit_numeric_failure, "range", "", e.what());
  }

  bool all = true;
  ordered_json checks = ordered_json::array();
  for (const auto& c : ctx.checks) {
    all = all && c.pass;
    checks.push_back({{"name", c.name}, {"value", num(c.value)}, {"relation", c.relation}, {"bound", num(c.bound)}, {"pass", c.pass}});
  }
  art.exit_code = all ? exit_pass : exit_check_failed;
  ordered_json j = {{"experiment", name},
                    {"status", all ? "pass" : "fail"},
                    {"exit_code", art.exit_code},
                    {"seed", cfg.opts.seed ? ordered_json(*cfg.opts.seed) : ordered_json(nullptr)},
                    {"checks", checks},
                    {"result", ctx.result}};
  art.summary_json = dump(j);
  art.files = std::move(ctx.files);
  return art;
}

void write_artifacts(const RunArtifacts& artifacts, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw NumericError("cannot write " + (dir / name).string());
    out << body;
  };
  write("summary.json", artifacts.summary_json);
  for (const auto& [name, body] : artifacts.files) write(name, body);
}

std::string list_functions_json() {
  ordered_json arr = ordered_json::array();
  for (const auto& e : registry_list()) {
    ordered_json params = ordered_json::object();
    for (const auto& p : e.params) params[p.name] = p.default_value;
    arr.push_back({{"id", e.id},
                   {"formula", e.formula},
                   {"params", params},
                   {"derivatives", e.derivatives},
                   {"moments", e.moments},
                   {"membership", e.membership}});
  }
  return dump(arr);
}

}  // namespace orlicz
