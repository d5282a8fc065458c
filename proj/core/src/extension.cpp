#include "orlicz/extension.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "orlicz/quadrature.hpp"

namespace orlicz {

SampledFunction truncate(const SampledFunction& f, double level) {
  if (!(level > 0.0)) throw DomainError("truncation level must be positive");
  SampledFunction out = f;
  for (auto& v : out.values) v = std::clamp(v, -level, level);
  return out;
}

double psi_plus_modular(const OrliczFunction& F, const SampledFunction& f) {
  std::vector<double> g(f.size());
  try {
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = F.psi_plus(std::abs(f.values[i]));
    const double v = integrate(*f.domain, g);
    if (!std::isfinite(v)) throw NumericError("sum overflows");
    return v;
  } catch (const RangeError& e) {
    throw DomainError(std::string("f is not in L^{psi+} on the grid: ") + e.what());
  } catch (const NumericError& e) {
    throw DomainError(std::string("f is not in L^{psi+} on the grid: ") + e.what());
  }
}

double extended_residual(const OrliczFunction& F, const SampledFunction& f, const Polynomial& P,
                         std::span<const Polynomial> tests) {
  if (tests.empty()) throw DomainError("extended_residual: empty test set");
  psi_plus_modular(F, f);
  double worst = 0.0;
  for (const auto& Q : tests) worst = std::max(worst, inequality_gap(F, f, P, Q, GapForm::absolute));
  return worst;
}

std::vector<double> default_levels() {
  std::vector<double> out;
  for (int k = 1; k <= 14; ++k) out.push_back(std::ldexp(1.0, k));
  return out;
}

ExtensionRun extend(const OrliczFunction& F, const SampledFunction& f, int degree, const ExtendOptions& opts) {
  if (opts.levels.empty()) throw DomainError("extend: empty level schedule");
  for (std::size_t i = 0; i < opts.levels.size(); ++i) {
    if (!(opts.levels[i] > 0.0) || (i > 0 && !(opts.levels[i] > opts.levels[i - 1]))) {
      throw DomainError("extend: levels must be positive and strictly ascending");
    }
  }
  const double fmax = f.max_abs();
  const PolynomialSpace space{f.domain->dim(), degree};
  const auto tests = certification_set(space, *f.domain, opts.random_tests, opts.seed);

  ExtensionRun run{{}, std::nullopt, Polynomial(space, f.domain->center()), 0.0, 0.0, {}, false, {}};
  run.residual_tolerance = residual_tolerance(F, f, opts.tol);

  SolveOptions sopts;
  sopts.tol = opts.tol;
  sopts.max_iter = opts.max_iter;
  sopts.seed = opts.seed;
  sopts.random_tests = opts.random_tests;

  for (std::size_t i = 0; i < opts.levels.size(); ++i) {
    const double level = opts.levels[i];
    LevelRecord rec{level, Polynomial(space, f.domain->center()), 0.0, 0.0, 0.0, 0, false};
    const bool identity = fmax <= level;
    if (i > 0 && identity && fmax <= opts.levels[i - 1]) {
      rec.P = run.levels.back().P;
      rec.reused = true;
    } else {
      const ApproxProblem prob(F, truncate(f, level), degree);
      SolveOptions lo = sopts;
      // The identity truncation is solved cold so it reproduces solve(f).
      if (i > 0 && !identity) lo.warm_start = run.levels.back().P;
      const auto res = solve(prob, lo);
      rec.P = res.P;
      rec.iterations = res.iterations;
    }
    if (i > 0) rec.coeff_delta = coefficient_distance(rec.P, run.levels.back().P);
    rec.sup_norm = poly_norms(rec.P, *f.domain).sup_norm;
    rec.extended_residual = extended_residual(F, f, rec.P, tests);
    run.levels.push_back(std::move(rec));
  }

  for (std::size_t i = run.levels.size(); i-- > 1;) {
    if (run.levels[i].coeff_delta > opts.cauchy_tol) break;
    run.cauchy_level = run.levels[i].level;
  }

  run.final_P = run.levels.back().P;
  run.extended_residual = run.levels.back().extended_residual;
  run.bound = check_extension_bound(F, f, run.final_P);

  bool growing = run.levels.size() >= 3;
  for (std::size_t i = 1; i < run.levels.size() && growing; ++i) {
    growing = run.levels[i].sup_norm > run.levels[i - 1].sup_norm * (1.0 + opts.cauchy_tol);
  }

  std::ostringstream why;
  if (run.levels.size() < 2 || !run.cauchy_level) {
    why << "no Cauchy behaviour: last coefficient change "
        << (run.levels.size() < 2 ? 0.0 : run.levels.back().coeff_delta) << " exceeds " << opts.cauchy_tol;
  } else if (growing) {
    why << "||P_n|| grows at every level; the sequence is not uniformly bounded";
  } else if (!(run.extended_residual <= run.residual_tolerance)) {
    why << "extended residual " << run.extended_residual << " exceeds " << run.residual_tolerance;
  }
  run.failure = why.str();
  run.accepted = run.failure.empty();
  if (!run.accepted) throw ExtensionError("extend failed: " + run.failure, std::move(run));
  return run;
}

BoundCheck check_extension_bound(const OrliczFunction& F, const SampledFunction& f, const Polynomial& P) {
  const auto p = poly_eval(P, *f.domain);
  std::vector<double> g(p.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = std::abs(p[i]);
    sup = std::max(sup, a);
    g[i] = F.phi(a);
  }
  BoundCheck out;
  out.lhs = integrate(*f.domain, g);
  out.rhs = 5.0 * F.lambda_psi_plus() * sup * psi_plus_modular(F, f);
  out.ok = out.lhs <= out.rhs * (1.0 + 1e-9);
  return out;
}

std::vector<ContinuityRow> continuity_probe(const OrliczFunction& F, const SampledFunction& h,
                                            std::span<const Perturbation> perturbations, const SampledFunction& H,
                                            int degree, const ExtendOptions& opts) {
  if (!F.strictly_increasing()) throw DomainError("continuity_probe needs a strictly increasing psi^+");
  auto dominated = [&](const SampledFunction& g, const std::string& name) {
    if (g.size() != H.size()) throw DomainError("continuity_probe: " + name + " lives on another grid");
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (std::abs(g.values[i]) > H.values[i]) {
        std::ostringstream msg;
        msg << "continuity_probe: |" << name << "| exceeds H at point " << i;
        throw DomainError(msg.str());
      }
    }
  };
  dominated(h, "h");
  for (const auto& pert : perturbations) dominated(pert.h, "h_" + std::to_string(static_cast<long long>(pert.n)));
  psi_plus_modular(F, H);

  const Polynomial base = extend(F, h, degree, opts).final_P;
  std::vector<ContinuityRow> rows;
  for (const auto& pert : perturbations) {
    ContinuityRow row;
    row.n = pert.n;
    SampledFunction diff = pert.h;
    for (std::size_t i = 0; i < diff.size(); ++i) diff.values[i] = std::abs(pert.h.values[i] - h.values[i]);
    row.psi_distance = psi_plus_modular(F, diff);
    const Polynomial Pn = extend(F, pert.h, degree, opts).final_P;
    row.poly_distance = poly_norms(Pn - base, *h.domain).sup_norm;
    rows.push_back(row);
  }
  return rows;
}

bool decreasing_up_to_noise(std::span<const double> values, double noise) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > (1.0 + noise) * values[i - 1]) return false;
  }
  return true;
}

}  // namespace orlicz
