// One [PASS]/[FAIL] line per acceptance criterion. `--only N` runs a single one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "json.hpp"
#include "orlicz/config.hpp"
#include "orlicz/extension.hpp"
#include "orlicz/local.hpp"
#include "orlicz/registry.hpp"
#include "orlicz/runner.hpp"
#include "orlicz/solver.hpp"

using namespace orlicz;
using namespace testing_helpers;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Report {
 public:
  void fail(const std::string& what) {
    pass_ = false;
    if (notes_.size() < 6) notes_.push_back(what);
  }
  void expect(bool ok, const std::string& what) {
    if (!ok) fail(what);
  }
  void note(const std::string& s) { info_ = s; }
  Outcome outcome() const {
    std::string d = info_;
    for (const auto& n : notes_) d += (d.empty() ? "" : "; ") + n;
    return {pass_, d};
  }

 private:
  bool pass_ = true;
  std::vector<std::string> notes_;
  std::string info_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

using Fn = double (*)(double);

struct NamedFn {
  const char* name;
  Fn f;
};

const NamedFn square_f{"x^2", [](double x) { return x * x; }};
const NamedFn cube_f{"x^3", [](double x) { return x * x * x; }};
const NamedFn xabsx_f{"x|x|", [](double x) { return x * std::abs(x); }};
const NamedFn sign2_f{"2sign(x)", [](double x) { return x > 0 ? 2.0 : (x < 0 ? -2.0 : 0.0); }};
const NamedFn ident_f{"x", [](double x) { return x; }};
const NamedFn exp_f{"exp(x)", [](double x) { return std::exp(x); }};
const NamedFn mixed_f{"x|x|+exp(x)", [](double x) { return x * std::abs(x) + std::exp(x); }};
const NamedFn abs_f{"|x|", [](double x) { return std::abs(x); }};

Polynomial poly1(std::vector<double> c) {
  const int m = static_cast<int>(c.size()) - 1;
  return Polynomial(PolynomialSpace{1, m}, {0.0}, std::move(c));
}

struct L2Case {
  NamedFn f;
  int m;
  std::vector<double> oracle;
};

// L^2(-1, 1) projections worked out by hand (odd/even parts, Legendre moments).
std::vector<L2Case> l2_cases() {
  return {
      {square_f, 0, {1.0 / 3.0}}, {square_f, 1, {1.0 / 3.0, 0.0}}, {square_f, 2, {0.0, 0.0, 1.0}},
      {cube_f, 0, {0.0}},         {cube_f, 1, {0.0, 0.6}},         {cube_f, 2, {0.0, 0.6, 0.0}},
      {xabsx_f, 0, {0.0}},        {xabsx_f, 1, {0.0, 0.75}},       {xabsx_f, 2, {0.0, 0.75, 0.0}},
  };
}

Outcome criterion1() {
  Report r;
  const std::vector<std::pair<std::string, GeneratorSpec>> gens{{"power_1.5", PowerGenerator{1.5}},
                                                                {"power_2", PowerGenerator{2.0}},
                                                                {"power_3", PowerGenerator{3.0}},
                                                                {"kinked", PiecewiseLinearGenerator{{1.0}, {1.0, 2.0}}}};
  std::size_t total = 0;
  for (const auto& [name, spec] : gens) {
    const OrliczFunction F(spec);
    const auto grid = F.default_check_grid();
    r.expect(grid.size() == 513, name + ": grid has " + std::to_string(grid.size()) + " points");
    const auto rep = verify_structure(F, grid, 1e-9);
    for (const auto& c : rep.checks) {
      ++total;
      r.expect(c.ok && c.max_violation <= 1e-9, name + " " + c.name + " violation " + fmt(c.max_violation));
    }
  }
  r.note(std::to_string(total) + " inequality checks");
  return r.outcome();
}

Outcome criterion2() {
  Report r;
  const auto d = interval(-1.0, 1.0, 4096);
  double worst_err = 0.0, worst_res = 0.0;
  for (const auto& c : l2_cases()) {
    const ApproxProblem prob(square(), sample1(d, c.f.f), c.m);
    const auto res = solve(prob);
    const double err = coefficient_distance(res.P, poly1(c.oracle));
    worst_err = std::max(worst_err, err);
    worst_res = std::max(worst_res, res.residual_max);
    const std::string tag = std::string(c.f.name) + " m=" + std::to_string(c.m);
    r.expect(err <= 1e-3, tag + " coefficient error " + fmt(err));
    r.expect(res.residual_max <= 1e-4, tag + " residual " + fmt(res.residual_max));
  }
  r.note("max coefficient error " + fmt(worst_err) + ", max residual " + fmt(worst_res));
  return r.outcome();
}

// min over the 1e-4 grid of constants of sum_i w_i phi(|f_i - c|), with equal values merged.
ScanResult scan_constant(const OrliczFunction& F, const SampledFunction& f) {
  std::map<double, double> mass;
  const auto w = f.domain->weights();
  for (std::size_t i = 0; i < f.size(); ++i) mass[f.values[i]] += w[i];
  const double lo = mass.begin()->first, hi = mass.rbegin()->first;
  ScanResult best{lo, INFINITY};
  const long steps = static_cast<long>(std::ceil((hi - lo) / 1e-4));
  for (long k = 0; k <= steps; ++k) {
    const double c = lo + 1e-4 * static_cast<double>(k);
    double v = 0.0;
    for (const auto& [y, m] : mass) v += m * F.phi(std::abs(y - c));
    if (v < best.value) best = {c, v};
  }
  return best;
}

Outcome criterion3() {
  Report r;
  const auto d = interval(-1.0, 1.0, 4096);
  const auto F = kinked();
  double worst = 0.0;
  for (const auto& nf : {sign2_f, ident_f, square_f}) {
    const auto f = sample1(d, nf.f);
    const ApproxProblem prob(F, f, 0);
    const auto res = solve(prob);
    const auto scan = scan_constant(F, f);
    const double gap = std::abs(res.objective - scan.value);
    worst = std::max(worst, gap);
    r.expect(gap <= 1e-6, std::string(nf.name) + " objective gap " + fmt(gap));
    for (double s : {1.0, -1.0}) {
      const double der = one_sided_derivative(prob, res.P, poly1({s}));
      r.expect(der >= -1e-4, std::string(nf.name) + " derivative " + fmt(der));
    }
  }
  r.note("max objective gap to scan " + fmt(worst));
  return r.outcome();
}

Outcome criterion4() {
  Report r;
  const auto d = interval(-1.0, 1.0, 2048);
  const std::vector<std::pair<std::string, OrliczFunction>> gens{{"s^2", square()},
                                                                 {"s^1.5", OrliczFunction(PowerGenerator{1.5})},
                                                                 {"s^3", OrliczFunction(PowerGenerator{3.0})},
                                                                 {"kinked", kinked()}};
  std::size_t accepted = 0, total = 0;
  for (const auto& [gname, F] : gens) {
    for (const auto& nf : {square_f, cube_f, xabsx_f, sign2_f, exp_f}) {
      for (int m = 0; m <= 2; ++m) {
        ++total;
        const ApproxProblem prob(F, sample1(d, nf.f), m);
        try {
          const auto res = solve(prob);
          ++accepted;
          const auto b = check_solution_bound(prob, res.P);
          r.expect(b.ok && b.lhs <= b.rhs, gname + " " + nf.name + " m=" + std::to_string(m) + " lhs " + fmt(b.lhs) +
                                               " > rhs " + fmt(b.rhs));
        } catch (const ConvergenceError& e) {
          r.fail(gname + " " + nf.name + " m=" + std::to_string(m) + " not accepted");
        }
      }
    }
  }
  r.expect(accepted >= 30, "only " + std::to_string(accepted) + " accepted solves");
  r.note(std::to_string(accepted) + "/" + std::to_string(total) + " accepted solves checked");
  return r.outcome();
}

Outcome criterion5() {
  Report r;
  for (std::size_t cells : {4096u, 16384u}) {
    const double tol = cells == 4096 ? 2e-2 : 5e-3;
    const auto d = interval(-1.0, 1.0, cells);
    const auto f = sample1(d, [](double x) { return std::pow(std::abs(x), -0.75); });
    try {
      const auto run = extend(square(), f, 1);
      const bool cauchy = run.cauchy_level && *run.cauchy_level <= 1024.0;
      r.expect(cauchy, std::to_string(cells) + " cells: Cauchy level " +
                           (run.cauchy_level ? fmt(*run.cauchy_level) : std::string("none")));
      // closed-form moments of |x|^(-3/4): int = 8, so the L^2 projection onto Pi^1 is (4, 0)
      const double err = std::max(std::abs(run.final_P.coeffs()[0] - 4.0), std::abs(run.final_P.coeffs()[1]));
      r.expect(err <= tol, std::to_string(cells) + " cells: coefficient error " + fmt(err) + " > " + fmt(tol));
      const auto b = check_extension_bound(square(), f, run.final_P);
      r.expect(b.ok, std::to_string(cells) + " cells: bound lhs " + fmt(b.lhs) + " > rhs " + fmt(b.rhs));
      if (cells == 4096) r.note("a0 " + fmt(run.final_P.coeffs()[0]) + " at 4096 cells");
    } catch (const ExtensionError& e) {
      r.fail(std::to_string(cells) + " cells: " + e.what());
    }
  }
  return r.outcome();
}

Outcome criterion6() {
  Report r;
  const auto d = interval(-1.0, 1.0, 4096);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Polynomial> shifts;
  for (int k = 0; k < 10; ++k) shifts.push_back(poly1({u(rng), u(rng)}));
  double worst = 0.0;
  for (const auto& c : l2_cases()) {
    const auto f = sample1(d, c.f.f);
    const auto base = solve(ApproxProblem(square(), f, c.m));
    for (const auto& R1 : shifts) {
      Polynomial R(PolynomialSpace{1, c.m}, {0.0});
      for (int i = 0; i <= std::min(c.m, 1); ++i) R.coeffs()[i] = R1.coeffs()[i];
      const auto g = add(f, sample1(d, [&](double x) { return R(std::span<const double>(&x, 1)); }));
      const auto res = solve(ApproxProblem(square(), g, c.m));
      const double dist = coefficient_distance(res.P, base.P + R);
      worst = std::max(worst, dist);
      r.expect(dist <= 1e-6, std::string(c.f.name) + " m=" + std::to_string(c.m) + " distance " + fmt(dist));
    }
  }
  r.note("max coefficient distance " + fmt(worst) + " over 90 shifts");
  return r.outcome();
}

Outcome criterion7() {
  Report r;
  const auto d = interval(-1.0, 1.0, 4096);
  const std::vector<std::pair<std::string, OrliczFunction>> gens{{"s^1.5", OrliczFunction(PowerGenerator{1.5})},
                                                                 {"s^3", OrliczFunction(PowerGenerator{3.0})},
                                                                 {"kinked", kinked()}};
  double worst = 0.0;
  int instances = 0;
  for (const auto& [gname, F] : gens) {
    r.expect(F.strictly_increasing(), gname + " psi^+ not strictly increasing");
    for (const auto& nf : {mixed_f, abs_f}) {
      const ApproxProblem prob(F, sample1(d, nf.f), 2);
      ++instances;
      double inst = 0.0;
      std::vector<Polynomial> sols;
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SolveOptions o;
        o.seed = seed;
        sols.push_back(solve(prob, o).P);
      }
      for (std::size_t i = 0; i < sols.size(); ++i)
        for (std::size_t j = i + 1; j < sols.size(); ++j) inst = std::max(inst, coefficient_distance(sols[i], sols[j]));
      worst = std::max(worst, inst);
      r.expect(inst <= 1e-5, gname + " " + nf.name + " distance " + fmt(inst));
    }
  }
  r.note(std::to_string(instances) + " instances, max pairwise distance " + fmt(worst));
  return r.outcome();
}

Outcome criterion8() {
  Report r;
  const auto d = interval(-1.0, 1.0, 4096);
  const auto h = sample(d, make_test_function("signed_pow"));
  const auto bump = sample(d, make_test_function("bump"));
  SampledFunction H = h;
  for (std::size_t i = 0; i < H.size(); ++i) H.values[i] = std::abs(h.values[i]) + std::abs(bump.values[i]);
  std::vector<Perturbation> perts;
  for (int n = 1; n <= 64; ++n) perts.push_back({static_cast<double>(n), add(h, scaled(bump, 1.0 / n))});
  const auto rows = continuity_probe(square(), h, perts, H, 1);
  std::vector<double> dist;
  for (const auto& row : rows) dist.push_back(row.poly_distance);
  r.expect(decreasing_up_to_noise(dist, 0.1), "distances not decreasing within 10%");
  r.expect(dist.back() < 1e-3, "distance at n=64 is " + fmt(dist.back()));
  r.note("distance " + fmt(dist.front()) + " at n=1, " + fmt(dist.back()) + " at n=64");
  return r.outcome();
}

Outcome criterion9() {
  Report r;
  const auto lp = make_local_problem(square(), make_test_function("signed_pow"), {0.0}, 1);
  const auto constants = estimate_local_constants(lp.F, lp.space(), 20000, 1);
  const auto tr = convergence_experiment(lp, default_eps_schedule(), constants);
  r.expect(tr.slope >= 0.9, "slope " + fmt(tr.slope));
  r.expect(tr.final_error <= 1e-3, "final error " + fmt(tr.final_error));
  for (const auto& row : tr.rows) {
    const double want = row.eps / 3.0;
    r.expect(std::abs(row.rho - want) <= 0.02 * want, "rho " + fmt(row.rho) + " at eps " + fmt(row.eps));
    for (double q : row.bound_ratios) r.expect(q <= 1.0, "coefficient bound ratio " + fmt(q) + " at eps " + fmt(row.eps));
  }
  r.note("slope " + fmt(tr.slope) + ", final error " + fmt(tr.final_error));
  return r.outcome();
}

Outcome criterion10() {
  Report r;
  std::istringstream in(R"([run]
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
sandwich_samples = 100
)");
  const auto art = run(parse_config(in));
  const auto j = nlohmann::json::parse(art.summary_json);
  r.expect(j["result"]["constants"].contains("C1"), "C1 missing from the summary");
  int sandwich = 0, sup = 0;
  for (const auto& c : j["checks"]) {
    const std::string name = c["name"];
    const bool is_sandwich = name.rfind("sandwich_", 0) == 0;
    const bool is_sup = name.rfind("local_sup_bound", 0) == 0;
    sandwich += is_sandwich;
    sup += is_sup;
    if (is_sandwich || is_sup) r.expect(c["pass"].get<bool>(), name + " failed");
  }
  r.expect(sandwich >= 20 && sup >= 10, "expected sandwich and sup checks on all 10 radii");
  for (const auto& row : j["result"]["rows"])
    r.expect(row["sandwich"]["samples"] == 100, "sandwich sample count at eps " + row["eps"].dump());
  r.note("C1 = " + fmt(j["result"]["constants"]["C1"].get<double>()) + ", " + std::to_string(sandwich) +
         " sandwich checks");
  return r.outcome();
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "structural inequality suite", 1.0, criterion1},
      {2, "smooth case matches L2 projection", 5.0, criterion2},
      {3, "kinked constants match brute-force scan", 5.0, criterion3},
      {4, "solution bound across the solve matrix", 0.0, criterion4},
      {5, "extension of |x|^(-3/4) against moment oracle", 30.0, criterion5},
      {6, "translation by polynomials", 0.0, criterion6},
      {7, "uniqueness under restarts", 0.0, criterion7},
      {8, "continuity of the extended operator", 0.0, criterion8},
      {9, "local convergence of x|x| at 0", 60.0, criterion9},
      {10, "local sandwich and sup bounds", 0.0, criterion10},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }
  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs > c.limit_s) {
      o.pass = false;
      o.detail += (o.detail.empty() ? "" : "; ") + std::string("runtime over ") + fmt(c.limit_s) + " s";
    }
    std::printf("[%s] c%d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
