#include "orlicz/local.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "orlicz/errors.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

namespace {

std::size_t default_cells(int dim) { return dim == 1 ? 2048 : 256; }

double avg_psi_plus(const OrliczFunction& F, const QuadDomain& dom, std::span<const double> v) {
  std::vector<double> g(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) g[i] = F.psi_plus(std::abs(v[i]));
  return integrate(dom, g) / dom.measure();
}

double eps_pow(double eps, int k) { return std::pow(eps, k); }

// P = sum c_alpha u^alpha on the unit ball around the origin.
Polynomial unit_poly(const PolynomialSpace& space, std::vector<double> c) {
  return Polynomial(space, std::vector<double>(static_cast<std::size_t>(space.dim), 0.0), std::move(c));
}

std::vector<Polynomial> chebyshev(int m) {
  std::vector<std::vector<double>> T{{1.0}, {0.0, 1.0}};
  for (int k = 2; k <= m; ++k) {
    std::vector<double> next(static_cast<std::size_t>(k) + 1, 0.0);
    for (std::size_t i = 0; i < T[k - 1].size(); ++i) next[i + 1] += 2.0 * T[k - 1][i];
    for (std::size_t i = 0; i < T[k - 2].size(); ++i) next[i] -= T[k - 2][i];
    T.push_back(next);
  }
  std::vector<Polynomial> out;
  const PolynomialSpace space{1, m};
  for (int k = 0; k <= m; ++k) {
    std::vector<double> c(space.size(), 0.0);
    std::copy(T[k].begin(), T[k].end(), c.begin());
    out.push_back(unit_poly(space, c));
  }
  return out;
}

}  // namespace

LocalProblem make_local_problem(OrliczFunction F, TestFunction f, std::vector<double> x, int m) {
  LocalProblem lp{std::move(F), std::move(f), std::move(x), m, std::nullopt, 0, {}};
  lp.reference_P = taylor_polynomial(lp.f, lp.space(), lp.x);
  return lp;
}

std::shared_ptr<const QuadDomain> local_ball(const LocalProblem& lp, double eps) {
  if (!(eps > 0.0)) throw DomainError("ball radius must be positive");
  const int dim = static_cast<int>(lp.x.size());
  if (dim != lp.f.dim) throw DomainError("local problem: centre and function dimensions differ");
  const std::size_t cells = lp.cells ? lp.cells : default_cells(dim);
  return std::make_shared<const QuadDomain>(QuadDomain::ball(lp.x, eps, cells));
}

Polynomial local_fit(const LocalProblem& lp, double eps) {
  const auto ball = local_ball(lp, eps);
  const auto f = sample(ball, lp.f);
  try {
    return extend(lp.F, f, lp.m, lp.opts).final_P.recentered(lp.x);
  } catch (const NumericError& e) {
    std::ostringstream msg;
    msg << "local fit at eps = " << eps << ": " << e.what();
    throw NumericError(msg.str());
  }
}

double smoothness_ratio(const LocalProblem& lp, double eps) {
  if (!lp.reference_P) throw DomainError("smoothness_ratio needs a reference polynomial");
  const auto ball = local_ball(lp, eps);
  const auto f = sample(ball, lp.f);
  const auto p = poly_eval(*lp.reference_P, *ball);
  std::vector<double> r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = f.values[i] - p[i];
  return avg_psi_plus(lp.F, *ball, r) / lp.F.psi_plus(eps_pow(eps, lp.m));
}

LocalConstants estimate_local_constants(const OrliczFunction& F, const PolynomialSpace& space, std::size_t trials,
                                        std::uint64_t seed, std::size_t cells) {
  const std::size_t res = cells ? cells : default_cells(space.dim);
  const QuadDomain unit = QuadDomain::ball(std::vector<double>(static_cast<std::size_t>(space.dim), 0.0), 1.0, res);
  LocalConstants c;
  c.C1 = estimate_norm_equivalence(space, unit, trials, seed);

  auto coefficient_ratio = [&](const Polynomial& P) {
    const double sup = poly_norms(P, unit).sup_norm;
    double big = 0.0;
    for (double v : P.coeffs()) big = std::max(big, std::abs(v));
    return sup > 0.0 ? big / sup : 0.0;
  };
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<double> coeffs(space.size());
    for (auto& v : coeffs) v = unif(rng);
    c.C = std::max(c.C, coefficient_ratio(unit_poly(space, coeffs)));
  }
  for (std::size_t j = 0; j < space.size(); ++j) {
    std::vector<double> coeffs(space.size(), 0.0);
    coeffs[j] = 1.0;
    c.C = std::max(c.C, coefficient_ratio(unit_poly(space, coeffs)));
  }
  if (space.dim == 1) {
    for (const auto& T : chebyshev(space.degree)) c.C = std::max(c.C, coefficient_ratio(T));
  }

  c.K_sup = 5.0 * F.lambda_psi_plus() * F.lambda_phi() / c.C1;
  c.k = c.C1 < 1.0 ? static_cast<int>(std::ceil(std::log2(1.0 / c.C1))) : 0;
  c.K = std::pow(F.lambda_psi_plus(), c.k) * c.K_sup;
  return c;
}

std::vector<double> coefficient_bound_ratios(const LocalProblem& lp, double eps, const Polynomial& P,
                                             const LocalConstants& c) {
  const auto ball = local_ball(lp, eps);
  const auto f = sample(ball, lp.f);
  const double avg = avg_psi_plus(lp.F, *ball, f.values);
  const Polynomial R = P.recentered(lp.x);
  std::vector<double> out;
  for (const auto& a : R.space().multi_indices()) {
    const double num = lp.F.psi_plus(eps_pow(eps, a.order()) * std::abs(R.coefficient(a)) / c.C);
    const double den = c.K * avg;
    out.push_back(den > 0.0 ? num / den : (num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()));
  }
  return out;
}

std::vector<double> coefficient_bound_check(const LocalProblem& lp, double eps, const LocalConstants& c) {
  return coefficient_bound_ratios(lp, eps, local_fit(lp, eps), c);
}

SandwichReport sandwich_check(const LocalProblem& lp, double eps, const LocalConstants& c, std::size_t samples,
                              std::uint64_t seed) {
  const auto ball = local_ball(lp, eps);
  const auto space = lp.space();
  const auto alphas = space.multi_indices();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_real_distribution<double> decade(-2.0, 2.0);
  SandwichReport rep;
  for (std::size_t s = 0; s < samples; ++s) {
    const double amp = std::pow(10.0, decade(rng));
    std::vector<double> coeffs(alphas.size());
    for (std::size_t j = 0; j < alphas.size(); ++j) coeffs[j] = amp * unif(rng) / eps_pow(eps, alphas[j].order());
    const Polynomial P(space, lp.x, coeffs);
    const auto p = poly_eval(P, *ball);
    double sup = 0.0;
    for (double v : p) sup = std::max(sup, std::abs(v));
    if (!(sup > 0.0)) continue;
    const double mid = avg_psi_plus(lp.F, *ball, p);
    const double lower = c.C1 / lp.F.lambda_phi() * lp.F.psi_plus(c.C1 * sup);
    const double upper = lp.F.psi_plus(sup);
    rep.worst_lower = std::max(rep.worst_lower, lower / mid);
    rep.worst_upper = std::max(rep.worst_upper, mid / upper);
    ++rep.samples;
  }
  rep.ok = rep.worst_lower <= 1.0 + 1e-12 && rep.worst_upper <= 1.0 + 1e-12;
  return rep;
}

SupBound local_sup_bound(const LocalProblem& lp, double eps, const Polynomial& P, const LocalConstants& c) {
  const auto ball = local_ball(lp, eps);
  const auto f = sample(ball, lp.f);
  SupBound b;
  b.lhs = lp.F.psi_plus(c.C1 * poly_norms(P, *ball).sup_norm);
  b.rhs = c.K_sup * avg_psi_plus(lp.F, *ball, f.values);
  b.ok = b.lhs <= b.rhs * (1.0 + 1e-9);
  return b;
}

std::vector<double> default_eps_schedule() {
  std::vector<double> out;
  for (int k = 1; k <= 10; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

LocalFitTrace convergence_experiment(const LocalProblem& lp, std::span<const double> eps_schedule,
                                     const LocalConstants& constants, double error_tol) {
  if (eps_schedule.size() < 4) throw DomainError("convergence_experiment needs at least 4 radii");
  if (!lp.reference_P) throw DomainError("convergence_experiment needs a reference polynomial");
  if (!lp.F.strictly_increasing()) throw DomainError("convergence_experiment needs a strictly increasing psi^+");
  for (std::size_t i = 1; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] < eps_schedule[i - 1])) throw DomainError("eps schedule must be strictly descending");
  }
  const Polynomial ref = lp.reference_P->recentered(lp.x);
  const auto alphas = lp.space().multi_indices();

  LocalFitTrace tr;
  tr.eps_schedule.assign(eps_schedule.begin(), eps_schedule.end());
  tr.constants = constants;
  for (double eps : eps_schedule) {
    LocalRow row;
    row.eps = eps;
    row.P = local_fit(lp, eps);
    for (const auto& a : alphas) {
      const double err = std::abs(row.P.coefficient(a) - ref.coefficient(a));
      row.errors.push_back(err);
      row.max_error = std::max(row.max_error, err);
      const double e = eps_pow(eps, a.order());
      row.chain.push_back(lp.F.psi_plus(e * err / constants.C) / lp.F.psi_plus(e));
      row.monotone.push_back(lp.F.psi_plus(e) / lp.F.psi_plus(eps_pow(eps, lp.m)));
    }
    row.rho = smoothness_ratio(lp, eps);
    row.bound_ratios = coefficient_bound_ratios(lp, eps, row.P, constants);
    row.sup_bound = local_sup_bound(lp, eps, row.P, constants);
    for (double r : row.bound_ratios) tr.bounds_ok = tr.bounds_ok && r <= 1.0;
    tr.bounds_ok = tr.bounds_ok && row.sup_bound.ok;
    if (eps <= 1.0) {
      for (double v : row.monotone) tr.bounds_ok = tr.bounds_ok && v >= 1.0 - 1e-12;
    }
    tr.rows.push_back(std::move(row));
  }

  // log-log least squares over the rows with a non-zero error
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  std::vector<double> errs;
  for (const auto& row : tr.rows) {
    errs.push_back(row.max_error);
    if (!(row.max_error > 0.0)) continue;
    const double lx = std::log(row.eps), ly = std::log(row.max_error);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  tr.slope = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : std::numeric_limits<double>::quiet_NaN();
  tr.final_error = tr.rows.back().max_error;
  tr.errors_decay = decreasing_up_to_noise(errs) && tr.final_error <= error_tol;

  const std::size_t K = tr.rows.size();
  const double rho1 = tr.rows.front().rho;
  bool shrinking = true;
  for (std::size_t i = K - 3; i < K; ++i) {
    const double prev = tr.rows[i - 1].rho, cur = tr.rows[i].rho;
    if (cur == 0.0) continue;
    const double halvings = std::log2(tr.rows[i - 1].eps / tr.rows[i].eps);
    if (!(std::pow(prev / cur, 1.0 / halvings) >= 1.2)) shrinking = false;
  }
  tr.in_tm = shrinking && tr.rows.back().rho <= 0.05 * rho1;
  return tr;
}

UniquenessProbe reference_uniqueness_probe(const LocalProblem& lp, const Polynomial& P1, const Polynomial& P2,
                                           std::span<const double> eps_schedule) {
  UniquenessProbe out;
  out.floor = std::numeric_limits<double>::infinity();
  const Polynomial D = P1 - P2;
  for (double eps : eps_schedule) {
    const auto ball = local_ball(lp, eps);
    const auto d = poly_eval(D, *ball);
    const double r = avg_psi_plus(lp.F, *ball, d) / lp.F.psi_plus(eps_pow(eps, lp.m));
    out.ratios.push_back(r);
    out.floor = std::min(out.floor, r);
  }
  if (eps_schedule.empty()) out.floor = 0.0;
  return out;
}

}  // namespace orlicz
