#include "orlicz/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "orlicz/quadrature.hpp"

namespace orlicz {

namespace {

std::vector<double> scaled_monomial_factors(const PolynomialSpace& space, const QuadDomain& domain) {
  const auto alphas = space.multi_indices();
  const auto& hw = domain.half_widths();
  std::vector<double> out(alphas.size(), 1.0);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    for (int k = 0; k < space.dim; ++k) out[i] *= std::pow(hw[static_cast<std::size_t>(k)], alphas[i].exps[k]);
  }
  return out;
}

// |r| within rounding of a jump of psi counts as sitting on it, so the
// one-sided values do not depend on how P was evaluated.
double snap_to_jump(std::span<const double> jumps, double a, double f, double p) {
  const double tol = 16.0 * std::numeric_limits<double>::epsilon() * std::max({1.0, std::abs(f), std::abs(p)});
  for (double b : jumps) {
    if (std::abs(a - b) <= tol) return b;
  }
  return a;
}

// Right derivative of t -> sum_i w_i phi(|f_i - p_i - t q_i|) at t.
double directional(const OrliczFunction& F, std::span<const double> f, std::span<const double> w,
                   std::span<const double> p, std::span<const double> q, double t) {
  const auto jumps = F.breakpoints();
  CompensatedSum acc;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (q[i] == 0.0) continue;
    const double pt = p[i] + t * q[i];
    const double r = f[i] - pt;
    if (r == 0.0) continue;
    const double sigma = r > 0.0 ? 1.0 : -1.0;
    const Side side = sigma * q[i] > 0.0 ? Side::left : Side::right;
    acc.add(-sigma * q[i] * w[i] * F.psi(snap_to_jump(jumps, std::abs(r), f[i], pt), side));
  }
  return acc.value();
}

double modular(const OrliczFunction& F, std::span<const double> f, std::span<const double> w,
               std::span<const double> p, std::span<const double> q, double t) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = f[i] - (p[i] + t * q[i]);
    acc.add(w[i] * F.phi(std::abs(r)));
  }
  const double v = acc.value();
  if (!std::isfinite(v)) throw NumericError("objective overflow");
  return v;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Coefficients c in the scaled basis u = (t - centre) / half_width.
class Engine {
 public:
  explicit Engine(const ApproxProblem& prob)
      : F_(prob.F), dom_(prob.domain()), f_(prob.f.values), w_(dom_.weights()), space_(prob.space),
        alphas_(space_.multi_indices()), factors_(scaled_monomial_factors(space_, dom_)) {
    n_ = dom_.size();
    d_ = alphas_.size();
    basis_.resize(n_ * d_);
    const auto& c = dom_.center();
    const auto& hw = dom_.half_widths();
    const int dim = dom_.dim();
    for (std::size_t i = 0; i < n_; ++i) {
      const auto t = dom_.point(i);
      double u[2] = {0.0, 0.0};
      for (int k = 0; k < dim; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        u[kk] = (t[kk] - c[kk]) / hw[kk];
      }
      for (std::size_t j = 0; j < d_; ++j) {
        double v = 1.0;
        for (int k = 0; k < dim; ++k) {
          for (int e = 0; e < alphas_[j].exps[k]; ++e) v *= u[k];
        }
        basis_[i * d_ + j] = v;
      }
    }
  }

  std::size_t dim() const { return d_; }
  std::size_t size() const { return n_; }

  std::vector<double> values(const std::vector<double>& c) const {
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d_; ++j) s += basis_[i * d_ + j] * c[j];
      out[i] = s;
    }
    return out;
  }

  Polynomial to_polynomial(const std::vector<double>& c) const {
    std::vector<double> a(d_);
    for (std::size_t j = 0; j < d_; ++j) a[j] = c[j] / factors_[j];
    return Polynomial(space_, dom_.center(), std::move(a));
  }

  std::vector<double> from_polynomial(const Polynomial& P) const {
    if (!(P.space() == space_)) throw DomainError("solve: warm start lies in a different polynomial space");
    const Polynomial R = P.recentered(dom_.center());
    std::vector<double> c(d_);
    for (std::size_t j = 0; j < d_; ++j) c[j] = R.coeffs()[j] * factors_[j];
    return c;
  }

  std::vector<double> least_squares() const {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d_), static_cast<Eigen::Index>(d_));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d_));
    for (std::size_t i = 0; i < n_; ++i) {
      const double* row = &basis_[i * d_];
      for (std::size_t j = 0; j < d_; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        b(jj) += w_[i] * row[j] * f_[i];
        for (std::size_t k = 0; k <= j; ++k) M(jj, static_cast<Eigen::Index>(k)) += w_[i] * row[j] * row[k];
      }
    }
    M = M.selfadjointView<Eigen::Lower>();
    const Eigen::VectorXd x = M.ldlt().solve(b);
    std::vector<double> c(d_);
    for (std::size_t j = 0; j < d_; ++j) c[j] = std::isfinite(x(static_cast<Eigen::Index>(j))) ? x(static_cast<Eigen::Index>(j)) : 0.0;
    return c;
  }

  double objective(std::span<const double> p) const {
    const std::vector<double> zero(n_, 0.0);
    return modular(F_, f_, w_, p, zero, 0.0);
  }

  // Gradient (right-sided psi) and curvature model of the modular.
  void newton_model(std::span<const double> p, Eigen::VectorXd& g, Eigen::MatrixXd& H) const {
    const auto d = static_cast<Eigen::Index>(d_);
    g = Eigen::VectorXd::Zero(d);
    H = Eigen::MatrixXd::Zero(d, d);
    const double floor = 1e-12 * std::max(max_abs(f_), 1.0);
    for (std::size_t i = 0; i < n_; ++i) {
      const double r = f_[i] - p[i];
      const double a = std::abs(r);
      const double* row = &basis_[i * d_];
      const double slope = F_.psi_slope(std::max(a, floor));
      const double gi = r > 0.0 ? -F_.psi_plus(a) : (r < 0.0 ? F_.psi_plus(a) : 0.0);
      for (std::size_t j = 0; j < d_; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        g(jj) += w_[i] * gi * row[j];
        for (std::size_t k = 0; k <= j; ++k) H(jj, static_cast<Eigen::Index>(k)) += w_[i] * slope * row[j] * row[k];
      }
    }
    H = H.selfadjointView<Eigen::Lower>();
  }

  // Exact minimisation along q starting at p with value `current`. Returns
  // the step taken (0 when no decrease) and updates `current`.
  double line_minimise(std::span<const double> p, std::span<const double> q, double& current,
                       double first_step) const {
    const double d0 = directional(F_, f_, w_, p, q, 0.0);
    if (!(d0 < 0.0)) return 0.0;
    auto deriv = [&](double t) {
      try {
        return directional(F_, f_, w_, p, q, t);
      } catch (const RangeError&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    double lo = 0.0;
    double hi = first_step;
    int doublings = 0;
    while (deriv(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++doublings > 200) return 0.0;
    }
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi)) break;
      if (deriv(mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    // Near a kink the gain can drop below the rounding of the sum; a step
    // that leaves the objective unchanged up to rounding is still taken.
    double best_t = 0.0;
    double best = current;
    for (double t : {lo, hi}) {
      if (t == 0.0) continue;
      double v;
      try {
        v = modular(F_, f_, w_, p, q, t);
      } catch (const RangeError&) {
        continue;
      }
      if (v < best || (best_t == 0.0 && v <= current + 1e-15 * std::abs(current))) {
        best = v;
        best_t = t;
      }
    }
    current = best;
    return best_t;
  }

  // Scaled-basis coefficients of a polynomial on this domain.
  std::vector<double> coefficients_of(const Polynomial& Q) const { return from_polynomial(Q); }

  std::span<const double> f() const { return f_; }
  std::span<const double> w() const { return w_; }
  const OrliczFunction& F() const { return F_; }

 private:
  const OrliczFunction& F_;
  const QuadDomain& dom_;
  std::span<const double> f_;
  std::span<const double> w_;
  PolynomialSpace space_;
  std::vector<MultiIndex> alphas_;
  std::vector<double> factors_;
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> basis_;
};

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// Integral of g over {sign(f - P) = fs} n {sign(Q) = qs}.
double region(const QuadDomain& dom, std::span<const double> r, std::span<const double> q, int fs, int qs,
              const std::vector<double>& g) {
  Mask mask(r.size(), 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const bool fm = fs > 0 ? r[i] > 0.0 : r[i] < 0.0;
    const bool qm = qs > 0 ? q[i] > 0.0 : q[i] < 0.0;
    mask[i] = static_cast<std::uint8_t>(fm && qm);
  }
  return region_integrate(dom, mask, g);
}

}  // namespace

ApproxProblem::ApproxProblem(OrliczFunction F_in, SampledFunction f_in, int degree)
    : F(std::move(F_in)), f(std::move(f_in)), space{f.domain ? f.domain->dim() : 1, degree} {
  if (!f.domain) throw DomainError("approximation problem without a domain");
  if (degree < 0) throw DomainError("polynomial degree must be >= 0");
  if (f.values.size() != f.domain->size()) throw DomainError("sampled function does not match its domain");
  std::vector<double> g(f.size());
  try {
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = F.phi(std::abs(f.values[i]));
  } catch (const RangeError& e) {
    throw DomainError(std::string("f is not in L^phi on the grid: ") + e.what());
  }
  double total = 0.0;
  try {
    total = integrate(*f.domain, g);
  } catch (const NumericError& e) {
    throw DomainError(std::string("f is not in L^phi on the grid: ") + e.what());
  }
  if (!std::isfinite(total)) throw DomainError("f is not in L^phi on the grid: modular overflows");
}

double objective(const ApproxProblem& prob, const Polynomial& P) {
  const auto p = poly_eval(P, prob.domain());
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) g[i] = prob.F.phi(std::abs(prob.f.values[i] - p[i]));
  try {
    return integrate(prob.domain(), g);
  } catch (const NumericError& e) {
    throw NumericError(std::string("objective overflow: ") + e.what());
  }
}

double one_sided_derivative(const ApproxProblem& prob, const Polynomial& P, const Polynomial& Q) {
  const auto p = poly_eval(P, prob.domain());
  const auto q = poly_eval(Q, prob.domain());
  return directional(prob.F, prob.f.values, prob.domain().weights(), p, q, 0.0);
}

double inequality_gap(const OrliczFunction& F, const SampledFunction& f, const Polynomial& P, const Polynomial& Q,
                      GapForm form) {
  if (!f.domain) throw DomainError("inequality_gap: sampled function without a domain");
  const QuadDomain& dom = *f.domain;
  const auto p = poly_eval(P, dom);
  const auto q = poly_eval(Q, dom);
  const std::size_t n = p.size();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = f.values[i] - p[i];

  const auto jumps = F.breakpoints();
  std::vector<double> lq(n), rq(n);
  const bool signed_q = form == GapForm::signed_direction;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = snap_to_jump(jumps, std::abs(r[i]), f.values[i], p[i]);
    const double factor = signed_q ? q[i] : std::abs(q[i]);
    lq[i] = F.psi_minus(a) * factor;
    rq[i] = F.psi_plus(a) * factor;
  }

  double lhs = 0.0;
  double rhs = 0.0;
  switch (form) {
    case GapForm::signed_direction:
      lhs = region(dom, r, q, +1, +1, lq) - region(dom, r, q, -1, -1, lq);
      rhs = region(dom, r, q, -1, +1, rq) - region(dom, r, q, +1, -1, rq);
      break;
    case GapForm::reflected_absolute:
      lhs = region(dom, r, q, +1, -1, lq) + region(dom, r, q, -1, +1, lq);
      rhs = region(dom, r, q, -1, -1, rq) + region(dom, r, q, +1, +1, rq);
      break;
    case GapForm::absolute:
      lhs = region(dom, r, q, +1, +1, lq) + region(dom, r, q, -1, -1, lq);
      rhs = region(dom, r, q, -1, +1, rq) + region(dom, r, q, +1, -1, rq);
      break;
  }
  return lhs - rhs;
}

double characterization_residual(const ApproxProblem& prob, const Polynomial& P, std::span<const Polynomial> tests) {
  if (tests.empty()) throw DomainError("characterization_residual: empty test set");
  const auto p = poly_eval(P, prob.domain());
  double worst = 0.0;
  for (const auto& Q : tests) {
    const auto q = poly_eval(Q, prob.domain());
    worst = std::min(worst, directional(prob.F, prob.f.values, prob.domain().weights(), p, q, 0.0));
  }
  return -worst;
}

std::vector<Polynomial> certification_set(const PolynomialSpace& space, const QuadDomain& domain,
                                          std::size_t random_count, std::uint64_t seed) {
  if (space.dim != domain.dim()) throw DomainError("certification_set: dimension mismatch");
  const auto factors = scaled_monomial_factors(space, domain);
  const std::size_t d = space.size();
  std::vector<Polynomial> out;
  out.reserve(2 * d + random_count);
  auto normalised = [&](std::vector<double> coeffs) {
    Polynomial Q(space, domain.center(), std::move(coeffs));
    const double s = poly_norms(Q, domain).sup_norm;
    if (s > 0.0) Q *= 1.0 / s;
    return Q;
  };
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> c(d, 0.0);
    c[j] = 1.0 / factors[j];
    const Polynomial Q = normalised(c);
    out.push_back(Q);
    out.push_back(-Q);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (std::size_t k = 0; k < random_count; ++k) {
    std::vector<double> c(d);
    for (std::size_t j = 0; j < d; ++j) c[j] = unif(rng) / factors[j];
    out.push_back(normalised(std::move(c)));
  }
  return out;
}

double residual_tolerance(const OrliczFunction& F, const SampledFunction& f, double tol) {
  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = F.psi_plus(std::abs(f.values[i]));
  return tol * (integrate(*f.domain, g) + 1.0);
}

ApproxResult solve(const ApproxProblem& prob, const SolveOptions& opts) {
  const Engine eng(prob);
  const std::size_t d = eng.dim();
  const double fmax = max_abs(eng.f());

  std::vector<double> c;
  if (opts.warm_start) {
    c = eng.from_polynomial(*opts.warm_start);
  } else {
    c = eng.least_squares();
    if (opts.seed != 0) {
      std::mt19937_64 rng(opts.seed);
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      const double amp = 0.5 * std::max(fmax, max_abs(c));
      for (auto& v : c) v += amp * unif(rng);
    }
  }

  ApproxResult res{eng.to_polynomial(c), 0.0, 0.0, 0.0, 0, {}};
  std::vector<double> p = eng.values(c);
  double current = eng.objective(p);
  res.trace.push_back(current);

  // Subgradient phase with best-iterate memory.
  {
    double spread = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) spread = std::max(spread, std::abs(eng.f()[i] - p[i]));
    const double s0 = 0.25 * spread;
    std::vector<double> best_c = c;
    double best = current;
    std::vector<double> x = c;
    Eigen::VectorXd g;
    Eigen::MatrixXd H;
    for (std::size_t k = 0; k < opts.subgradient_iters && s0 > 0.0; ++k) {
      const auto px = eng.values(x);
      eng.newton_model(px, g, H);
      const double gn = g.norm();
      if (!(gn > 0.0) || !std::isfinite(gn)) break;
      const double step = s0 / std::pow(1.0 + static_cast<double>(k), 0.75);
      for (std::size_t j = 0; j < d; ++j) x[j] -= step * g(static_cast<Eigen::Index>(j)) / gn;
      double v;
      try {
        v = eng.objective(eng.values(x));
      } catch (const std::exception&) {
        x = best_c;
        continue;
      }
      ++res.iterations;
      if (v < best) {
        best = v;
        best_c = x;
      }
      res.trace.push_back(best);
    }
    c = best_c;
    current = best;
    p = eng.values(c);
  }

  const auto tests = certification_set(prob.space, prob.domain(), opts.random_tests, opts.seed);
  std::vector<std::vector<double>> test_dirs;
  test_dirs.reserve(tests.size());
  for (const auto& Q : tests) test_dirs.push_back(eng.coefficients_of(Q));

  auto step_along = [&](const std::vector<double>& dir, double first_step) {
    const auto q = eng.values(dir);
    const double qmax = max_abs(q);
    if (!(qmax > 0.0) || !std::isfinite(qmax)) return false;
    if (first_step <= 0.0) {
      double spread = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) spread = std::max(spread, std::abs(eng.f()[i] - p[i]));
      first_step = std::max(spread, 1e-300) / qmax;
    }
    const double before = current;
    const double t = eng.line_minimise(p, q, current, first_step);
    if (t == 0.0) return false;
    axpy(c, t, dir);
    p = eng.values(c);
    current = eng.objective(p);
    return current < before;
  };

  Eigen::VectorXd g;
  Eigen::MatrixXd H;
  for (std::size_t sweep = 0; sweep < opts.max_iter; ++sweep) {
    const double start = current;
    eng.newton_model(p, g, H);
    if (g.allFinite() && H.allFinite() && g.norm() > 0.0) {
      const double reg = 1e-10 * std::max(H.trace() / static_cast<double>(d), 1e-300);
      Eigen::MatrixXd Hr = H;
      Hr.diagonal().array() += reg;
      Eigen::VectorXd dir = -Hr.ldlt().solve(g);
      if (!dir.allFinite() || dir.dot(g) >= 0.0) dir = -g;
      step_along(std::vector<double>(dir.data(), dir.data() + dir.size()), 1.0);
    }
    for (std::size_t j = 0; j < d; ++j) {
      for (double sgn : {1.0, -1.0}) {
        std::vector<double> e(d, 0.0);
        e[j] = sgn;
        step_along(e, 0.0);
      }
    }
    ++res.iterations;
    res.trace.push_back(current);
    const double stall = 1e-14 * (std::abs(start) + 1e-300);
    if (start - current > stall) continue;

    // Stagnated on Newton and coordinates: descend along violating certificates.
    bool moved = false;
    const auto q_of = [&](const std::vector<double>& dir) { return eng.values(dir); };
    std::vector<std::pair<double, std::size_t>> violating;
    for (std::size_t k = 0; k < test_dirs.size(); ++k) {
      const double dk = directional(eng.F(), eng.f(), eng.w(), p, q_of(test_dirs[k]), 0.0);
      if (dk < 0.0) violating.emplace_back(dk, k);
    }
    std::sort(violating.begin(), violating.end());
    for (const auto& [dk, k] : violating) {
      const double before = current;
      step_along(test_dirs[k], 0.0);
      if (before - current > stall) moved = true;
    }
    if (!moved) break;
  }

  res.P = eng.to_polynomial(c);
  res.objective = objective(prob, res.P);
  res.residual_max = characterization_residual(prob, res.P, tests);
  res.residual_tolerance = residual_tolerance(prob.F, prob.f, opts.tol);
  if (!(res.residual_max <= res.residual_tolerance)) {
    std::ostringstream msg;
    msg << "solve did not converge: characterization residual " << res.residual_max << " exceeds tolerance "
        << res.residual_tolerance << " after " << res.iterations << " iterations";
    throw ConvergenceError(msg.str(), std::move(res));
  }
  return res;
}

BoundCheck check_solution_bound(const ApproxProblem& prob, const Polynomial& P) {
  const auto p = poly_eval(P, prob.domain());
  std::vector<double> lhs_g(p.size()), rhs_g(p.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = std::abs(p[i]);
    sup = std::max(sup, a);
    lhs_g[i] = prob.F.psi_minus(a) * a;
    rhs_g[i] = prob.F.psi_plus(std::abs(prob.f.values[i]));
  }
  BoundCheck out;
  out.lhs = integrate(prob.domain(), lhs_g);
  out.rhs = 5.0 * prob.F.lambda_psi_minus() * sup * integrate(prob.domain(), rhs_g);
  out.ok = out.lhs <= out.rhs * (1.0 + 1e-9);
  return out;
}

SignSetMeasures sign_set_measures(const SampledFunction& f, const Polynomial& P) {
  const auto p = poly_eval(P, *f.domain);
  const auto w = f.domain->weights();
  CompensatedSum above, below;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (f.values[i] > p[i]) above.add(w[i]);
    if (f.values[i] < p[i]) below.add(w[i]);
  }
  return {above.value(), below.value()};
}

}  // namespace orlicz
