#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "orlicz/extension.hpp"
#include "orlicz/generator.hpp"
#include "orlicz/polynomial.hpp"
#include "orlicz/registry.hpp"

namespace orlicz {

/// Local extended approximation of a closed-form f on balls B(x, eps).
struct LocalProblem {
  OrliczFunction F;
  TestFunction f;
  std::vector<double> x;
  int m = 1;
  /// Candidate P_x(f), centred at x, coefficients d^alpha f(x)/alpha!.
  std::optional<Polynomial> reference_P;
  /// Grid resolution per ball; 0 selects 2048 cells (n = 1) or 256 per axis (n = 2).
  std::size_t cells = 0;
  ExtendOptions opts;

  PolynomialSpace space() const { return {static_cast<int>(x.size()), m}; }
};

/// LocalProblem with reference_P taken from the registry's analytic
/// derivatives (nullopt members when they do not exist at x).
LocalProblem make_local_problem(OrliczFunction F, TestFunction f, std::vector<double> x, int m);

std::shared_ptr<const QuadDomain> local_ball(const LocalProblem& lp, double eps);

/// P_x^eps(f), centred at x. Solver failures are rethrown as NumericError
/// naming eps.
Polynomial local_fit(const LocalProblem& lp, double eps);

/// avg_B psi^+(|f - P_x(f)|) / psi^+(eps^m).
double smoothness_ratio(const LocalProblem& lp, double eps);

struct LocalConstants {
  /// ||P||_1 / (|B| ||P||_inf) >= C1 on the unit ball.
  double C1 = 0.0;
  /// max_alpha |c_alpha| <= C ||P||_inf for P = sum c_alpha u^alpha on the unit ball.
  double C = 0.0;
  /// 5 Lambda_{psi+} Lambda_phi / C1: the local sup-norm bound.
  double K_sup = 0.0;
  /// Lambda_{psi+}^k K_sup with k = ceil(log2(1/C1)): the coefficient bound.
  double K = 0.0;
  int k = 0;
};

LocalConstants estimate_local_constants(const OrliczFunction& F, const PolynomialSpace& space, std::size_t trials,
                                        std::uint64_t seed, std::size_t cells = 0);

/// psi^+(eps^|alpha| |a_alpha| / C) |B| / (K int_B psi^+(|f|)) per alpha, for
/// the fit P centred at x.
std::vector<double> coefficient_bound_ratios(const LocalProblem& lp, double eps, const Polynomial& P,
                                             const LocalConstants& c);
std::vector<double> coefficient_bound_check(const LocalProblem& lp, double eps, const LocalConstants& c);

struct SandwichReport {
  std::size_t samples = 0;
  /// max of lower / middle and middle / upper over the samples.
  double worst_lower = 0.0;
  double worst_upper = 0.0;
  bool ok = true;
};

/// (C1/Lambda_phi) psi^+(C1 ||P||) <= avg_B psi^+(|P|) <= psi^+(||P||) for
/// `samples` seeded random P on B(x, eps).
SandwichReport sandwich_check(const LocalProblem& lp, double eps, const LocalConstants& c, std::size_t samples,
                              std::uint64_t seed);

struct SupBound {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = true;
};

/// psi^+(C1 ||P||_inf) <= K_sup avg_B psi^+(|f|).
SupBound local_sup_bound(const LocalProblem& lp, double eps, const Polynomial& P, const LocalConstants& c);

struct LocalRow {
  double eps = 0.0;
  Polynomial P;
  std::vector<double> errors;
  double max_error = 0.0;
  double rho = 0.0;
  std::vector<double> bound_ratios;
  SupBound sup_bound;
  /// psi^+(eps^|alpha| err_alpha / C) / psi^+(eps^|alpha|).
  std::vector<double> chain;
  /// psi^+(eps^|alpha|) / psi^+(eps^m).
  std::vector<double> monotone;
};

struct LocalFitTrace {
  std::vector<double> eps_schedule;
  std::vector<LocalRow> rows;
  LocalConstants constants;
  /// Least-squares slope of log(max error) against log(eps); nan when every
  /// error is zero.
  double slope = 0.0;
  double final_error = 0.0;
  bool errors_decay = false;
  /// rho shrinks by >= 1.2 per halving over the last 4 points and ends below
  /// 0.05 rho(eps_1).
  bool in_tm = false;
  bool bounds_ok = true;
};

/// 2^-1, ..., 2^-10.
std::vector<double> default_eps_schedule();

/// Fits on every eps of the schedule (at least 4 points) against
/// reference_P. Requires strictly increasing psi^+.
LocalFitTrace convergence_experiment(const LocalProblem& lp, std::span<const double> eps_schedule,
                                     const LocalConstants& constants, double error_tol = 1e-3);

struct UniquenessProbe {
  std::vector<double> ratios;
  double floor = 0.0;
};

/// avg_B psi^+(|P1 - P2|) / psi^+(eps^m) over the schedule and its minimum.
UniquenessProbe reference_uniqueness_probe(const LocalProblem& lp, const Polynomial& P1, const Polynomial& P2,
                                           std::span<const double> eps_schedule);

}  // namespace orlicz
