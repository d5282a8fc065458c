#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/generator.hpp"
#include "orlicz/polynomial.hpp"
#include "orlicz/sampled_function.hpp"

namespace orlicz {

/// Best approximation from Pi^m of a sampled f under the modular
/// int phi(|f - P|).
struct ApproxProblem {
  /// Throws DomainError when int phi(|f|) is not finite on the grid.
  ApproxProblem(OrliczFunction F, SampledFunction f, int degree);

  OrliczFunction F;
  SampledFunction f;
  PolynomialSpace space;

  const QuadDomain& domain() const { return *f.domain; }
};

/// int_Omega phi(|f - P|).
double objective(const ApproxProblem& prob, const Polynomial& P);

/// Right derivative at 0 of e -> int phi(|f - (P + e Q)|), assembled from the
/// one-sided limits on {f > P} and {f < P} split by the sign of Q. Points with
/// f = P contribute psi^+(0)|Q| = 0.
double one_sided_derivative(const ApproxProblem& prob, const Polynomial& P, const Polynomial& Q);

/// Layouts of the variational inequality characterising best approximants.
/// Every form is reported as LHS - RHS (<= 0 when the inequality holds).
enum class GapForm {
  /// Integrals of psi^{-/+}(|f-P|) Q with psi^- on {f>P, Q>0} and {f<P, Q<0}
  /// on the left; this is -F'_{P,Q}(0+).
  signed_direction,
  /// The signed form applied to -Q and written with |Q|.
  reflected_absolute,
  /// psi^- |Q| on {f>P, Q>0} u {f<P, Q<0} against psi^+ |Q| on
  /// {f<P, Q>0} u {f>P, Q<0}; the defining inequality of the extended
  /// operator, meaningful for f in L^{psi+}.
  absolute,
};

double inequality_gap(const OrliczFunction& F, const SampledFunction& f, const Polynomial& P, const Polynomial& Q,
                      GapForm form);

/// max(0, -min_Q F'_{P,Q}(0+)) over the test set.
double characterization_residual(const ApproxProblem& prob, const Polynomial& P, std::span<const Polynomial> tests);

/// +- each basis monomial (scaled to unit sup norm on the grid) followed by
/// `random_count` seeded random polynomials of unit grid sup norm. Centred at
/// the domain centre.
std::vector<Polynomial> certification_set(const PolynomialSpace& space, const QuadDomain& domain,
                                          std::size_t random_count, std::uint64_t seed);

/// tol * (int psi^+(|f|) + 1).
double residual_tolerance(const OrliczFunction& F, const SampledFunction& f, double tol);

struct SolveOptions {
  double tol = 1e-4;
  std::size_t max_iter = 2000;
  std::uint64_t seed = 0;
  std::size_t random_tests = 64;
  std::size_t subgradient_iters = 200;
  /// Starting polynomial; otherwise the weighted least-squares fit, shifted
  /// by a seeded random offset when seed != 0.
  std::optional<Polynomial> warm_start;
};

struct ApproxResult {
  Polynomial P;
  double objective = 0.0;
  double residual_max = 0.0;
  double residual_tolerance = 0.0;
  std::size_t iterations = 0;
  std::vector<double> trace;
};

/// The solver could not certify its iterate. Carries the last iterate and
/// the objective trace.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, ApproxResult partial)
      : NumericError(what), partial_(std::move(partial)) {}
  const ApproxResult& partial() const noexcept { return partial_; }
  const std::vector<double>& trace() const noexcept { return partial_.trace; }

 private:
  ApproxResult partial_;
};

/// Minimises the discretised modular over Pi^m.
///
/// A subgradient phase (steps s0/(1+k)^0.75, best iterate kept) is followed
/// by exact line minimisations along a regularised Newton direction, the
/// coordinate axes, and any certificate direction with a negative one-sided
/// derivative, until the objective stagnates. The result is accepted when
/// its characterization residual is within residual_tolerance(tol).
ApproxResult solve(const ApproxProblem& prob, const SolveOptions& opts = {});

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = true;
};

/// int psi^-(|P|)|P| <= 5 Lambda_{psi^-} ||P||_inf int psi^+(|f|).
BoundCheck check_solution_bound(const ApproxProblem& prob, const Polynomial& P);

/// Quadrature weight of {f > P} and {f < P}.
struct SignSetMeasures {
  double above = 0.0;
  double below = 0.0;
};
SignSetMeasures sign_set_measures(const SampledFunction& f, const Polynomial& P);

}  // namespace orlicz
