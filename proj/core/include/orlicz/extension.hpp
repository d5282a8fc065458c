#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/generator.hpp"
#include "orlicz/polynomial.hpp"
#include "orlicz/sampled_function.hpp"
#include "orlicz/solver.hpp"

namespace orlicz {

/// Clamp of f to [-level, level].
SampledFunction truncate(const SampledFunction& f, double level);

/// int_Omega psi^+(|f|); infinite sums are reported as a DomainError naming
/// the L^{psi+} membership failure.
double psi_plus_modular(const OrliczFunction& F, const SampledFunction& f);

/// max(0, max_Q LHS - RHS) of the extended inequality over the test set.
/// Throws DomainError when f is not in L^{psi+} on the grid.
double extended_residual(const OrliczFunction& F, const SampledFunction& f, const Polynomial& P,
                         std::span<const Polynomial> tests);

/// 2, 4, ..., 2^14.
std::vector<double> default_levels();

struct ExtendOptions {
  std::vector<double> levels = default_levels();
  double cauchy_tol = 1e-5;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  std::size_t random_tests = 64;
  std::size_t max_iter = 2000;
};

struct LevelRecord {
  double level = 0.0;
  Polynomial P;
  /// max |coefficient difference| to the previous level (0 for the first).
  double coeff_delta = 0.0;
  double sup_norm = 0.0;
  double extended_residual = 0.0;
  std::size_t iterations = 0;
  /// The truncation equals the previous one, so its solution was reused.
  bool reused = false;
};

struct ExtensionRun {
  std::vector<LevelRecord> levels;
  /// First level from which every later coeff_delta is within cauchy_tol.
  std::optional<double> cauchy_level;
  Polynomial final_P;
  double extended_residual = 0.0;
  double residual_tolerance = 0.0;
  BoundCheck bound;
  bool accepted = false;
  std::string failure;
};

/// Raised by extend when the run is not accepted; carries the per-level trace.
class ExtensionError : public NumericError {
 public:
  ExtensionError(const std::string& what, ExtensionRun run) : NumericError(what), run_(std::move(run)) {}
  const ExtensionRun& run() const noexcept { return run_; }

 private:
  ExtensionRun run_;
};

/// Extended best approximation by truncation: solves on each clamp f_n,
/// warm-starting from the previous level, and accepts the last P_n when the
/// sequence is Cauchy at the end of the schedule, satisfies the extended
/// inequality for the untruncated f, and the norms ||P_n|| do not grow at
/// every level.
ExtensionRun extend(const OrliczFunction& F, const SampledFunction& f, int degree, const ExtendOptions& opts = {});

/// int phi(|P|) <= 5 Lambda_{psi^+} ||P||_inf int psi^+(|f|).
BoundCheck check_extension_bound(const OrliczFunction& F, const SampledFunction& f, const Polynomial& P);

struct Perturbation {
  double n = 0.0;
  SampledFunction h;
};

struct ContinuityRow {
  double n = 0.0;
  /// int psi^+(|h_n - h|).
  double psi_distance = 0.0;
  /// Grid sup norm of mu(h_n) - mu(h).
  double poly_distance = 0.0;
};

/// Extended approximations of each h_n compared with that of h. Requires
/// |h|, |h_n| <= H pointwise and strictly increasing psi^+.
std::vector<ContinuityRow> continuity_probe(const OrliczFunction& F, const SampledFunction& h,
                                            std::span<const Perturbation> perturbations, const SampledFunction& H,
                                            int degree, const ExtendOptions& opts = {});

/// True when every value is at most (1 + noise) times its predecessor.
bool decreasing_up_to_noise(std::span<const double> values, double noise = 0.1);

}  // namespace orlicz
