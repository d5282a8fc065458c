#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace orlicz {

// ---------------------------------------------------------------------------
// Generator specifications
//
// A generator psi is a non-decreasing function on [0, inf) with psi(0) = 0,
// psi > 0 on (0, inf) and psi -> inf. The Orlicz function is
// phi(s) = int_0^s psi(r) dr. Where psi jumps, psi^- and psi^+ (the left and
// right derivatives of phi) differ by the jump.
// ---------------------------------------------------------------------------

/// phi(s) = s^p, psi(s) = p s^(p-1). Requires p > 1.
struct PowerGenerator {
  double p = 2.0;
};

/// psi(s) = slopes[k] * s on [breakpoints[k-1], breakpoints[k]).
/// One more slope than breakpoints. Slopes must be non-decreasing so the
/// jumps psi^+(b) - psi^-(b) are non-negative.
struct PiecewiseLinearGenerator {
  std::vector<double> breakpoints;
  std::vector<double> slopes;
};

struct PowerSegment {
  double coefficient = 1.0;
  double exponent = 1.0;
};

/// psi(s) = c_k s^(q_k) on segment k.
struct PiecewisePowerGenerator {
  std::vector<double> breakpoints;
  std::vector<PowerSegment> segments;
};

enum class Interpolation { linear };

/// Sampled monotone psi. `s` must start at 0 with psi = 0 and be
/// non-decreasing; a repeated abscissa encodes a jump (first value is the
/// left limit, last is the right value).
struct TableGenerator {
  std::vector<double> s;
  std::vector<double> psi;
  Interpolation rule = Interpolation::linear;
};

using GeneratorSpec =
    std::variant<PowerGenerator, PiecewiseLinearGenerator, PiecewisePowerGenerator, TableGenerator>;

std::string kind_name(const GeneratorSpec& spec);

enum class Side { left, right };

/// Which of phi, psi^-, psi^+ an estimate refers to.
enum class Quantity { phi, psi_minus, psi_plus };

std::string to_string(Quantity q);

struct DeclaredConstants {
  std::optional<double> lambda_phi;
  std::optional<double> lambda_psi_minus;
  std::optional<double> lambda_psi_plus;
};

// ---------------------------------------------------------------------------
// OrliczFunction
// ---------------------------------------------------------------------------

/// Immutable pair (phi, psi^-/psi^+) with its Delta_2 constants.
///
/// Construction validates the generator (class S membership on the check
/// grid) and either estimates the Delta_2 constants or verifies the declared
/// ones against the estimate.
class OrliczFunction {
 public:
  explicit OrliczFunction(GeneratorSpec spec, DeclaredConstants declared = {});

  double phi(double s) const;
  double psi(double s, Side side) const;
  double psi_minus(double s) const { return psi(s, Side::left); }
  double psi_plus(double s) const { return psi(s, Side::right); }

  /// Right derivative of psi^+ (curvature of phi); used only to shape
  /// Newton directions, never in a certificate.
  double psi_slope(double s) const;

  double evaluate(Quantity q, double s) const;

  double lambda(Quantity q) const;
  double lambda_phi() const { return lambda(Quantity::phi); }
  double lambda_psi_minus() const { return lambda(Quantity::psi_minus); }
  double lambda_psi_plus() const { return lambda(Quantity::psi_plus); }

  /// Largest s accepted by the evaluators.
  double range_max() const noexcept { return range_max_; }

  /// True when psi^+ is strictly increasing (uniqueness regime).
  bool strictly_increasing() const noexcept { return strictly_increasing_; }

  /// Exponent q with phi(s) ~ s^q as s -> inf, when known in closed form.
  std::optional<double> growth_exponent() const;

  /// Points where psi jumps.
  std::vector<double> breakpoints() const;

  const GeneratorSpec& spec() const noexcept { return spec_; }

  /// Default grid for structural checks: 513 log-spaced points on
  /// [1e-6, 1e6] (analytic kinds) or up to half the last table abscissa.
  std::vector<double> default_check_grid() const;

 private:
  struct Segment {
    double lo;
    double coefficient;
    double exponent;
    double phi_at_lo;
  };

  void build_segments();
  void build_table();
  std::size_t segment_right(double s) const;
  std::size_t segment_left(double s) const;
  void check_argument(double s) const;

  GeneratorSpec spec_;
  std::vector<Segment> segments_;      // power / piecewise kinds
  std::vector<double> table_phi_;      // cumulative trapezoid at table nodes
  double range_max_ = 1e9;
  double lambda_[3] = {0.0, 0.0, 0.0};
  bool strictly_increasing_ = false;
};

// ---------------------------------------------------------------------------
// Free-function operations
// ---------------------------------------------------------------------------

double eval_phi(const OrliczFunction& F, double s);
double eval_psi_sided(const OrliczFunction& F, double s, Side side);

/// n log-spaced points on [lo, hi] (inclusive).
std::vector<double> log_grid(double lo, double hi, std::size_t n);

/// max over the grid of g(2s)/g(s) for g in {phi, psi^-, psi^+}. The grid must
/// span at least four decades; g(s) = 0 on the grid is a domain error.
double estimate_delta2(const OrliczFunction& F, Quantity which, std::span<const double> s_grid);

struct RatioBounds {
  double g1;
  double g2;
};

/// Empirical (inf, sup) of psi^+(eta x)/psi^+(x) over x_grid.
RatioBounds ratio_bounds(const OrliczFunction& F, double eta, std::span<const double> x_grid);

/// One structural inequality evaluated over a grid. `max_violation` is the
/// largest relative excess lhs - rhs (<= 0 means the inequality holds with
/// margin).
struct InequalityCheck {
  std::string name;
  double max_violation = 0.0;
  double tolerance = 0.0;
  std::size_t evaluations = 0;
  bool ok = true;
};

struct StructuralReport {
  std::vector<InequalityCheck> checks;
  bool ok() const;
};

/// Runs the five structural inequalities (sandwich of phi by s psi^+, the
/// monotone ordering of one-sided derivatives, psi^- <= psi^+ <= Lambda psi^-,
/// and the two-sided additivity bound on psi^+) plus the left <= right
/// property of one-sided derivatives.
///
/// tolerance: relative; defaults to 1e-9 for analytic kinds and 1e-7 for
/// tables.
StructuralReport verify_structure(const OrliczFunction& F, std::span<const double> grid,
                                  std::optional<double> tolerance = std::nullopt);

/// The built-in generators exercised by verify-core.
std::vector<std::pair<std::string, GeneratorSpec>> builtin_generators();

}  // namespace orlicz
