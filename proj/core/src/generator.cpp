#include "orlicz/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "orlicz/errors.hpp"

namespace orlicz {

namespace {

// pow with the cheap exponents of the built-in generators special-cased.
double power(double s, double e) {
  if (e == 1.0) return s;
  if (e == 2.0) return s * s;
  if (e == 0.0) return 1.0;
  if (e == 3.0) return s * s * s;
  if (e == 0.5) return std::sqrt(s);
  return std::pow(s, e);
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kAnalyticRangeMax = 1e9;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require_ascending_positive(const std::vector<double>& bps) {
  for (std::size_t i = 0; i < bps.size(); ++i) {
    if (!(bps[i] > 0.0) || !std::isfinite(bps[i])) {
      throw DomainError("breakpoints must be positive and finite");
    }
    if (i > 0 && !(bps[i] > bps[i - 1])) {
      throw DomainError("breakpoints must be strictly ascending");
    }
  }
}

double relative_excess(double lhs, double rhs) {
  const double scale = std::max({std::abs(lhs), std::abs(rhs), std::numeric_limits<double>::min()});
  return (lhs - rhs) / scale;
}

}  // namespace

std::string kind_name(const GeneratorSpec& spec) {
  return std::visit(overloaded{
                        [](const PowerGenerator&) { return std::string("power"); },
                        [](const PiecewiseLinearGenerator&) { return std::string("piecewise_linear"); },
                        [](const PiecewisePowerGenerator&) { return std::string("piecewise_power"); },
                        [](const TableGenerator&) { return std::string("table"); },
                    },
                    spec);
}

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::phi:
      return "phi";
    case Quantity::psi_minus:
      return "psi_minus";
    case Quantity::psi_plus:
      return "psi_plus";
  }
  return "?";
}

OrliczFunction::OrliczFunction(GeneratorSpec spec, DeclaredConstants declared) : spec_(std::move(spec)) {
  if (std::holds_alternative<TableGenerator>(spec_)) {
    build_table();
  } else {
    build_segments();
  }

  // Delta_2 constants: the check grid plus points hugging each jump, where
  // the ratio suprema of kinked generators are attained.
  std::vector<double> grid = default_check_grid();
  const double lo = grid.front();
  const double hi = grid.back();
  for (double b : breakpoints()) {
    for (double p : {b, b / 2.0}) {
      for (double q : {p, p * (1.0 - 1e-9), p * (1.0 + 1e-9)}) {
        if (q >= lo && q <= hi) grid.push_back(q);
      }
    }
  }
  std::sort(grid.begin(), grid.end());

  const std::optional<double> declared_values[3] = {declared.lambda_phi, declared.lambda_psi_minus,
                                                    declared.lambda_psi_plus};
  for (int i = 0; i < 3; ++i) {
    const auto q = static_cast<Quantity>(i);
    const double estimate = estimate_delta2(*this, q, grid);
    if (declared_values[i]) {
      const double d = *declared_values[i];
      if (!(d > 0.0) || d < estimate * (1.0 - 1e-9)) {
        throw DomainError("declared Delta_2 constant for " + to_string(q) + " (" + fmt(d) +
                          ") is below the grid estimate " + fmt(estimate));
      }
      lambda_[i] = d;
    } else {
      lambda_[i] = estimate;
    }
  }
}

void OrliczFunction::build_segments() {
  range_max_ = kAnalyticRangeMax;
  std::vector<double> bps;
  std::vector<PowerSegment> segs;

  std::visit(overloaded{
                 [&](const PowerGenerator& g) {
                   if (!(g.p > 1.0) || !std::isfinite(g.p)) throw DomainError("power generator needs p > 1");
                   segs.push_back({g.p, g.p - 1.0});
                 },
                 [&](const PiecewiseLinearGenerator& g) {
                   require_ascending_positive(g.breakpoints);
                   if (g.slopes.size() != g.breakpoints.size() + 1) {
                     throw DomainError("piecewise_linear needs one more slope than breakpoints");
                   }
                   for (std::size_t k = 0; k < g.slopes.size(); ++k) {
                     if (!(g.slopes[k] > 0.0) || !std::isfinite(g.slopes[k])) {
                       throw DomainError("piecewise_linear slopes must be positive");
                     }
                     if (k > 0 && g.slopes[k] < g.slopes[k - 1]) {
                       throw DomainError("piecewise_linear slopes must be non-decreasing (psi monotone)");
                     }
                     segs.push_back({g.slopes[k], 1.0});
                   }
                   bps = g.breakpoints;
                 },
                 [&](const PiecewisePowerGenerator& g) {
                   require_ascending_positive(g.breakpoints);
                   if (g.segments.size() != g.breakpoints.size() + 1) {
                     throw DomainError("piecewise_power needs one more segment than breakpoints");
                   }
                   for (std::size_t k = 0; k < g.segments.size(); ++k) {
                     const auto& s = g.segments[k];
                     if (!(s.coefficient > 0.0) || !std::isfinite(s.coefficient)) {
                       throw DomainError("piecewise_power coefficients must be positive");
                     }
                     const bool edge = (k == 0 || k + 1 == g.segments.size());
                     if (!std::isfinite(s.exponent) || s.exponent < 0.0 || (edge && !(s.exponent > 0.0))) {
                       throw DomainError(
                           "piecewise_power exponents must be >= 0, and > 0 on the first and last segment");
                     }
                   }
                   for (std::size_t k = 0; k < g.breakpoints.size(); ++k) {
                     const double b = g.breakpoints[k];
                     const double left = g.segments[k].coefficient * std::pow(b, g.segments[k].exponent);
                     const double right = g.segments[k + 1].coefficient * std::pow(b, g.segments[k + 1].exponent);
                     if (right < left * (1.0 - 1e-12)) {
                       throw DomainError("piecewise_power psi decreases at breakpoint " + fmt(b));
                     }
                   }
                   segs = g.segments;
                   bps = g.breakpoints;
                 },
                 [](const TableGenerator&) {},
             },
             spec_);

  segments_.clear();
  double phi_acc = 0.0;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const double lo = (k == 0) ? 0.0 : bps[k - 1];
    if (k > 0) {
      const auto& prev = segments_.back();
      const double q1 = prev.exponent + 1.0;
      phi_acc = prev.phi_at_lo + prev.coefficient / q1 * (std::pow(lo, q1) - std::pow(prev.lo, q1));
    }
    segments_.push_back({lo, segs[k].coefficient, segs[k].exponent, phi_acc});
  }

  strictly_increasing_ = std::all_of(segments_.begin(), segments_.end(),
                                     [](const Segment& s) { return s.exponent > 0.0; });
}

void OrliczFunction::build_table() {
  const auto& t = std::get<TableGenerator>(spec_);
  if (t.s.size() != t.psi.size() || t.s.size() < 2) {
    throw DomainError("table generator needs matching s/psi columns with at least two rows");
  }
  if (t.s.front() != 0.0 || t.psi.front() != 0.0) {
    throw DomainError("table generator must start at s = 0 with psi = 0");
  }
  for (std::size_t i = 1; i < t.s.size(); ++i) {
    if (!std::isfinite(t.s[i]) || !std::isfinite(t.psi[i])) throw DomainError("table entries must be finite");
    if (t.s[i] < t.s[i - 1]) throw DomainError("table abscissae must be non-decreasing");
    if (t.psi[i] < t.psi[i - 1]) throw DomainError("table psi must be non-decreasing");
    if (t.s[i] > 0.0 && !(t.psi[i] > 0.0)) throw DomainError("table psi must be positive for s > 0");
    if (i >= 2 && t.s[i] == t.s[i - 1] && t.s[i - 1] == t.s[i - 2]) {
      throw DomainError("table jump encodes at most two rows per abscissa");
    }
  }
  if (t.s[1] == 0.0) throw DomainError("table generator cannot jump at s = 0");
  range_max_ = t.s.back();

  table_phi_.assign(t.s.size(), 0.0);
  for (std::size_t i = 1; i < t.s.size(); ++i) {
    table_phi_[i] = table_phi_[i - 1] + 0.5 * (t.s[i] - t.s[i - 1]) * (t.psi[i] + t.psi[i - 1]);
  }

  strictly_increasing_ = true;
  for (std::size_t i = 1; i < t.s.size(); ++i) {
    if (t.s[i] > t.s[i - 1] && !(t.psi[i] > t.psi[i - 1])) strictly_increasing_ = false;
  }
}

void OrliczFunction::check_argument(double s) const {
  if (std::isnan(s) || s < 0.0) throw DomainError("Orlicz function evaluated at negative s = " + fmt(s));
  if (s > range_max_) {
    throw RangeError("s = " + fmt(s) + " beyond the evaluation range [0, " + fmt(range_max_) + "]");
  }
}

std::size_t OrliczFunction::segment_right(double s) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), s,
                             [](double v, const Segment& seg) { return v < seg.lo; });
  return static_cast<std::size_t>(std::distance(segments_.begin(), it)) - 1;
}

std::size_t OrliczFunction::segment_left(double s) const {
  auto it = std::lower_bound(segments_.begin(), segments_.end(), s,
                             [](const Segment& seg, double v) { return seg.lo < v; });
  const auto idx = static_cast<std::size_t>(std::distance(segments_.begin(), it));
  return idx == 0 ? 0 : idx - 1;
}

double OrliczFunction::phi(double s) const {
  check_argument(s);
  if (s == 0.0) return 0.0;
  if (const auto* t = std::get_if<TableGenerator>(&spec_)) {
    auto it = std::upper_bound(t->s.begin(), t->s.end(), s);
    const auto i = static_cast<std::size_t>(std::distance(t->s.begin(), it)) - 1;
    return table_phi_[i] + 0.5 * (s - t->s[i]) * (t->psi[i] + psi(s, Side::right));
  }
  if (const auto* g = std::get_if<PowerGenerator>(&spec_)) return power(s, g->p);
  const auto& seg = segments_[segment_right(s)];
  const double q1 = seg.exponent + 1.0;
  return seg.phi_at_lo + seg.coefficient / q1 * (power(s, q1) - power(seg.lo, q1));
}

double OrliczFunction::psi(double s, Side side) const {
  check_argument(s);
  if (s == 0.0) return 0.0;
  if (const auto* t = std::get_if<TableGenerator>(&spec_)) {
    const auto& xs = t->s;
    const auto& ys = t->psi;
    if (side == Side::right) {
      auto it = std::upper_bound(xs.begin(), xs.end(), s);
      const auto i = static_cast<std::size_t>(std::distance(xs.begin(), it)) - 1;
      if (xs[i] == s || i + 1 == xs.size()) return ys[i];
      const double w = (s - xs[i]) / (xs[i + 1] - xs[i]);
      return ys[i] + w * (ys[i + 1] - ys[i]);
    }
    auto it = std::lower_bound(xs.begin(), xs.end(), s);
    const auto i = static_cast<std::size_t>(std::distance(xs.begin(), it));
    if (xs[i] == s) return ys[i];
    const double w = (s - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + w * (ys[i] - ys[i - 1]);
  }
  const auto& seg = segments_[side == Side::right ? segment_right(s) : segment_left(s)];
  return seg.coefficient * power(s, seg.exponent);
}

double OrliczFunction::psi_slope(double s) const {
  check_argument(s);
  if (const auto* t = std::get_if<TableGenerator>(&spec_)) {
    const auto& xs = t->s;
    const auto& ys = t->psi;
    auto it = std::upper_bound(xs.begin(), xs.end(), s);
    auto i = static_cast<std::size_t>(std::distance(xs.begin(), it)) - 1;
    if (i + 1 >= xs.size()) i = xs.size() - 2;
    const double dx = xs[i + 1] - xs[i];
    return dx > 0.0 ? (ys[i + 1] - ys[i]) / dx : 0.0;
  }
  const auto& seg = segments_[segment_right(s)];
  if (seg.exponent == 0.0) return 0.0;
  return seg.coefficient * seg.exponent * power(s, seg.exponent - 1.0);
}

double OrliczFunction::evaluate(Quantity q, double s) const {
  switch (q) {
    case Quantity::phi:
      return phi(s);
    case Quantity::psi_minus:
      return psi(s, Side::left);
    case Quantity::psi_plus:
      return psi(s, Side::right);
  }
  return 0.0;
}

double OrliczFunction::lambda(Quantity q) const { return lambda_[static_cast<int>(q)]; }

std::optional<double> OrliczFunction::growth_exponent() const {
  if (std::holds_alternative<TableGenerator>(spec_)) return std::nullopt;
  return segments_.back().exponent + 1.0;
}

std::vector<double> OrliczFunction::breakpoints() const {
  std::vector<double> out;
  if (const auto* t = std::get_if<TableGenerator>(&spec_)) {
    for (std::size_t i = 1; i < t->s.size(); ++i) {
      if (t->s[i] == t->s[i - 1]) out.push_back(t->s[i]);
    }
    return out;
  }
  for (std::size_t k = 1; k < segments_.size(); ++k) out.push_back(segments_[k].lo);
  return out;
}

std::vector<double> OrliczFunction::default_check_grid() const {
  if (const auto* t = std::get_if<TableGenerator>(&spec_)) {
    const double hi = t->s.back() / 2.0;
    auto first_positive = std::upper_bound(t->s.begin(), t->s.end(), 0.0);
    const double lo = std::min(*first_positive, hi) * 1e-3;
    return log_grid(lo, hi, 513);
  }
  return log_grid(1e-6, 1e6, 513);
}

double eval_phi(const OrliczFunction& F, double s) { return F.phi(s); }

double eval_psi_sided(const OrliczFunction& F, double s, Side side) { return F.psi(s, side); }

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo) || n == 0) throw DomainError("log_grid needs 0 < lo <= hi and n > 0");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

double estimate_delta2(const OrliczFunction& F, Quantity which, std::span<const double> s_grid) {
  if (s_grid.empty()) throw DomainError("estimate_delta2: empty grid");
  const auto [mn, mx] = std::minmax_element(s_grid.begin(), s_grid.end());
  if (!(*mn > 0.0)) throw DomainError("estimate_delta2: grid must be positive");
  if (*mx / *mn < 1e4 * (1.0 - 1e-12)) throw DomainError("estimate_delta2: grid must span at least four decades");
  double best = 0.0;
  for (double s : s_grid) {
    const double g = F.evaluate(which, s);
    if (!(g > 0.0)) throw DomainError("estimate_delta2: " + to_string(which) + " vanishes at s = " + fmt(s));
    best = std::max(best, F.evaluate(which, 2.0 * s) / g);
  }
  return best;
}

RatioBounds ratio_bounds(const OrliczFunction& F, double eta, std::span<const double> x_grid) {
  if (!(eta > 0.0)) throw DomainError("ratio_bounds: eta must be positive");
  if (x_grid.empty()) throw DomainError("ratio_bounds: empty grid");
  RatioBounds r{std::numeric_limits<double>::infinity(), 0.0};
  for (double x : x_grid) {
    if (!(x > 0.0)) throw DomainError("ratio_bounds: grid must be positive");
    const double v = F.psi_plus(eta * x) / F.psi_plus(x);
    r.g1 = std::min(r.g1, v);
    r.g2 = std::max(r.g2, v);
  }
  return r;
}

bool StructuralReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const InequalityCheck& c) { return c.ok; });
}

StructuralReport verify_structure(const OrliczFunction& F, std::span<const double> grid,
                                  std::optional<double> tolerance) {
  const double tol =
      tolerance.value_or(std::holds_alternative<TableGenerator>(F.spec()) ? 1e-7 : 1e-9);
  StructuralReport report;

  auto make = [&](std::string name) {
    InequalityCheck c;
    c.name = std::move(name);
    c.max_violation = -std::numeric_limits<double>::infinity();
    c.tolerance = tol;
    return c;
  };
  auto record = [](InequalityCheck& c, double lhs, double rhs) {
    c.max_violation = std::max(c.max_violation, relative_excess(lhs, rhs));
    ++c.evaluations;
  };

  const std::size_t n = grid.size();
  std::vector<double> pm(n), pp(n);
  for (std::size_t i = 0; i < n; ++i) {
    pm[i] = F.psi_minus(grid[i]);
    pp[i] = F.psi_plus(grid[i]);
  }

  // (s/2) psi(s/2) <= phi(s) <= s psi(s) <= phi(2s), for psi^+ and psi^-.
  for (Side side : {Side::right, Side::left}) {
    auto c = make(side == Side::right ? "phi_sandwich_right" : "phi_sandwich_left");
    for (double s : grid) {
      const double ph = F.phi(s);
      record(c, 0.5 * s * F.psi(0.5 * s, side), ph);
      record(c, ph, s * F.psi(s, side));
      record(c, s * F.psi(s, side), F.phi(2.0 * s));
    }
    report.checks.push_back(c);
  }

  // psi^+(s) <= psi^-(r) for s < r.
  {
    auto c = make("one_sided_ordering");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (grid[i] < grid[j]) record(c, pp[i], pm[j]);
      }
    }
    report.checks.push_back(c);
  }

  // psi^- <= psi^+ <= Lambda_{psi^-} psi^-.
  {
    auto c = make("left_right_sandwich");
    const double lam = F.lambda_psi_minus();
    for (std::size_t i = 0; i < n; ++i) {
      record(c, pm[i], pp[i]);
      record(c, pp[i], lam * pm[i]);
    }
    report.checks.push_back(c);
  }

  // (psi(s)+psi(r))/2 <= psi(s+r) <= Lambda_{psi^+} (psi(s)+psi(r)).
  {
    auto c = make("additivity");
    const double lam = F.lambda_psi_plus();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double sum = pp[i] + pp[j];
        const double joint = F.psi_plus(grid[i] + grid[j]);
        record(c, 0.5 * sum, joint);
        record(c, joint, lam * sum);
      }
    }
    report.checks.push_back(c);
  }

  for (auto& c : report.checks) c.ok = c.max_violation <= c.tolerance;
  return report;
}

std::vector<std::pair<std::string, GeneratorSpec>> builtin_generators() {
  return {
      {"power_1.5", PowerGenerator{1.5}},
      {"power_2", PowerGenerator{2.0}},
      {"power_3", PowerGenerator{3.0}},
      {"kinked_linear", PiecewiseLinearGenerator{{1.0}, {1.0, 2.0}}},
      {"kinked_power", PiecewisePowerGenerator{{1.0}, {{1.0, 1.0}, {2.0, 2.0}}}},
  };
}

}  // namespace orlicz
