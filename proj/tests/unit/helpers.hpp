#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "orlicz/generator.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/sampled_function.hpp"

namespace testing_helpers {

inline std::shared_ptr<const orlicz::QuadDomain> interval(double lo = -1.0, double hi = 1.0, std::size_t cells = 4096) {
  return std::make_shared<const orlicz::QuadDomain>(orlicz::QuadDomain::interval(lo, hi, cells));
}

template <class G>
orlicz::SampledFunction sample1(std::shared_ptr<const orlicz::QuadDomain> d, G g) {
  return orlicz::sample(std::move(d), [g](std::span<const double> t) { return g(t[0]); });
}

inline orlicz::OrliczFunction square() { return orlicz::OrliczFunction(orlicz::PowerGenerator{2.0}); }

// psi(s) = s on [0, 1), 2s on [1, inf)
inline orlicz::OrliczFunction kinked() {
  return orlicz::OrliczFunction(orlicz::PiecewiseLinearGenerator{{1.0}, {1.0, 2.0}});
}

// phi for the kinked generator, written out by hand.
inline double kinked_phi(double s) { return s < 1.0 ? 0.5 * s * s : s * s - 0.5; }

// sum_i w_i g(f_i), plain loop.
template <class G>
double grid_integral(const orlicz::SampledFunction& f, G g) {
  const auto w = f.domain->weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * g(f.values[i]);
  return acc;
}

struct ScanResult {
  double c;
  double value;
};

// min over c in [lo, hi] (step h) of sum_i w_i phi(|f_i - c|).
inline ScanResult brute_force_constant(const orlicz::OrliczFunction& F, const orlicz::SampledFunction& f, double lo,
                                       double hi, double h) {
  ScanResult best{lo, INFINITY};
  const auto steps = static_cast<long>(std::ceil((hi - lo) / h));
  for (long k = 0; k <= steps; ++k) {
    const double c = lo + static_cast<double>(k) * h;
    const double v = grid_integral(f, [&](double y) { return F.phi(std::abs(y - c)); });
    if (v < best.value) best = {c, v};
  }
  return best;
}

// Root of a non-decreasing g on [lo, hi] by bisection.
template <class G>
double bisect(G g, double lo, double hi) {
  for (int i = 0; i < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace testing_helpers
