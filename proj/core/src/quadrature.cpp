#include "orlicz/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "orlicz/errors.hpp"

namespace orlicz {

namespace {

void require_dim(std::size_t d) {
  if (d != 1 && d != 2) throw DomainError("only 1-D and 2-D domains are supported");
}

}  // namespace

QuadDomain QuadDomain::box(std::vector<double> lo, std::vector<double> hi, std::vector<std::size_t> cells) {
  require_dim(lo.size());
  if (hi.size() != lo.size()) throw DomainError("box: lo/hi dimension mismatch");
  if (cells.size() == 1 && lo.size() == 2) cells.push_back(cells[0]);
  if (cells.size() != lo.size()) throw DomainError("box: cells dimension mismatch");
  double volume = 1.0;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (!std::isfinite(lo[k]) || !std::isfinite(hi[k]) || !(hi[k] > lo[k])) {
      throw DomainError("box: degenerate side (need lo < hi)");
    }
    if (cells[k] == 0) throw DomainError("box: zero cells");
    volume *= hi[k] - lo[k];
  }

  QuadDomain d;
  d.dim_ = static_cast<int>(lo.size());
  d.shape_ = Shape::box;
  d.lo_ = lo;
  d.hi_ = hi;
  d.cells_ = cells;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    d.center_.push_back(0.5 * (lo[k] + hi[k]));
    d.half_widths_.push_back(0.5 * (hi[k] - lo[k]));
  }

  std::vector<double> h(lo.size());
  double cell_volume = 1.0;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    h[k] = (hi[k] - lo[k]) / static_cast<double>(cells[k]);
    cell_volume *= h[k];
  }
  if (d.dim_ == 1) {
    d.points_.reserve(cells[0]);
    for (std::size_t i = 0; i < cells[0]; ++i) {
      d.points_.push_back(lo[0] + (static_cast<double>(i) + 0.5) * h[0]);
    }
  } else {
    d.points_.reserve(2 * cells[0] * cells[1]);
    for (std::size_t i = 0; i < cells[0]; ++i) {
      for (std::size_t j = 0; j < cells[1]; ++j) {
        d.points_.push_back(lo[0] + (static_cast<double>(i) + 0.5) * h[0]);
        d.points_.push_back(lo[1] + (static_cast<double>(j) + 0.5) * h[1]);
      }
    }
  }
  d.weights_.assign(d.points_.size() / lo.size(), cell_volume);
  d.measure_ = volume;
  d.analytic_measure_ = volume;
  return d;
}

QuadDomain QuadDomain::interval(double lo, double hi, std::size_t cells) { return box({lo}, {hi}, {cells}); }

QuadDomain QuadDomain::ball(std::vector<double> center, double radius, std::size_t cells_per_axis) {
  require_dim(center.size());
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("ball: radius must be positive");
  if (cells_per_axis == 0) throw DomainError("ball: zero cells");
  if (center.size() == 1) {
    QuadDomain d = box({center[0] - radius}, {center[0] + radius}, {cells_per_axis});
    d.shape_ = Shape::ball;
    d.center_ = center;
    d.half_widths_ = {radius};
    d.measure_ = 2.0 * radius;
    d.analytic_measure_ = 2.0 * radius;
    return d;
  }

  QuadDomain d;
  d.dim_ = 2;
  d.shape_ = Shape::ball;
  d.center_ = center;
  d.half_widths_ = {radius, radius};
  d.lo_ = {center[0] - radius, center[1] - radius};
  d.hi_ = {center[0] + radius, center[1] + radius};
  d.cells_ = {cells_per_axis, cells_per_axis};
  const double h = 2.0 * radius / static_cast<double>(cells_per_axis);
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < cells_per_axis; ++i) {
    const double u = -radius + (static_cast<double>(i) + 0.5) * h;
    for (std::size_t j = 0; j < cells_per_axis; ++j) {
      const double v = -radius + (static_cast<double>(j) + 0.5) * h;
      if (u * u + v * v < r2) {
        d.points_.push_back(center[0] + u);
        d.points_.push_back(center[1] + v);
      }
    }
  }
  if (d.points_.empty()) throw DomainError("ball: resolution too coarse, no cell centre inside");
  d.weights_.assign(d.points_.size() / 2, h * h);
  d.measure_ = h * h * static_cast<double>(d.weights_.size());
  d.analytic_measure_ = std::numbers::pi * r2;
  return d;
}

bool QuadDomain::contains(std::span<const double> t) const {
  if (t.size() != static_cast<std::size_t>(dim_)) return false;
  if (shape_ == Shape::box || dim_ == 1) {
    for (int k = 0; k < dim_; ++k) {
      if (t[k] < lo_[k] || t[k] > hi_[k]) return false;
    }
    return true;
  }
  const double du = t[0] - center_[0];
  const double dv = t[1] - center_[1];
  return du * du + dv * dv <= half_widths_[0] * half_widths_[0];
}

namespace {

[[noreturn]] void non_finite(const QuadDomain& domain, std::size_t i, double v) {
  std::ostringstream os;
  os.precision(17);
  os << "non-finite integrand value " << v << " at point " << i << " (";
  const auto p = domain.point(i);
  for (std::size_t k = 0; k < p.size(); ++k) os << (k ? ", " : "") << p[k];
  os << ")";
  throw NumericError(os.str());
}

}  // namespace

double integrate(const QuadDomain& domain, std::span<const double> integrand) {
  if (integrand.size() != domain.size()) throw DomainError("integrate: integrand length does not match the grid");
  const auto w = domain.weights();
  CompensatedSum sum;
  for (std::size_t i = 0; i < integrand.size(); ++i) {
    if (!std::isfinite(integrand[i])) non_finite(domain, i, integrand[i]);
    sum.add(w[i] * integrand[i]);
  }
  return sum.value();
}

double region_integrate(const QuadDomain& domain, std::span<const std::uint8_t> mask,
                        std::span<const double> integrand) {
  if (integrand.size() != domain.size() || mask.size() != domain.size()) {
    throw DomainError("region_integrate: mask/integrand length does not match the grid");
  }
  const auto w = domain.weights();
  CompensatedSum sum;
  for (std::size_t i = 0; i < integrand.size(); ++i) {
    if (!std::isfinite(integrand[i])) non_finite(domain, i, integrand[i]);
    if (mask[i]) sum.add(w[i] * integrand[i]);
  }
  return sum.value();
}

}  // namespace orlicz
