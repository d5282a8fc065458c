#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>
#include <cmath>

namespace orlicz {

enum class Shape { box, ball };

/// Uniform midpoint-rule grid over a box or a ball in R^1 or R^2.
///
/// Box grids are tensor products of equal cells. Ball grids overlay the
/// bounding box with equal cells and keep those whose centre lies strictly
/// inside the ball; every kept cell carries its full volume. In 1-D a ball is
/// the interval [c - r, c + r] and the grid is exact.
class QuadDomain {
 public:
  static QuadDomain box(std::vector<double> lo, std::vector<double> hi, std::vector<std::size_t> cells);
  static QuadDomain interval(double lo, double hi, std::size_t cells);
  static QuadDomain ball(std::vector<double> center, double radius, std::size_t cells_per_axis);

  int dim() const noexcept { return dim_; }
  Shape shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return weights_.size(); }

  std::span<const double> point(std::size_t i) const {
    return {points_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::span<const double> points() const noexcept { return points_; }
  std::span<const double> weights() const noexcept { return weights_; }

  /// Sum of the weights.
  double measure() const noexcept { return measure_; }
  /// Exact volume of the shape (box volume, pi r^2, 2r).
  double analytic_measure() const noexcept { return analytic_measure_; }

  /// Box midpoint or ball centre.
  const std::vector<double>& center() const noexcept { return center_; }
  /// Box half side lengths, or the radius on every axis.
  const std::vector<double>& half_widths() const noexcept { return half_widths_; }
  /// Cell count per axis of the underlying tensor grid.
  const std::vector<std::size_t>& cells() const noexcept { return cells_; }

  bool contains(std::span<const double> t) const;

 private:
  QuadDomain() = default;

  int dim_ = 1;
  Shape shape_ = Shape::box;
  std::vector<double> points_;
  std::vector<double> weights_;
  double measure_ = 0.0;
  double analytic_measure_ = 0.0;
  std::vector<double> center_;
  std::vector<double> half_widths_;
  std::vector<double> lo_, hi_;
  std::vector<std::size_t> cells_;
};

/// Per-point inclusion flags aligned with a domain's points.
using Mask = std::vector<std::uint8_t>;

/// sum_i w_i g_i with a compensated, fixed-order summation. Throws
/// NumericError naming the first non-finite entry.
double integrate(const QuadDomain& domain, std::span<const double> integrand);

/// Same as integrate, restricted to the points where mask is non-zero.
double region_integrate(const QuadDomain& domain, std::span<const std::uint8_t> mask,
                        std::span<const double> integrand);

/// Neumaier-compensated accumulator; the summation order is the call order.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace orlicz
