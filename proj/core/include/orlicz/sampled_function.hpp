#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "orlicz/quadrature.hpp"

namespace orlicz {

enum class Provenance { closed_form, table };

/// Values of a function at the quadrature points of a domain.
struct SampledFunction {
  std::shared_ptr<const QuadDomain> domain;
  std::vector<double> values;
  Provenance provenance = Provenance::table;
  /// Registry id (closed form) or file name (table).
  std::string source;

  std::size_t size() const noexcept { return values.size(); }
  double max_abs() const;
};

using PointFunction = std::function<double(std::span<const double>)>;

/// Samples f at every quadrature point. Non-finite values (a singularity hit
/// by a point) are a NumericError.
SampledFunction sample(std::shared_ptr<const QuadDomain> domain, const PointFunction& f, std::string source = {});

/// Pointwise a + b on the same domain.
SampledFunction add(const SampledFunction& a, const SampledFunction& b);
SampledFunction scaled(const SampledFunction& a, double c);

/// Reads rows "coord_1[,coord_2],value" (optional header) whose coordinates
/// match the domain's points in order, within 1e-9 relative.
SampledFunction read_sampled_csv(std::istream& in, std::shared_ptr<const QuadDomain> domain,
                                 std::string source = {});
void write_sampled_csv(std::ostream& out, const SampledFunction& f);

}  // namespace orlicz
