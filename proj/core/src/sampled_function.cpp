#include "orlicz/sampled_function.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "orlicz/csv.hpp"
#include "orlicz/errors.hpp"

namespace orlicz {

double SampledFunction::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

SampledFunction sample(std::shared_ptr<const QuadDomain> domain, const PointFunction& f, std::string source) {
  if (!domain) throw DomainError("sample: null domain");
  SampledFunction out;
  out.values.resize(domain->size());
  for (std::size_t i = 0; i < domain->size(); ++i) {
    const double v = f(domain->point(i));
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "sampled function is not finite at point " << i << " (" << domain->point(i)[0]
         << (domain->dim() == 2 ? ", " + std::to_string(domain->point(i)[1]) : std::string()) << ")";
      throw NumericError(os.str());
    }
    out.values[i] = v;
  }
  out.domain = std::move(domain);
  out.provenance = Provenance::closed_form;
  out.source = std::move(source);
  return out;
}

SampledFunction add(const SampledFunction& a, const SampledFunction& b) {
  if (a.size() != b.size()) throw DomainError("add: sampled functions on different grids");
  SampledFunction out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
  out.source = a.source + "+" + b.source;
  return out;
}

SampledFunction scaled(const SampledFunction& a, double c) {
  SampledFunction out = a;
  for (double& v : out.values) v *= c;
  return out;
}

SampledFunction read_sampled_csv(std::istream& in, std::shared_ptr<const QuadDomain> domain, std::string source) {
  if (!domain) throw DomainError("read_sampled_csv: null domain");
  const auto dim = static_cast<std::size_t>(domain->dim());
  SampledFunction out;
  out.domain = domain;
  out.provenance = Provenance::table;
  out.source = std::move(source);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    std::vector<double> nums;
    bool numeric = true;
    for (const auto& f : fields) {
      try {
        std::size_t used = 0;
        nums.push_back(std::stod(f, &used));
        if (used != f.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (out.values.empty() && line_no == 1) continue;  // header
      throw DomainError("CSV line " + std::to_string(line_no) + ": non-numeric field");
    }
    if (nums.size() != dim + 1) {
      throw DomainError("CSV line " + std::to_string(line_no) + ": expected " + std::to_string(dim + 1) + " columns");
    }
    const std::size_t i = out.values.size();
    if (i >= domain->size()) throw DomainError("CSV has more rows than the grid has points");
    const auto p = domain->point(i);
    for (std::size_t k = 0; k < dim; ++k) {
      if (std::abs(nums[k] - p[k]) > 1e-9 * std::max(1.0, std::abs(p[k]))) {
        throw DomainError("CSV line " + std::to_string(line_no) + ": coordinates do not match grid point " +
                          std::to_string(i));
      }
    }
    if (!std::isfinite(nums[dim])) throw NumericError("CSV line " + std::to_string(line_no) + ": non-finite value");
    out.values.push_back(nums[dim]);
  }
  if (out.values.size() != domain->size()) {
    throw DomainError("CSV has " + std::to_string(out.values.size()) + " rows, grid has " +
                      std::to_string(domain->size()) + " points");
  }
  return out;
}

void write_sampled_csv(std::ostream& out, const SampledFunction& f) {
  CsvWriter w(out);
  if (f.domain->dim() == 1) {
    w.header({"t1", "value"});
  } else {
    w.header({"t1", "t2", "value"});
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto p = f.domain->point(i);
    std::vector<double> row(p.begin(), p.end());
    row.push_back(f.values[i]);
    w.row(row);
  }
}

}  // namespace orlicz
