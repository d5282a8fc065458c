#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace orlicz {

/// Shortest decimal string that round-trips to the same double. Non-finite
/// values print as "nan", "inf", "-inf".
std::string format_number(double v);

/// Minimal CSV emitter: comma separated, '\n' line ends, no quoting (all
/// fields are identifiers or numbers).
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);
  /// A leading text cell followed by numbers.
  void row(std::string_view label, const std::vector<double>& values);

 private:
  std::ostream& out_;
};

/// Splits one CSV line on commas, trimming blanks.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace orlicz
