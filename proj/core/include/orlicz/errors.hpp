#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace orlicz {

/// Argument outside the mathematical domain of an operation (negative s,
/// function not in the required class, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Argument inside the domain but outside the range a generator is
/// certified on.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Non-finite intermediate values, overflow, singular systems.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed experiment configuration. Carries the dotted field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field_path, const std::string& message)
      : std::runtime_error(field_path.empty() ? message : field_path + ": " + message),
        field_path_(std::move(field_path)) {}

  const std::string& field_path() const noexcept { return field_path_; }

 private:
  std::string field_path_;
};

}  // namespace orlicz
