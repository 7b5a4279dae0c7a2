#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mvlorenz {

enum class ErrorKind {
  invalid_argument,
  non_finite,
  negative_value,
  zero_column,
  too_few_rows,
  nonpositive_weight,
  out_of_range,
  dimension_mismatch,
  wrong_dimension,
  unsupported_dimension,
  unsupported_family,
  parameter_out_of_domain,
  unattainable,
  index_out_of_range,
  unequal_weights,
  not_richer,
  negative_result,
  missing_column,
  parse_error,
  empty_result,
  config_error,
  io_error,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Exception carrying a machine-checkable error kind. Every validation
/// failure in the library surfaces as one of these.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mvlorenz
