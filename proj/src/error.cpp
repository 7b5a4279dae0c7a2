#include "mvlorenz/error.hpp"

namespace mvlorenz {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::non_finite: return "NonFinite";
    case ErrorKind::negative_value: return "NegativeValue";
    case ErrorKind::zero_column: return "ZeroColumn";
    case ErrorKind::too_few_rows: return "TooFewRows";
    case ErrorKind::nonpositive_weight: return "NonpositiveWeight";
    case ErrorKind::out_of_range: return "OutOfRange";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::wrong_dimension: return "WrongDimension";
    case ErrorKind::unsupported_dimension: return "UnsupportedDimension";
    case ErrorKind::unsupported_family: return "UnsupportedFamily";
    case ErrorKind::parameter_out_of_domain: return "ParameterOutOfDomain";
    case ErrorKind::unattainable: return "Unattainable";
    case ErrorKind::index_out_of_range: return "IndexOutOfRange";
    case ErrorKind::unequal_weights: return "UnequalWeights";
    case ErrorKind::not_richer: return "NotRicher";
    case ErrorKind::negative_result: return "NegativeResult";
    case ErrorKind::missing_column: return "MissingColumn";
    case ErrorKind::parse_error: return "ParseError";
    case ErrorKind::empty_result: return "EmptyResult";
    case ErrorKind::config_error: return "ConfigError";
    case ErrorKind::io_error: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace mvlorenz
