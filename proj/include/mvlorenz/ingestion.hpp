#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mvlorenz/dataset.hpp"

namespace mvlorenz {

/// Delimited text parsed into numeric columns. Cells that are empty or not
/// a number are kept as nullopt so complete-case filtering can see them.
struct RawTable {
  std::vector<std::string> names;
  std::vector<std::vector<std::optional<double>>> columns;
  std::size_t rows = 0;

  /// Throws missing_column.
  std::size_t column_index(std::string_view name) const;
};

struct TableOptions {
  char delimiter = ',';
  bool has_header = true;
  std::vector<std::string> required_columns;
};

/// Throws io_error if the file cannot be read, parse_error (with line
/// number) for ragged rows or broken quoting, missing_column for absent
/// required columns. Without a header, columns are named col1..colK.
RawTable load_table(const std::filesystem::path& path, const TableOptions& options = {});
RawTable parse_table(std::istream& in, const TableOptions& options = {});

enum class OutlierStats { post_replication, pre_replication };

struct PipelineConfig {
  std::vector<std::string> value_columns;
  std::optional<std::string> weight_column;
  std::optional<std::string> household_size_column;
  bool drop_negative = true;
  double equivalize_exponent = 0.5;
  /// Unset: on exactly when both weight and household size columns exist.
  std::optional<bool> replicate;
  double outlier_sigma = 30.0;
  OutlierStats outlier_stats = OutlierStats::post_replication;
  /// Materialized row cap; beyond it replication switches to weights.
  std::size_t replication_cap = 10'000'000;

  bool replicates() const { return replicate.value_or(weight_column.has_value() && household_size_column.has_value()); }

  /// Parses a JSON document with the field names above. Throws config_error.
  static PipelineConfig from_json(std::string_view text);
};

/// Records (households) removed at each step, in step order.
struct DropReport {
  std::size_t input_rows = 0;
  std::size_t incomplete = 0;
  std::size_t negative = 0;
  std::size_t zero_replication = 0;
  std::size_t outliers = 0;
  std::size_t kept_rows = 0;
  std::size_t output_rows = 0;  ///< Dataset rows after replication
  bool materialized = false;
  bool weighted_fallback = false;

  std::string to_json() const;
};

struct PreprocessResult {
  Dataset data;
  DropReport report;
};

/// Complete cases, negative drop, equivalization by size^-exponent,
/// replication K = size * floor(weight), then outlier exclusion at
/// outlier_sigma standard deviations. Throws missing_column, config_error,
/// empty_result, or any Dataset validation error.
PreprocessResult preprocess(const RawTable& table, const PipelineConfig& config);

/// Header plus one line per row, values at 17 significant digits. A trailing
/// "weight" column is written when `with_weights` is set.
std::string write_csv(const Dataset& data, bool with_weights);

}  // namespace mvlorenz
