#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mvlorenz {

/// Weighted, non-negative n-by-d microdata. Immutable once built; values
/// are stored column-major so each variable is one contiguous span.
class Dataset {
 public:
  std::size_t rows() const noexcept { return n_; }
  std::size_t dims() const noexcept { return d_; }

  double value(std::size_t row, std::size_t col) const { return values_[col * n_ + row]; }
  std::span<const double> column(std::size_t col) const {
    return std::span<const double>(values_).subspan(col * n_, n_);
  }
  std::vector<double> row(std::size_t j) const;
  /// All rows in input order, for callers that rebuild modified copies.
  std::vector<std::vector<double>> row_list() const;

  std::span<const double> weights() const noexcept { return weights_; }
  double weight(std::size_t row) const { return weights_[row]; }
  double total_weight() const noexcept { return total_weight_; }

  const std::vector<std::string>& var_names() const noexcept { return names_; }
  /// Weighted column mean.
  double mean(std::size_t col) const { return means_[col]; }
  /// FNV-1a digest of shape, values and weights; tags derived objects.
  std::uint64_t hash() const noexcept { return hash_; }

 private:
  friend Dataset build_dataset_columns(std::vector<double>, std::size_t, std::size_t, std::vector<double>,
                                       std::vector<std::string>);

  Dataset() = default;

  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> values_;
  std::vector<double> weights_;
  std::vector<std::string> names_;
  std::vector<double> means_;
  double total_weight_ = 0.0;
  std::uint64_t hash_ = 0;
};

/// Validates and builds a Dataset from row vectors. Empty weights mean unit
/// weights; empty names become x1..xd.
///
/// Throws Error with kind invalid_argument (empty/ragged input, weight count
/// mismatch), non_finite, negative_value, nonpositive_weight, too_few_rows
/// (n <= d) or zero_column, checked in that order.
Dataset build_dataset(const std::vector<std::vector<double>>& rows, std::span<const double> weights = {},
                      std::vector<std::string> var_names = {});

/// Same validation, from an n*d column-major buffer.
Dataset build_dataset_columns(std::vector<double> column_major, std::size_t n, std::size_t d,
                              std::vector<double> weights = {}, std::vector<std::string> var_names = {});

/// Copy of `data` with column `col` multiplied by `factor` (> 0).
Dataset scale_column(const Dataset& data, std::size_t col, double factor);

/// Dataset restricted to the listed columns, in the listed order.
Dataset project(const Dataset& data, std::span<const std::size_t> cols);

/// Per-variable cumulative value shares (pseudo-observations): entry (j, i)
/// is the weighted total of column i over all rows whose value is <= row j's,
/// divided by the weighted column total. Column-major, like Dataset.
class PseudoObservations {
 public:
  PseudoObservations(std::vector<double> stars, std::size_t n, std::size_t d, std::vector<double> weights,
                     std::uint64_t source_hash);

  std::size_t rows() const noexcept { return n_; }
  std::size_t dims() const noexcept { return d_; }
  double star(std::size_t row, std::size_t col) const { return stars_[col * n_ + row]; }
  std::span<const double> column(std::size_t col) const {
    return std::span<const double>(stars_).subspan(col * n_, n_);
  }
  std::vector<std::span<const double>> columns() const;
  std::span<const double> weights() const noexcept { return weights_; }
  double total_weight() const noexcept { return total_weight_; }
  std::uint64_t source_hash() const noexcept { return source_hash_; }

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<double> stars_;
  std::vector<double> weights_;
  double total_weight_;
  std::uint64_t source_hash_;
};

/// Tensor-product evaluation grid on [0,1]^d. Points are enumerated in
/// lexicographic order with the first coordinate varying slowest.
class GridSpec {
 public:
  /// m equally spaced knots 0, 1/(m-1), ..., 1 in each of d dimensions.
  static GridSpec uniform(std::size_t d, std::size_t m = 101);
  /// Explicit knots; each list must be strictly increasing, start at 0 and
  /// end at 1. Throws invalid_argument otherwise.
  static GridSpec from_knots(std::vector<std::vector<double>> knots);

  std::size_t dims() const noexcept { return knots_.size(); }
  const std::vector<double>& knots(std::size_t dim) const { return knots_[dim]; }
  std::size_t size() const noexcept;
  /// Coordinates of the flat point index.
  std::vector<double> point(std::size_t flat) const;
  /// Per-dimension knot indices of the flat point index.
  std::vector<std::size_t> index(std::size_t flat) const;

 private:
  explicit GridSpec(std::vector<std::vector<double>> knots) : knots_(std::move(knots)) {}
  std::vector<std::vector<double>> knots_;
};

}  // namespace mvlorenz
