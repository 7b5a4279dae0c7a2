#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mvlorenz/dataset.hpp"

namespace mvlorenz {

/// Correlation-increasing transformation: row t takes the elementwise max
/// of rows t and z, row z the elementwise min. Rows must carry equal weight.
/// Throws index_out_of_range, invalid_argument (t == z), unequal_weights.
Dataset apply_cit(const Dataset& data, std::size_t t, std::size_t z);

/// Pigou-Dalton bundle transfer of non-negative `amounts` from `donor` to
/// `recipient`. The donor must be weakly richer in every attribute and
/// strictly richer in one; amounts must not all be zero (not_richer) and the
/// donor must stay non-negative (negative_result).
Dataset apply_pdbt(const Dataset& data, std::size_t donor, std::size_t recipient, std::span<const double> amounts);

enum class LorenzOrder { a_dominates, b_dominates, equal, incomparable };

std::string_view to_string(LorenzOrder order) noexcept;
/// Plain-language reading of the order, for reports.
std::string_view describe(LorenzOrder order) noexcept;

/// Compares the empirical surfaces of a and b on the grid knots merged with
/// every pseudo-observation value of either dataset, so no step of either
/// surface is skipped. "a_dominates" means a's surface is >= b's everywhere
/// and larger somewhere (a is more unequal). Tolerance 1e-12.
///
/// When the merged lattice would exceed `max_points`, only the grid knots
/// are used.
LorenzOrder lorenz_order(const Dataset& a, const Dataset& b, const GridSpec& grid,
                         std::size_t max_points = std::size_t{1} << 24);

enum class TransferKind { cit, pdbt };

struct TransferSpec {
  TransferKind kind;
  std::size_t from;  ///< t for cit, donor for pdbt
  std::size_t to;    ///< z for cit, recipient for pdbt
  std::vector<double> amounts;
};

struct TransferRecord {
  TransferKind kind;
  std::pair<std::size_t, std::size_t> actors;
  std::optional<std::vector<double>> amounts;
  double before_megc;
  double after_megc;
};

/// Parses one JSON line: {"kind":"cit","t":0,"z":1} or
/// {"kind":"pdbt","from":0,"to":3,"amounts":[1.1,0]}. Throws parse_error.
TransferSpec parse_transfer_spec(std::string_view json_line);
std::string to_json(const TransferRecord& record);

struct TransferRun {
  Dataset result;
  std::vector<TransferRecord> records;
};

/// Applies the transfers in order, recording the coefficient around each.
TransferRun apply_transfers(const Dataset& data, std::span<const TransferSpec> transfers);

/// A sequence of CITs (a correlation-increasing majorization).
std::vector<TransferRecord> audit_cim(const Dataset& data, std::span<const std::pair<std::size_t, std::size_t>> cits);

}  // namespace mvlorenz
