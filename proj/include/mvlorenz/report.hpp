#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mvlorenz/dataset.hpp"
#include "mvlorenz/meilc.hpp"

namespace mvlorenz {

struct InequalityReport {
  std::string entity;
  std::vector<double> marginal_ginis;             ///< trapezoid convention
  double megc = 0.0;
  std::vector<std::vector<double>> spearman_rho;  ///< d x d, unit diagonal
  double n_effective = 0.0;                       ///< total weight

  std::size_t dims() const noexcept { return marginal_ginis.size(); }
  std::string to_json() const;
};

/// Weighted Spearman correlation matrix. Ranks are cumulative-weight
/// midpoints of tie groups (average ranks for unit weights). A variable
/// without rank variation gets correlation 0 with every other variable.
std::vector<std::vector<double>> spearman_matrix(const Dataset& data);

InequalityReport report(const Dataset& data, std::string label);

/// Strict componentwise dominance on (G_1, ..., G_d, megc): edge A -> B when
/// A is >= B in every component and > in at least one. Edges point from
/// more to less unequal.
struct DominanceGraph {
  std::vector<std::string> nodes;                           ///< lexicographic
  std::vector<std::pair<std::size_t, std::size_t>> edges;  ///< sorted
  bool reduced = false;

  /// reach[a][b]: b reachable from a by one or more edges.
  std::vector<std::vector<bool>> reachability() const;
};

/// Throws dimension_mismatch for mixed dimensions and invalid_argument for
/// duplicate labels. `reduce` applies the transitive reduction (Hasse form).
DominanceGraph dominance_graph(std::span<const InequalityReport> reports, bool reduce);

std::string export_dot(const DominanceGraph& graph);

enum class SurfaceFormat { csv, json };

/// Long-form rows (u1, ..., ud, value) in grid order, 17 significant digits.
std::string export_surface(const MeilcSurface& surface, SurfaceFormat format);

/// Inverse of export_surface: the long-form rows, each u1..ud then value.
std::vector<std::vector<double>> parse_surface(std::string_view document, SurfaceFormat format);

}  // namespace mvlorenz
