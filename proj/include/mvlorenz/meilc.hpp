#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mvlorenz/dataset.hpp"

namespace mvlorenz {

/// Cumulative-share transform of every column; row alignment (and so the
/// dependence between variables) is preserved.
PseudoObservations pseudo_observations(const Dataset& data);

/// Empirical multivariate inverse Lorenz surface at u: the weighted share of
/// rows whose pseudo-observations are <= u in every coordinate.
double meilc_point(const PseudoObservations& pseudo, std::span<const double> u);

/// Dense evaluation of the empirical surface on a grid.
class MeilcSurface {
 public:
  MeilcSurface(GridSpec grid, std::vector<double> values);

  const GridSpec& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t dims() const noexcept { return grid_.dims(); }
  double at(std::size_t flat) const { return values_[flat]; }

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Single pass: rows are binned to their first dominating grid knot and the
/// d-dimensional histogram is prefix-summed. Identical to pointwise
/// meilc_point for integer weights; otherwise equal up to summation order.
MeilcSurface meilc_surface(const PseudoObservations& pseudo, const GridSpec& grid);

/// Sample multivariate Gini coefficient; no clipping to [0,1].
double megc(const PseudoObservations& pseudo);

/// Two-variable split of megc into a dependence term and marginal Ginis.
struct GiniDecomposition {
  double cross_moment;  ///< weighted mean of X1* X2*
  double g1;            ///< plugin Gini of variable 1
  double g2;            ///< plugin Gini of variable 2
  double megc;          ///< 6/5 cross + 3/5 g1 + 3/5 g2 - 1/5
};

/// Throws wrong_dimension unless d == 2.
GiniDecomposition megc_decomposition(const PseudoObservations& pseudo);

/// Lower and upper bound on the two-variable coefficient given marginal
/// Ginis. Throws out_of_range unless both lie in [0,1].
std::pair<double, double> megc_bounds(double g1, double g2);

/// (d+1)! for the normalization constant.
double factorial_plus_one(std::size_t d);

/// W(u) = max(0, sum u_i - (d-1)).
double lower_frechet(std::span<const double> u);

}  // namespace mvlorenz
