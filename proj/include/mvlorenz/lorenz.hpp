#pragma once

#include <span>
#include <vector>

namespace mvlorenz {

/// Empirical Lorenz curve: piecewise linear through (population share,
/// value share) knots, one knot per distinct value.
class LorenzCurve {
 public:
  LorenzCurve(std::vector<double> knots_u, std::vector<double> knots_s);

  const std::vector<double>& knots_u() const noexcept { return u_; }
  const std::vector<double>& knots_s() const noexcept { return s_; }

 private:
  std::vector<double> u_;
  std::vector<double> s_;
};

/// Builds the curve from one variable. Values must be >= 0 with a positive
/// weighted total; equal values are grouped into a single knot.
LorenzCurve empirical_lorenz(std::span<const double> values, std::span<const double> weights);

/// L(u) by linear interpolation. Throws out_of_range unless u in [0,1].
double lorenz_eval(const LorenzCurve& curve, double u);

/// Generalized inverse: inf{t : L(t) >= s} for s > 0, and sup{t : L(t) = 0}
/// at s = 0, so a point mass at zero yields a positive value.
/// Throws out_of_range unless s in [0,1].
double inverse_lorenz_eval(const LorenzCurve& curve, double s);

/// For each element, the weighted total of all values <= it divided by the
/// weighted grand total (ties share the full tie-group sum). The largest
/// value always maps to exactly 1.
std::vector<double> cumulative_shares(std::span<const double> values, std::span<const double> weights);

enum class GiniConvention {
  trapezoid,  ///< 1 - 2 * integral of the interpolated curve
  plugin,     ///< 1 - 2 * weighted mean of cumulative_shares
};

double gini(std::span<const double> values, std::span<const double> weights,
            GiniConvention convention = GiniConvention::trapezoid);

}  // namespace mvlorenz
