#include "mvlorenz/meilc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvlorenz/error.hpp"
#include "mvlorenz/kernels.hpp"
#include "mvlorenz/lorenz.hpp"
#include "mvlorenz/summation.hpp"

namespace mvlorenz {

PseudoObservations pseudo_observations(const Dataset& data) {
  const std::size_t n = data.rows();
  const std::size_t d = data.dims();
  std::vector<double> stars;
  stars.reserve(n * d);
  for (std::size_t i = 0; i < d; ++i) {
    auto col = cumulative_shares(data.column(i), data.weights());
    stars.insert(stars.end(), col.begin(), col.end());
  }
  return PseudoObservations(std::move(stars), n, d, {data.weights().begin(), data.weights().end()}, data.hash());
}

double meilc_point(const PseudoObservations& pseudo, std::span<const double> u) {
  if (u.size() != pseudo.dims())
    throw Error(ErrorKind::dimension_mismatch,
                "point has " + std::to_string(u.size()) + " coordinates, data has " + std::to_string(pseudo.dims()));
  for (double x : u)
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::out_of_range, "surface argument must lie in [0,1]^d");
  const auto cols = pseudo.columns();
  return kernels::dominated_weight(cols, pseudo.weights(), u) / pseudo.total_weight();
}

MeilcSurface::MeilcSurface(GridSpec grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw Error(ErrorKind::invalid_argument, "surface size does not match grid");
}

MeilcSurface meilc_surface(const PseudoObservations& pseudo, const GridSpec& grid) {
  const std::size_t d = pseudo.dims();
  if (grid.dims() != d) throw Error(ErrorKind::dimension_mismatch, "grid dimension differs from data");
  const std::size_t total = grid.size();

  std::vector<std::size_t> stride(d);
  std::size_t s = 1;
  for (std::size_t i = d; i-- > 0;) {
    stride[i] = s;
    s *= grid.knots(i).size();
  }

  // Bin each row at the first knot >= its star in every dimension. Every
  // star is <= 1 and the last knot is 1, so each row lands in the grid.
  std::vector<CompensatedSum> mass(total);
  const auto w = pseudo.weights();
  for (std::size_t j = 0; j < pseudo.rows(); ++j) {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const auto& k = grid.knots(i);
      const auto b = static_cast<std::size_t>(std::lower_bound(k.begin(), k.end(), pseudo.star(j, i)) - k.begin());
      flat += b * stride[i];
    }
    mass[flat].add(w[j]);
  }

  // Inclusive prefix sums along each axis.
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t m = grid.knots(i).size();
    for (std::size_t flat = 0; flat < total; ++flat) {
      if ((flat / stride[i]) % m == 0) continue;
      mass[flat].merge(mass[flat - stride[i]]);
    }
  }

  std::vector<double> values(total);
  const double wt = pseudo.total_weight();
  for (std::size_t flat = 0; flat < total; ++flat) values[flat] = mass[flat].value() / wt;
  return MeilcSurface(grid, std::move(values));
}

double factorial_plus_one(std::size_t d) {
  double f = 1.0;
  for (std::size_t k = 2; k <= d + 1; ++k) f *= static_cast<double>(k);
  return f;
}

double megc(const PseudoObservations& pseudo) {
  const auto cols = pseudo.columns();
  const double integral = kernels::complement_product_sum(cols, pseudo.weights()) / pseudo.total_weight();
  const double f = factorial_plus_one(pseudo.dims());
  return (f * integral - 1.0) / (f - 1.0);
}

GiniDecomposition megc_decomposition(const PseudoObservations& pseudo) {
  if (pseudo.dims() != 2)
    throw Error(ErrorKind::wrong_dimension, "decomposition needs exactly two variables, got " +
                                                std::to_string(pseudo.dims()));
  const auto w = pseudo.weights();
  const double wt = pseudo.total_weight();
  const auto a = pseudo.column(0);
  const auto b = pseudo.column(1);
  GiniDecomposition out{};
  out.cross_moment = kernels::weighted_dot(a, b, w) / wt;
  out.g1 = 1.0 - 2.0 * kernels::weighted_sum(a, w) / wt;
  out.g2 = 1.0 - 2.0 * kernels::weighted_sum(b, w) / wt;
  out.megc = 1.2 * out.cross_moment + 0.6 * out.g1 + 0.6 * out.g2 - 0.2;
  return out;
}

std::pair<double, double> megc_bounds(double g1, double g2) {
  if (!(g1 >= 0.0 && g1 <= 1.0) || !(g2 >= 0.0 && g2 <= 1.0))
    throw Error(ErrorKind::out_of_range, "marginal Ginis must lie in [0,1]");
  const double lower = (3.0 * g1 + 3.0 * g2 - 1.0) / 5.0;
  const double upper = 0.4 - 0.6 * std::max(g1, g2) + 0.6 * (g1 + g2);
  return {lower, upper};
}

double lower_frechet(std::span<const double> u) {
  double s = 0.0;
  for (double x : u) s += x;
  return std::max(0.0, s - static_cast<double>(u.size()) + 1.0);
}

}  // namespace mvlorenz
