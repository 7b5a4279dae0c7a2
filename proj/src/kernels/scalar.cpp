#include "mvlorenz/kernels.hpp"
#include "mvlorenz/summation.hpp"

namespace mvlorenz::kernels::scalar {

double complement_product_sum(Columns cols, std::span<const double> w) {
  CompensatedSum acc;
  for (std::size_t j = 0; j < w.size(); ++j) {
    double p = w[j];
    for (const auto& c : cols) p *= 1.0 - c[j];
    acc.add(p);
  }
  return acc.value();
}

double dominated_weight(Columns cols, std::span<const double> w, std::span<const double> bound) {
  CompensatedSum acc;
  for (std::size_t j = 0; j < w.size(); ++j) {
    bool inside = true;
    for (std::size_t i = 0; i < cols.size(); ++i) inside = inside && cols[i][j] <= bound[i];
    if (inside) acc.add(w[j]);
  }
  return acc.value();
}

double weighted_dot(std::span<const double> a, std::span<const double> b, std::span<const double> w) {
  CompensatedSum acc;
  for (std::size_t j = 0; j < w.size(); ++j) acc.add(w[j] * a[j] * b[j]);
  return acc.value();
}

double weighted_sum(std::span<const double> x, std::span<const double> w) {
  CompensatedSum acc;
  for (std::size_t j = 0; j < w.size(); ++j) acc.add(w[j] * x[j]);
  return acc.value();
}

}  // namespace mvlorenz::kernels::scalar
