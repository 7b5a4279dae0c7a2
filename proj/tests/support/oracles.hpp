#pragma once

// Straightforward reference implementations used as test oracles. They share
// no code with the library: quadratic loops, long double accumulation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "mvlorenz/dataset.hpp"

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline std::vector<double> unit_weights(std::size_t n) { return std::vector<double>(n, 1.0); }

// stars[j][i]: weighted sum of column-i values <= x_ij over the column total.
inline Rows stars(const Rows& rows, const std::vector<double>& w) {
  const std::size_t n = rows.size();
  const std::size_t d = rows.front().size();
  Rows out(n, std::vector<double>(d));
  for (std::size_t i = 0; i < d; ++i) {
    long double total = 0;
    for (std::size_t l = 0; l < n; ++l) total += w[l] * rows[l][i];
    for (std::size_t j = 0; j < n; ++j) {
      long double s = 0;
      for (std::size_t l = 0; l < n; ++l)
        if (rows[l][i] <= rows[j][i]) s += w[l] * rows[l][i];
      out[j][i] = static_cast<double>(s / total);
    }
  }
  return out;
}

inline double meilc(const Rows& st, const std::vector<double>& w, const std::vector<double>& u) {
  long double hit = 0, total = 0;
  for (std::size_t j = 0; j < st.size(); ++j) {
    total += w[j];
    bool in = true;
    for (std::size_t i = 0; i < u.size(); ++i) in = in && st[j][i] <= u[i];
    if (in) hit += w[j];
  }
  return static_cast<double>(hit / total);
}

inline double factorial(std::size_t k) {
  double f = 1;
  for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
  return f;
}

inline double megc(const Rows& st, const std::vector<double>& w) {
  const std::size_t d = st.front().size();
  long double acc = 0, total = 0;
  for (std::size_t j = 0; j < st.size(); ++j) {
    long double p = w[j];
    for (std::size_t i = 0; i < d; ++i) p *= 1.0L - st[j][i];
    acc += p;
    total += w[j];
  }
  const long double f = factorial(d + 1);
  return static_cast<double>((f * acc / total - 1) / (f - 1));
}

inline double pairwise_gini(const std::vector<double>& x, const std::vector<double>& w) {
  long double num = 0, total = 0, mass = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += w[i];
    mass += w[i] * x[i];
    for (std::size_t j = 0; j < x.size(); ++j) num += static_cast<long double>(w[i]) * w[j] * std::fabs(x[i] - x[j]);
  }
  const long double mu = mass / total;
  return static_cast<double>(num / (2 * total * total * mu));
}

inline Rows random_rows(std::mt19937_64& rng, std::size_t n, std::size_t d, bool with_ties = false) {
  std::uniform_real_distribution<double> val(0.0, 100.0);
  std::uniform_int_distribution<int> small(0, 5);
  Rows rows(n, std::vector<double>(d));
  for (auto& r : rows)
    for (auto& v : r) v = with_ties ? static_cast<double>(small(rng)) : val(rng);
  // keep every column total positive
  for (std::size_t i = 0; i < d; ++i) rows[0][i] += 1.0;
  return rows;
}

inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> w(0.1, 5.0);
  std::vector<double> out(n);
  for (auto& v : out) v = w(rng);
  return out;
}

inline std::vector<double> column(const Rows& rows, std::size_t i) {
  std::vector<double> c;
  for (const auto& r : rows) c.push_back(r[i]);
  return c;
}

}  // namespace oracle
