#include "mvlorenz/dataset.hpp"

#include <cmath>
#include <cstring>

#include "mvlorenz/error.hpp"
#include "mvlorenz/summation.hpp"

namespace mvlorenz {
namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_mix(std::uint64_t& h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t k = 0; k < bytes; ++k) {
    h ^= p[k];
    h *= kFnvPrime;
  }
}

std::string at(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

}  // namespace

std::vector<double> Dataset::row(std::size_t j) const {
  std::vector<double> r(d_);
  for (std::size_t i = 0; i < d_; ++i) r[i] = value(j, i);
  return r;
}

std::vector<std::vector<double>> Dataset::row_list() const {
  std::vector<std::vector<double>> out;
  out.reserve(n_);
  for (std::size_t j = 0; j < n_; ++j) out.push_back(row(j));
  return out;
}

Dataset build_dataset_columns(std::vector<double> column_major, std::size_t n, std::size_t d,
                              std::vector<double> weights, std::vector<std::string> var_names) {
  if (n == 0 || d == 0) throw Error(ErrorKind::invalid_argument, "dataset needs at least one row and column");
  if (column_major.size() != n * d) throw Error(ErrorKind::invalid_argument, "value buffer size is not n*d");
  if (weights.empty()) weights.assign(n, 1.0);
  if (weights.size() != n)
    throw Error(ErrorKind::invalid_argument,
                "expected " + std::to_string(n) + " weights, got " + std::to_string(weights.size()));
  if (var_names.empty()) {
    for (std::size_t i = 0; i < d; ++i) var_names.push_back("x" + std::to_string(i + 1));
  } else if (var_names.size() != d) {
    throw Error(ErrorKind::invalid_argument, "variable name count does not match dimension");
  }

  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(column_major[i * n + j])) throw Error(ErrorKind::non_finite, at(j, i));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (column_major[i * n + j] < 0.0) throw Error(ErrorKind::negative_value, at(j, i));
  for (std::size_t j = 0; j < n; ++j)
    if (!(weights[j] > 0.0) || !std::isfinite(weights[j]))
      throw Error(ErrorKind::nonpositive_weight, "row " + std::to_string(j));
  if (n <= d)
    throw Error(ErrorKind::too_few_rows,
                "need more rows than variables (n=" + std::to_string(n) + ", d=" + std::to_string(d) + ")");

  Dataset ds;
  ds.n_ = n;
  ds.d_ = d;
  ds.total_weight_ = compensated_sum(weights);
  ds.means_.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    CompensatedSum s;
    for (std::size_t j = 0; j < n; ++j) s.add(weights[j] * column_major[i * n + j]);
    ds.means_[i] = s.value() / ds.total_weight_;
    if (!(ds.means_[i] > 0.0)) throw Error(ErrorKind::zero_column, "column '" + var_names[i] + "' has zero mean");
    if (!std::isfinite(ds.means_[i])) throw Error(ErrorKind::non_finite, "column '" + var_names[i] + "' mean overflows");
  }

  std::uint64_t h = kFnvOffset;
  fnv_mix(h, &n, sizeof n);
  fnv_mix(h, &d, sizeof d);
  fnv_mix(h, column_major.data(), column_major.size() * sizeof(double));
  fnv_mix(h, weights.data(), weights.size() * sizeof(double));
  ds.hash_ = h;

  ds.values_ = std::move(column_major);
  ds.weights_ = std::move(weights);
  ds.names_ = std::move(var_names);
  return ds;
}

Dataset build_dataset(const std::vector<std::vector<double>>& rows, std::span<const double> weights,
                      std::vector<std::string> var_names) {
  if (rows.empty()) throw Error(ErrorKind::invalid_argument, "no rows");
  const std::size_t n = rows.size();
  const std::size_t d = rows.front().size();
  for (std::size_t j = 0; j < n; ++j)
    if (rows[j].size() != d) throw Error(ErrorKind::invalid_argument, "row " + std::to_string(j) + " has wrong length");
  std::vector<double> cm(n * d);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < d; ++i) cm[i * n + j] = rows[j][i];
  return build_dataset_columns(std::move(cm), n, d, std::vector<double>(weights.begin(), weights.end()),
                               std::move(var_names));
}

Dataset scale_column(const Dataset& data, std::size_t col, double factor) {
  if (col >= data.dims()) throw Error(ErrorKind::index_out_of_range, "column " + std::to_string(col));
  if (!(factor > 0.0) || !std::isfinite(factor)) throw Error(ErrorKind::invalid_argument, "scale factor must be > 0");
  const std::size_t n = data.rows();
  std::vector<double> cm;
  cm.reserve(n * data.dims());
  for (std::size_t i = 0; i < data.dims(); ++i)
    for (double v : data.column(i)) cm.push_back(i == col ? v * factor : v);
  return build_dataset_columns(std::move(cm), n, data.dims(), {data.weights().begin(), data.weights().end()},
                               data.var_names());
}

Dataset project(const Dataset& data, std::span<const std::size_t> cols) {
  const std::size_t n = data.rows();
  std::vector<double> cm;
  std::vector<std::string> names;
  for (std::size_t c : cols) {
    if (c >= data.dims()) throw Error(ErrorKind::index_out_of_range, "column " + std::to_string(c));
    auto col = data.column(c);
    cm.insert(cm.end(), col.begin(), col.end());
    names.push_back(data.var_names()[c]);
  }
  return build_dataset_columns(std::move(cm), n, cols.size(), {data.weights().begin(), data.weights().end()},
                               std::move(names));
}

PseudoObservations::PseudoObservations(std::vector<double> stars, std::size_t n, std::size_t d,
                                       std::vector<double> weights, std::uint64_t source_hash)
    : n_(n),
      d_(d),
      stars_(std::move(stars)),
      weights_(std::move(weights)),
      total_weight_(compensated_sum(weights_)),
      source_hash_(source_hash) {
  if (stars_.size() != n_ * d_ || weights_.size() != n_)
    throw Error(ErrorKind::invalid_argument, "pseudo-observation buffer shape mismatch");
}

std::vector<std::span<const double>> PseudoObservations::columns() const {
  std::vector<std::span<const double>> cols;
  cols.reserve(d_);
  for (std::size_t i = 0; i < d_; ++i) cols.push_back(column(i));
  return cols;
}

GridSpec GridSpec::uniform(std::size_t d, std::size_t m) {
  if (d == 0) throw Error(ErrorKind::invalid_argument, "grid needs at least one dimension");
  if (m < 2) throw Error(ErrorKind::invalid_argument, "grid needs at least two knots per dimension");
  std::vector<double> knots(m);
  for (std::size_t k = 0; k < m; ++k) knots[k] = static_cast<double>(k) / static_cast<double>(m - 1);
  knots.back() = 1.0;
  return GridSpec(std::vector<std::vector<double>>(d, knots));
}

GridSpec GridSpec::from_knots(std::vector<std::vector<double>> knots) {
  if (knots.empty()) throw Error(ErrorKind::invalid_argument, "grid needs at least one dimension");
  for (const auto& k : knots) {
    if (k.size() < 2 || k.front() != 0.0 || k.back() != 1.0)
      throw Error(ErrorKind::invalid_argument, "grid knots must start at 0 and end at 1");
    for (std::size_t t = 1; t < k.size(); ++t)
      if (!(k[t] > k[t - 1])) throw Error(ErrorKind::invalid_argument, "grid knots must be strictly increasing");
  }
  return GridSpec(std::move(knots));
}

std::size_t GridSpec::size() const noexcept {
  std::size_t s = 1;
  for (const auto& k : knots_) s *= k.size();
  return s;
}

std::vector<std::size_t> GridSpec::index(std::size_t flat) const {
  std::vector<std::size_t> idx(knots_.size());
  for (std::size_t i = knots_.size(); i-- > 0;) {
    idx[i] = flat % knots_[i].size();
    flat /= knots_[i].size();
  }
  return idx;
}

std::vector<double> GridSpec::point(std::size_t flat) const {
  const auto idx = index(flat);
  std::vector<double> u(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) u[i] = knots_[i][idx[i]];
  return u;
}

}  // namespace mvlorenz
