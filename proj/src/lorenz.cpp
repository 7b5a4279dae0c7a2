#include "mvlorenz/lorenz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mvlorenz/error.hpp"
#include "mvlorenz/kernels.hpp"
#include "mvlorenz/summation.hpp"

namespace mvlorenz {
namespace {

void check_column(std::span<const double> values, std::span<const double> weights) {
  if (values.empty()) throw Error(ErrorKind::invalid_argument, "empty column");
  if (values.size() != weights.size()) throw Error(ErrorKind::invalid_argument, "values/weights length mismatch");
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!std::isfinite(values[j])) throw Error(ErrorKind::non_finite, "value " + std::to_string(j));
    if (values[j] < 0.0) throw Error(ErrorKind::negative_value, "value " + std::to_string(j));
    if (!(weights[j] > 0.0)) throw Error(ErrorKind::nonpositive_weight, "weight " + std::to_string(j));
  }
}

std::vector<std::size_t> ascending_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  return order;
}

struct TieGroup {
  std::size_t begin;
  std::size_t end;
  double cum_weight;  // inclusive
  double cum_value;   // inclusive, weighted
};

std::vector<TieGroup> tie_groups(std::span<const double> values, std::span<const double> weights,
                                 const std::vector<std::size_t>& order) {
  std::vector<TieGroup> groups;
  CompensatedSum w_acc;
  CompensatedSum v_acc;
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t e = k;
    const double v = values[order[k]];
    while (e < order.size() && values[order[e]] == v) {
      w_acc.add(weights[order[e]]);
      v_acc.add(weights[order[e]] * values[order[e]]);
      ++e;
    }
    groups.push_back({k, e, w_acc.value(), v_acc.value()});
    k = e;
  }
  return groups;
}

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::out_of_range, std::string(what) + " must lie in [0,1]");
}

}  // namespace

LorenzCurve::LorenzCurve(std::vector<double> knots_u, std::vector<double> knots_s)
    : u_(std::move(knots_u)), s_(std::move(knots_s)) {
  if (u_.size() < 2 || u_.size() != s_.size()) throw Error(ErrorKind::invalid_argument, "Lorenz curve needs >= 2 knots");
  if (u_.front() != 0.0 || s_.front() != 0.0 || u_.back() != 1.0 || s_.back() != 1.0)
    throw Error(ErrorKind::invalid_argument, "Lorenz curve must run from (0,0) to (1,1)");
}

LorenzCurve empirical_lorenz(std::span<const double> values, std::span<const double> weights) {
  check_column(values, weights);
  const auto order = ascending_order(values);
  const auto groups = tie_groups(values, weights, order);
  const double total_w = groups.back().cum_weight;
  const double total_v = groups.back().cum_value;
  if (!(total_v > 0.0)) throw Error(ErrorKind::zero_column, "column total is zero");

  std::vector<double> u{0.0};
  std::vector<double> s{0.0};
  for (const auto& g : groups) {
    u.push_back(g.cum_weight / total_w);
    s.push_back(g.cum_value / total_v);
  }
  return LorenzCurve(std::move(u), std::move(s));
}

double lorenz_eval(const LorenzCurve& curve, double u) {
  check_unit(u, "population share");
  const auto& ku = curve.knots_u();
  const auto& ks = curve.knots_s();
  auto it = std::lower_bound(ku.begin(), ku.end(), u);
  const auto k = static_cast<std::size_t>(it - ku.begin());
  if (ku[k] == u) return ks[k];
  const double t = (u - ku[k - 1]) / (ku[k] - ku[k - 1]);
  return ks[k - 1] + t * (ks[k] - ks[k - 1]);
}

double inverse_lorenz_eval(const LorenzCurve& curve, double s) {
  check_unit(s, "value share");
  const auto& ku = curve.knots_u();
  const auto& ks = curve.knots_s();
  if (s == 0.0) {
    // sup of the flat segment at zero
    std::size_t k = 0;
    while (k + 1 < ks.size() && ks[k + 1] == 0.0) ++k;
    return ku[k];
  }
  auto it = std::lower_bound(ks.begin(), ks.end(), s);
  const auto k = static_cast<std::size_t>(it - ks.begin());
  if (ks[k] == s) return ku[k];
  const double t = (s - ks[k - 1]) / (ks[k] - ks[k - 1]);
  return ku[k - 1] + t * (ku[k] - ku[k - 1]);
}

std::vector<double> cumulative_shares(std::span<const double> values, std::span<const double> weights) {
  check_column(values, weights);
  const auto order = ascending_order(values);
  const auto groups = tie_groups(values, weights, order);
  const double total_v = groups.back().cum_value;
  if (!(total_v > 0.0)) throw Error(ErrorKind::zero_column, "column total is zero");
  std::vector<double> shares(values.size());
  for (const auto& g : groups) {
    const double share = g.cum_value / total_v;
    for (std::size_t k = g.begin; k < g.end; ++k) shares[order[k]] = share;
  }
  return shares;
}

double gini(std::span<const double> values, std::span<const double> weights, GiniConvention convention) {
  if (convention == GiniConvention::plugin) {
    const auto shares = cumulative_shares(values, weights);
    const double mean_share = kernels::weighted_sum(shares, weights) / compensated_sum(weights);
    return 1.0 - 2.0 * mean_share;
  }
  const auto curve = empirical_lorenz(values, weights);
  const auto& u = curve.knots_u();
  const auto& s = curve.knots_s();
  CompensatedSum area;
  for (std::size_t k = 1; k < u.size(); ++k) area.add(0.5 * (u[k] - u[k - 1]) * (s[k] + s[k - 1]));
  return 1.0 - 2.0 * area.value();
}

}  // namespace mvlorenz
