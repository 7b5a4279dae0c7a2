#include "mvlorenz/transfers.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "mvlorenz/error.hpp"
#include "mvlorenz/meilc.hpp"

namespace mvlorenz {
namespace {

constexpr double kOrderTolerance = 1e-12;

void check_row(const Dataset& data, std::size_t row) {
  if (row >= data.rows())
    throw Error(ErrorKind::index_out_of_range,
                "row " + std::to_string(row) + " out of range (n=" + std::to_string(data.rows()) + ")");
}

Dataset rebuild(const Dataset& data, const std::vector<std::vector<double>>& rows) {
  return build_dataset(rows, data.weights(), data.var_names());
}

double megc_of(const Dataset& data) { return megc(pseudo_observations(data)); }

// Sorted union of grid knots and all star values in one dimension.
std::vector<double> merged_knots(const std::vector<double>& knots, const PseudoObservations& a,
                                 const PseudoObservations& b, std::size_t dim) {
  std::vector<double> k(knots);
  for (double x : a.column(dim)) k.push_back(x);
  for (double x : b.column(dim)) k.push_back(x);
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  return k;
}

}  // namespace

Dataset apply_cit(const Dataset& data, std::size_t t, std::size_t z) {
  check_row(data, t);
  check_row(data, z);
  if (t == z) throw Error(ErrorKind::invalid_argument, "a transformation needs two distinct rows");
  if (data.weight(t) != data.weight(z))
    throw Error(ErrorKind::unequal_weights, "rows " + std::to_string(t) + " and " + std::to_string(z) +
                                                " carry different weights");
  auto rows = data.row_list();
  for (std::size_t i = 0; i < data.dims(); ++i) {
    const double hi = std::max(rows[t][i], rows[z][i]);
    const double lo = std::min(rows[t][i], rows[z][i]);
    rows[t][i] = hi;
    rows[z][i] = lo;
  }
  return rebuild(data, rows);
}

Dataset apply_pdbt(const Dataset& data, std::size_t donor, std::size_t recipient, std::span<const double> amounts) {
  check_row(data, donor);
  check_row(data, recipient);
  if (donor == recipient) throw Error(ErrorKind::invalid_argument, "donor and recipient must differ");
  if (amounts.size() != data.dims())
    throw Error(ErrorKind::dimension_mismatch, "need one amount per variable");
  bool any = false;
  for (double a : amounts) {
    if (!std::isfinite(a) || a < 0.0) throw Error(ErrorKind::invalid_argument, "transfer amounts must be >= 0");
    any = any || a > 0.0;
  }
  if (!any) throw Error(ErrorKind::not_richer, "transfer amounts are all zero");

  bool strict = false;
  for (std::size_t i = 0; i < data.dims(); ++i) {
    const double dv = data.value(donor, i);
    const double rv = data.value(recipient, i);
    if (dv < rv)
      throw Error(ErrorKind::not_richer, "donor is poorer than the recipient in variable " + std::to_string(i));
    strict = strict || dv > rv;
  }
  if (!strict) throw Error(ErrorKind::not_richer, "donor and recipient hold identical bundles");

  auto rows = data.row_list();
  for (std::size_t i = 0; i < data.dims(); ++i) {
    rows[donor][i] -= amounts[i];
    rows[recipient][i] += amounts[i];
    if (rows[donor][i] < 0.0)
      throw Error(ErrorKind::negative_result, "donor would hold a negative amount of variable " + std::to_string(i));
  }
  return rebuild(data, rows);
}

std::string_view to_string(LorenzOrder order) noexcept {
  switch (order) {
    case LorenzOrder::a_dominates: return "a_dominates";
    case LorenzOrder::b_dominates: return "b_dominates";
    case LorenzOrder::equal: return "equal";
    case LorenzOrder::incomparable: return "incomparable";
  }
  return "unknown";
}

std::string_view describe(LorenzOrder order) noexcept {
  switch (order) {
    case LorenzOrder::a_dominates: return "A >= B: A is more unequal than B";
    case LorenzOrder::b_dominates: return "B >= A: B is more unequal than A";
    case LorenzOrder::equal: return "A = B: identical surfaces";
    case LorenzOrder::incomparable: return "A, B incomparable: the surfaces cross";
  }
  return "";
}

LorenzOrder lorenz_order(const Dataset& a, const Dataset& b, const GridSpec& grid, std::size_t max_points) {
  if (a.dims() != b.dims()) throw Error(ErrorKind::dimension_mismatch, "datasets have different dimensions");
  if (grid.dims() != a.dims()) throw Error(ErrorKind::dimension_mismatch, "grid dimension differs from data");
  const auto pa = pseudo_observations(a);
  const auto pb = pseudo_observations(b);

  std::vector<std::vector<double>> knots;
  std::size_t points = 1;
  bool fits = true;
  for (std::size_t i = 0; i < a.dims(); ++i) {
    knots.push_back(merged_knots(grid.knots(i), pa, pb, i));
    if (points > max_points / knots.back().size()) fits = false;
    points *= knots.back().size();
  }
  const GridSpec lattice = fits ? GridSpec::from_knots(std::move(knots)) : grid;

  const auto sa = meilc_surface(pa, lattice);
  const auto sb = meilc_surface(pb, lattice);
  bool a_above = false;
  bool b_above = false;
  for (std::size_t k = 0; k < lattice.size(); ++k) {
    const double diff = sa.at(k) - sb.at(k);
    if (diff > kOrderTolerance) a_above = true;
    if (diff < -kOrderTolerance) b_above = true;
  }
  if (a_above && b_above) return LorenzOrder::incomparable;
  if (a_above) return LorenzOrder::a_dominates;
  if (b_above) return LorenzOrder::b_dominates;
  return LorenzOrder::equal;
}

TransferSpec parse_transfer_spec(std::string_view json_line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse_error, std::string("transfer spec: ") + e.what());
  }
  auto index = [&](const char* key) -> std::size_t {
    if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() < 0)
      throw Error(ErrorKind::parse_error, std::string("transfer spec needs a non-negative integer '") + key + "'");
    return j[key].get<std::size_t>();
  };
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw Error(ErrorKind::parse_error, "transfer spec needs a string 'kind'");
  const auto kind = j["kind"].get<std::string>();
  if (kind == "cit") return {TransferKind::cit, index("t"), index("z"), {}};
  if (kind == "pdbt") {
    if (!j.contains("amounts") || !j["amounts"].is_array())
      throw Error(ErrorKind::parse_error, "pdbt spec needs an 'amounts' array");
    std::vector<double> amounts;
    for (const auto& v : j["amounts"]) {
      if (!v.is_number()) throw Error(ErrorKind::parse_error, "pdbt amounts must be numbers");
      amounts.push_back(v.get<double>());
    }
    return {TransferKind::pdbt, index("from"), index("to"), std::move(amounts)};
  }
  throw Error(ErrorKind::parse_error, "unknown transfer kind '" + kind + "'");
}

std::string to_json(const TransferRecord& record) {
  nlohmann::ordered_json j;
  j["kind"] = record.kind == TransferKind::cit ? "cit" : "pdbt";
  j["actors"] = {record.actors.first, record.actors.second};
  if (record.amounts) j["amounts"] = *record.amounts;
  j["before_megc"] = record.before_megc;
  j["after_megc"] = record.after_megc;
  return j.dump();
}

TransferRun apply_transfers(const Dataset& data, std::span<const TransferSpec> transfers) {
  TransferRun run{data, {}};
  double current = transfers.empty() ? 0.0 : megc_of(data);
  for (const auto& spec : transfers) {
    Dataset next = spec.kind == TransferKind::cit ? apply_cit(run.result, spec.from, spec.to)
                                                  : apply_pdbt(run.result, spec.from, spec.to, spec.amounts);
    const double after = megc_of(next);
    TransferRecord rec{spec.kind, {spec.from, spec.to}, std::nullopt, current, after};
    if (spec.kind == TransferKind::pdbt) rec.amounts = spec.amounts;
    run.records.push_back(std::move(rec));
    run.result = std::move(next);
    current = after;
  }
  return run;
}

std::vector<TransferRecord> audit_cim(const Dataset& data,
                                      std::span<const std::pair<std::size_t, std::size_t>> cits) {
  std::vector<TransferSpec> specs;
  for (const auto& [t, z] : cits) specs.push_back({TransferKind::cit, t, z, {}});
  return apply_transfers(data, specs).records;
}

}  // namespace mvlorenz
