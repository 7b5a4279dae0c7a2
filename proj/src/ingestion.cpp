#include "mvlorenz/ingestion.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "json.hpp"
#include "mvlorenz/error.hpp"
#include "mvlorenz/summation.hpp"

namespace mvlorenz {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string> split_record(const std::string& line, char delim, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur.push_back('"');
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delim) {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorKind::parse_error, "line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::size_t RawTable::column_index(std::string_view name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return k;
  throw Error(ErrorKind::missing_column, "column '" + std::string(name) + "' not found");
}

RawTable parse_table(std::istream& in, const TableOptions& options) {
  RawTable table;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool have_shape = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_record(line, options.delimiter, line_no);
    if (!have_shape) {
      width = fields.size();
      have_shape = true;
      table.columns.resize(width);
      if (options.has_header) {
        for (auto& f : fields) table.names.emplace_back(trim(f));
        continue;
      }
      for (std::size_t k = 0; k < width; ++k) table.names.push_back("col" + std::to_string(k + 1));
    }
    if (fields.size() != width)
      throw Error(ErrorKind::parse_error, "line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                                              " fields, found " + std::to_string(fields.size()));
    for (std::size_t k = 0; k < width; ++k) table.columns[k].push_back(parse_number(fields[k]));
    ++table.rows;
  }
  for (const auto& name : options.required_columns) table.column_index(name);
  return table;
}

RawTable load_table(const std::filesystem::path& path, const TableOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "'");
  return parse_table(in, options);
}

PipelineConfig PipelineConfig::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config_error, e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::config_error, "config must be a JSON object");
  PipelineConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "value_columns") {
        cfg.value_columns = value.get<std::vector<std::string>>();
      } else if (key == "weight_column") {
        if (!value.is_null()) cfg.weight_column = value.get<std::string>();
      } else if (key == "household_size_column") {
        if (!value.is_null()) cfg.household_size_column = value.get<std::string>();
      } else if (key == "drop_negative") {
        cfg.drop_negative = value.get<bool>();
      } else if (key == "equivalize_exponent") {
        cfg.equivalize_exponent = value.get<double>();
      } else if (key == "replicate") {
        if (!value.is_null()) cfg.replicate = value.get<bool>();
      } else if (key == "outlier_sigma") {
        cfg.outlier_sigma = value.get<double>();
      } else if (key == "outlier_stats") {
        const auto s = value.get<std::string>();
        if (s == "post_replication") cfg.outlier_stats = OutlierStats::post_replication;
        else if (s == "pre_replication") cfg.outlier_stats = OutlierStats::pre_replication;
        else throw Error(ErrorKind::config_error, "outlier_stats must be post_replication or pre_replication");
      } else if (key == "replication_cap") {
        cfg.replication_cap = value.get<std::size_t>();
      } else {
        throw Error(ErrorKind::config_error, "unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config_error, e.what());
  }
  return cfg;
}

std::string DropReport::to_json() const {
  nlohmann::ordered_json j;
  j["input_rows"] = input_rows;
  j["incomplete"] = incomplete;
  j["negative"] = negative;
  j["zero_replication"] = zero_replication;
  j["outliers"] = outliers;
  j["kept_rows"] = kept_rows;
  j["output_rows"] = output_rows;
  j["materialized"] = materialized;
  j["weighted_fallback"] = weighted_fallback;
  return j.dump();
}

PreprocessResult preprocess(const RawTable& table, const PipelineConfig& config) {
  if (config.value_columns.empty()) throw Error(ErrorKind::config_error, "no value columns configured");
  if (!(config.equivalize_exponent >= 0.0)) throw Error(ErrorKind::config_error, "equivalize_exponent must be >= 0");
  if (!(config.outlier_sigma >= 0.0)) throw Error(ErrorKind::config_error, "outlier_sigma must be >= 0");

  const std::size_t d = config.value_columns.size();
  std::vector<std::size_t> value_idx;
  for (const auto& name : config.value_columns) value_idx.push_back(table.column_index(name));
  const std::optional<std::size_t> weight_idx =
      config.weight_column ? std::optional(table.column_index(*config.weight_column)) : std::nullopt;
  const std::optional<std::size_t> size_idx =
      config.household_size_column ? std::optional(table.column_index(*config.household_size_column)) : std::nullopt;
  const bool replicate = config.replicates();

  struct Household {
    std::vector<double> values;
    double mass;  // K when replicating, real weight otherwise
  };
  std::vector<Household> kept;
  DropReport report;
  report.input_rows = table.rows;

  for (std::size_t r = 0; r < table.rows; ++r) {
    // (1) complete cases
    bool complete = true;
    std::vector<double> values(d);
    for (std::size_t i = 0; i < d; ++i) {
      const auto& cell = table.columns[value_idx[i]][r];
      if (!cell) complete = false;
      else values[i] = *cell;
    }
    double weight = 1.0;
    double members = 1.0;
    if (weight_idx) {
      const auto& cell = table.columns[*weight_idx][r];
      if (!cell || *cell < 0.0) complete = false;
      else weight = *cell;
    }
    if (size_idx) {
      const auto& cell = table.columns[*size_idx][r];
      if (!cell || *cell < 1.0 || std::floor(*cell) != *cell) complete = false;
      else members = *cell;
    }
    if (!complete) {
      ++report.incomplete;
      continue;
    }
    // (2) negatives
    if (config.drop_negative) {
      bool negative = false;
      for (double v : values) negative = negative || v < 0.0;
      if (negative) {
        ++report.negative;
        continue;
      }
    }
    // (3) equivalization
    if (size_idx && config.equivalize_exponent != 0.0) {
      const double scale = std::pow(members, config.equivalize_exponent);
      for (double& v : values) v /= scale;
    }
    // (4) replication multiplicity
    const double mass = replicate ? members * std::floor(weight) : members * weight;
    if (!(mass > 0.0)) {
      ++report.zero_replication;
      continue;
    }
    kept.push_back({std::move(values), mass});
  }

  // (5) outliers
  if (config.outlier_sigma > 0.0 && !kept.empty()) {
    const bool weighted = config.outlier_stats == OutlierStats::post_replication;
    std::vector<bool> drop(kept.size(), false);
    for (std::size_t i = 0; i < d; ++i) {
      CompensatedSum wsum;
      CompensatedSum xsum;
      for (const auto& h : kept) {
        const double w = weighted ? h.mass : 1.0;
        wsum.add(w);
        xsum.add(w * h.values[i]);
      }
      const double mu = xsum.value() / wsum.value();
      CompensatedSum ss;
      for (const auto& h : kept) {
        const double w = weighted ? h.mass : 1.0;
        ss.add(w * (h.values[i] - mu) * (h.values[i] - mu));
      }
      const double sigma = std::sqrt(ss.value() / wsum.value());
      if (!(sigma > 0.0)) continue;
      for (std::size_t k = 0; k < kept.size(); ++k)
        if (std::abs(kept[k].values[i] - mu) > config.outlier_sigma * sigma) drop[k] = true;
    }
    std::vector<Household> survivors;
    for (std::size_t k = 0; k < kept.size(); ++k) {
      if (drop[k]) ++report.outliers;
      else survivors.push_back(std::move(kept[k]));
    }
    kept = std::move(survivors);
  }

  if (kept.empty()) throw Error(ErrorKind::empty_result, "every row was removed by preprocessing");
  report.kept_rows = kept.size();

  double total_mass = 0.0;
  for (const auto& h : kept) total_mass += h.mass;
  report.materialized = replicate && total_mass <= static_cast<double>(config.replication_cap);
  report.weighted_fallback = replicate && !report.materialized;

  std::vector<double> cm;
  std::vector<double> weights;
  std::size_t n = 0;
  if (report.materialized) {
    n = static_cast<std::size_t>(total_mass);
    cm.reserve(n * d);
    for (std::size_t i = 0; i < d; ++i)
      for (const auto& h : kept)
        for (std::size_t c = 0; c < static_cast<std::size_t>(h.mass); ++c) cm.push_back(h.values[i]);
  } else {
    n = kept.size();
    cm.reserve(n * d);
    for (std::size_t i = 0; i < d; ++i)
      for (const auto& h : kept) cm.push_back(h.values[i]);
    for (const auto& h : kept) weights.push_back(h.mass);
  }
  report.output_rows = n;
  return {build_dataset_columns(std::move(cm), n, d, std::move(weights), config.value_columns), report};
}

std::string write_csv(const Dataset& data, bool with_weights) {
  std::string out;
  for (std::size_t i = 0; i < data.dims(); ++i) {
    if (i > 0) out += ',';
    out += data.var_names()[i];
  }
  if (with_weights) out += ",weight";
  out += '\n';
  for (std::size_t j = 0; j < data.rows(); ++j) {
    for (std::size_t i = 0; i < data.dims(); ++i) {
      if (i > 0) out += ',';
      out += format_g17(data.value(j, i));
    }
    if (with_weights) out += "," + format_g17(data.weight(j));
    out += '\n';
  }
  return out;
}

}  // namespace mvlorenz
