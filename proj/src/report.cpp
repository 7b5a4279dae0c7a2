#include "mvlorenz/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mvlorenz/error.hpp"
#include "mvlorenz/lorenz.hpp"
#include "mvlorenz/summation.hpp"

namespace mvlorenz {
namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> midpoint_ranks(std::span<const double> x, std::span<const double> w) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  CompensatedSum before;
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t e = k;
    CompensatedSum group;
    while (e < order.size() && x[order[e]] == x[order[k]]) group.add(w[order[e++]]);
    const double mid = before.value() + 0.5 * group.value();
    for (std::size_t t = k; t < e; ++t) ranks[order[t]] = mid;
    before.merge(group);
    k = e;
  }
  return ranks;
}

double weighted_correlation(std::span<const double> a, std::span<const double> b, std::span<const double> w) {
  CompensatedSum sw;
  CompensatedSum sa;
  CompensatedSum sb;
  for (std::size_t j = 0; j < w.size(); ++j) {
    sw.add(w[j]);
    sa.add(w[j] * a[j]);
    sb.add(w[j] * b[j]);
  }
  const double ma = sa.value() / sw.value();
  const double mb = sb.value() / sw.value();
  CompensatedSum cab;
  CompensatedSum caa;
  CompensatedSum cbb;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double da = a[j] - ma;
    const double db = b[j] - mb;
    cab.add(w[j] * da * db);
    caa.add(w[j] * da * da);
    cbb.add(w[j] * db * db);
  }
  if (!(caa.value() > 0.0) || !(cbb.value() > 0.0)) return 0.0;
  return std::clamp(cab.value() / std::sqrt(caa.value() * cbb.value()), -1.0, 1.0);
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<std::vector<double>> spearman_matrix(const Dataset& data) {
  const std::size_t d = data.dims();
  std::vector<std::vector<double>> ranks;
  for (std::size_t i = 0; i < d; ++i) ranks.push_back(midpoint_ranks(data.column(i), data.weights()));
  std::vector<std::vector<double>> rho(d, std::vector<double>(d, 1.0));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b)
      rho[a][b] = rho[b][a] = weighted_correlation(ranks[a], ranks[b], data.weights());
  return rho;
}

InequalityReport report(const Dataset& data, std::string label) {
  InequalityReport r;
  r.entity = std::move(label);
  for (std::size_t i = 0; i < data.dims(); ++i)
    r.marginal_ginis.push_back(gini(data.column(i), data.weights(), GiniConvention::trapezoid));
  r.megc = megc(pseudo_observations(data));
  r.spearman_rho = spearman_matrix(data);
  r.n_effective = data.total_weight();
  return r;
}

std::string InequalityReport::to_json() const {
  nlohmann::ordered_json j;
  j["entity"] = entity;
  j["marginal_ginis"] = marginal_ginis;
  j["megc"] = megc;
  j["spearman_rho"] = spearman_rho;
  j["n_effective"] = n_effective;
  return j.dump();
}

std::vector<std::vector<bool>> DominanceGraph::reachability() const {
  const std::size_t n = nodes.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const auto& [a, b] : edges) reach[a][b] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t a = 0; a < n; ++a)
      if (reach[a][k])
        for (std::size_t b = 0; b < n; ++b)
          if (reach[k][b]) reach[a][b] = true;
  return reach;
}

DominanceGraph dominance_graph(std::span<const InequalityReport> reports, bool reduce) {
  DominanceGraph g;
  if (reports.empty()) return g;
  const std::size_t d = reports.front().dims();
  std::vector<std::size_t> order(reports.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (const auto& r : reports)
    if (r.dims() != d) throw Error(ErrorKind::dimension_mismatch, "reports cover different numbers of variables");
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return reports[a].entity < reports[b].entity; });
  for (std::size_t k = 1; k < order.size(); ++k)
    if (reports[order[k]].entity == reports[order[k - 1]].entity)
      throw Error(ErrorKind::invalid_argument, "duplicate entity '" + reports[order[k]].entity + "'");

  auto profile = [&](const InequalityReport& r) {
    std::vector<double> p = r.marginal_ginis;
    p.push_back(r.megc);
    return p;
  };
  for (std::size_t k : order) g.nodes.push_back(reports[k].entity);
  const std::size_t n = order.size();
  for (std::size_t a = 0; a < n; ++a) {
    const auto pa = profile(reports[order[a]]);
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const auto pb = profile(reports[order[b]]);
      bool all_ge = true;
      bool strict = false;
      for (std::size_t c = 0; c < pa.size(); ++c) {
        all_ge = all_ge && pa[c] >= pb[c];
        strict = strict || pa[c] > pb[c];
      }
      if (all_ge && strict) g.edges.emplace_back(a, b);
    }
  }

  if (reduce) {
    // Drop a -> c whenever c is reachable through some other successor b.
    const auto reach = g.reachability();
    std::vector<std::pair<std::size_t, std::size_t>> kept;
    for (const auto& [a, c] : g.edges) {
      bool implied = false;
      for (const auto& [a2, b] : g.edges)
        if (a2 == a && b != c && reach[b][c]) implied = true;
      if (!implied) kept.emplace_back(a, c);
    }
    g.edges = std::move(kept);
    g.reduced = true;
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

std::string export_dot(const DominanceGraph& graph) {
  std::string out = "digraph dominance {\n  rankdir=TB;\n";
  for (const auto& node : graph.nodes) out += "  " + dot_quote(node) + ";\n";
  for (const auto& [a, b] : graph.edges)
    out += "  " + dot_quote(graph.nodes[a]) + " -> " + dot_quote(graph.nodes[b]) + ";\n";
  out += "}\n";
  return out;
}

std::string export_surface(const MeilcSurface& surface, SurfaceFormat format) {
  const auto& grid = surface.grid();
  const std::size_t d = grid.dims();
  std::string out;
  if (format == SurfaceFormat::csv) {
    for (std::size_t i = 0; i < d; ++i) out += "u" + std::to_string(i + 1) + ",";
    out += "value\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
      for (double u : grid.point(k)) out += g17(u) + ",";
      out += g17(surface.at(k)) + "\n";
    }
    return out;
  }
  out = "{\"dimension\":" + std::to_string(d) + ",\"columns\":[";
  for (std::size_t i = 0; i < d; ++i) out += "\"u" + std::to_string(i + 1) + "\",";
  out += "\"value\"],\"rows\":[";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0) out += ",";
    out += "[";
    for (double u : grid.point(k)) out += g17(u) + ",";
    out += g17(surface.at(k)) + "]";
  }
  out += "]}\n";
  return out;
}

std::vector<std::vector<double>> parse_surface(std::string_view document, SurfaceFormat format) {
  std::vector<std::vector<double>> rows;
  if (format == SurfaceFormat::json) {
    try {
      const auto j = nlohmann::json::parse(document);
      for (const auto& row : j.at("rows")) rows.push_back(row.get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::parse_error, e.what());
    }
    return rows;
  }
  std::istringstream in{std::string(document)};
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t end = std::min(line.find(',', start), line.size());
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(line.data() + start, line.data() + end, v);
      if (ec != std::errc() || ptr != line.data() + end) throw Error(ErrorKind::parse_error, "bad surface cell");
      row.push_back(v);
      start = end + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mvlorenz
