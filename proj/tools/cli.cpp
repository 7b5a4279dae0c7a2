#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "mvlorenz/copula.hpp"
#include "mvlorenz/error.hpp"
#include "mvlorenz/ingestion.hpp"
#include "mvlorenz/lorenz.hpp"
#include "mvlorenz/meilc.hpp"
#include "mvlorenz/report.hpp"
#include "mvlorenz/transfers.hpp"

namespace mvlorenz::cli {
namespace {

struct Common {
  bool full_precision = false;
  std::size_t threads = 0;
};

std::string num(double v, bool full) {
  char buf[40];
  std::snprintf(buf, sizeof buf, full ? "%.17g" : "%.6g", v);
  return buf;
}

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw Error(ErrorKind::io_error, "cannot write '" + path + "'");
}

struct InputSpec {
  std::string path;
  std::vector<std::string> columns;
  std::string weight_column;
  char delimiter = ',';
};

void add_input_options(CLI::App* app, InputSpec& in, bool required = true) {
  auto* opt = app->add_option("-i,--input", in.path, "Delimited input file with a header row ('-' for stdin)");
  if (required) opt->required();
  app->add_option("-c,--columns", in.columns, "Value columns (default: every column except the weight column)")
      ->delimiter(',');
  app->add_option("-w,--weight-column", in.weight_column,
                  "Column holding positive row weights (default: a column named 'weight', if any)");
  app->add_option("--delimiter", in.delimiter, "Field delimiter");
}

// Analysis inputs must be complete: a missing or non-numeric cell is an error.
Dataset load_dataset(const InputSpec& in) {
  std::istringstream text(read_text(in.path));
  TableOptions opts;
  opts.delimiter = in.delimiter;
  const RawTable table = parse_table(text, opts);

  std::string weight_col = in.weight_column;
  if (weight_col.empty())
    for (const auto& n : table.names)
      if (n == "weight") weight_col = n;
  std::vector<std::string> cols = in.columns;
  if (cols.empty())
    for (const auto& n : table.names)
      if (n != weight_col) cols.push_back(n);
  if (table.rows == 0) throw Error(ErrorKind::invalid_argument, "input '" + in.path + "' has no data rows");

  std::vector<double> cm;
  for (const auto& name : cols) {
    const auto& col = table.columns[table.column_index(name)];
    for (std::size_t j = 0; j < table.rows; ++j) {
      if (!col[j])
        throw Error(ErrorKind::parse_error,
                    "row " + std::to_string(j + 1) + ", column '" + name + "': missing or non-numeric value");
      cm.push_back(*col[j]);
    }
  }
  std::vector<double> weights;
  if (!weight_col.empty()) {
    const auto& col = table.columns[table.column_index(weight_col)];
    for (std::size_t j = 0; j < table.rows; ++j) {
      if (!col[j]) throw Error(ErrorKind::parse_error, "row " + std::to_string(j + 1) + ": missing weight");
      weights.push_back(*col[j]);
    }
  }
  return build_dataset_columns(std::move(cm), table.rows, cols.size(), std::move(weights), cols);
}

std::vector<MarginalModel> power_margins(const std::vector<double>& exponents) {
  std::vector<MarginalModel> m;
  for (double a : exponents) m.push_back(MarginalModel::power(a));
  return m;
}

struct ModelSpec {
  std::string family;
  std::optional<double> rho;
  std::optional<double> theta;
  std::vector<double> margin_a;
  std::size_t dim = 0;
};

void add_model_options(CLI::App* app, ModelSpec& m) {
  app->add_option("--family", m.family, "independence|comonotone|countermonotone|gaussian|clayton|gumbel");
  auto* rho = app->add_option("--rho", m.rho, "Spearman's rho (calibrates the family parameter)");
  app->add_option("--theta", m.theta, "Family parameter (gaussian: correlation r)")->excludes(rho);
  app->add_option("--margin-a", m.margin_a, "Power exponents a of the margins L^-1(u) = u^a, one per variable")
      ->expected(1, -1);
  app->add_option("--dim", m.dim, "Dimension (default: number of margins)");
}

CopulaModel make_model(const ModelSpec& m, std::ostream& note, bool full) {
  const CopulaFamily family = parse_family(m.family);
  const std::size_t d = m.dim != 0 ? m.dim : std::max<std::size_t>(2, m.margin_a.size());
  double param = 0.0;
  if (m.theta) {
    param = *m.theta;
  } else if (m.rho) {
    if (d != 2 && family != CopulaFamily::gaussian)
      throw Error(ErrorKind::unsupported_dimension, "--rho calibration is bivariate; pass --theta for d >= 3");
    param = spearman_to_param(family, *m.rho);
  } else if (family == CopulaFamily::gumbel) {
    param = 1.0;
  } else if (family == CopulaFamily::clayton) {
    throw Error(ErrorKind::invalid_argument, "clayton needs --rho or --theta");
  }
  note << "family: " << to_string(family) << "\n";
  note << "parameter: " << num(param, full) << "\n";
  return CopulaModel(family, d, param);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, std::ostream& err) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  err << "seed: " << s << "\n";
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multivariate Lorenz surfaces and Gini coefficients from microdata", "mvlorenz"};
  app.require_subcommand(1);
  Common common;
  app.add_flag("--full-precision", common.full_precision, "Print numbers with 17 significant digits");
  app.add_option("--threads", common.threads, "Worker threads (default: MVLORENZ_THREADS or 1)");

  std::ostringstream buf;  // primary output, flushed only on success
  std::function<void()> action;

  // gini
  InputSpec gini_in;
  std::string convention = "trapezoid";
  auto* gini_cmd = app.add_subcommand("gini", "Univariate Gini coefficient of each column");
  add_input_options(gini_cmd, gini_in);
  gini_cmd->add_option("--convention", convention, "trapezoid|plugin")
      ->check(CLI::IsMember({"trapezoid", "plugin"}));
  gini_cmd->callback([&] {
    action = [&] {
      const Dataset data = load_dataset(gini_in);
      const auto conv = convention == "plugin" ? GiniConvention::plugin : GiniConvention::trapezoid;
      buf << "variable,gini\n";
      for (std::size_t i = 0; i < data.dims(); ++i)
        buf << data.var_names()[i] << "," << num(gini(data.column(i), data.weights(), conv), common.full_precision)
            << "\n";
    };
  });

  // megc
  InputSpec megc_in;
  auto* megc_cmd = app.add_subcommand("megc", "Multivariate Gini coefficient (with decomposition when d = 2)");
  add_input_options(megc_cmd, megc_in);
  megc_cmd->callback([&] {
    action = [&] {
      const Dataset data = load_dataset(megc_in);
      const auto pseudo = pseudo_observations(data);
      const bool full = common.full_precision;
      buf << "megc: " << num(megc(pseudo), full) << "\n";
      if (data.dims() == 2) {
        const auto dec = megc_decomposition(pseudo);
        buf << "cross_moment: " << num(dec.cross_moment, full) << "\n";
        buf << "g1_plugin: " << num(dec.g1, full) << "\n";
        buf << "g2_plugin: " << num(dec.g2, full) << "\n";
        buf << "decomposition: " << num(dec.megc, full) << "\n";
        if (dec.g1 >= 0.0 && dec.g1 <= 1.0 && dec.g2 >= 0.0 && dec.g2 <= 1.0) {
          const auto [lo, hi] = megc_bounds(dec.g1, dec.g2);
          buf << "lower_bound: " << num(lo, full) << "\n";
          buf << "upper_bound: " << num(hi, full) << "\n";
        }
      }
    };
  });

  // pseudo
  InputSpec pseudo_in;
  auto* pseudo_cmd = app.add_subcommand("pseudo", "Pseudo-observations (cumulative value shares) as CSV");
  add_input_options(pseudo_cmd, pseudo_in);
  pseudo_cmd->callback([&] {
    action = [&] {
      const Dataset data = load_dataset(pseudo_in);
      const auto pseudo = pseudo_observations(data);
      for (std::size_t i = 0; i < data.dims(); ++i) buf << (i ? "," : "") << data.var_names()[i];
      buf << "\n";
      for (std::size_t j = 0; j < pseudo.rows(); ++j) {
        for (std::size_t i = 0; i < pseudo.dims(); ++i)
          buf << (i ? "," : "") << num(pseudo.star(j, i), common.full_precision);
        buf << "\n";
      }
    };
  });

  // surface
  InputSpec surface_in;
  ModelSpec surface_model;
  std::size_t grid_m = 101;
  std::string surface_format = "csv";
  std::uint64_t surface_seed = 0;
  auto* surface_cmd = app.add_subcommand("surface", "Empirical (--input) or parametric (--family) surface on a grid");
  add_input_options(surface_cmd, surface_in, false);
  add_model_options(surface_cmd, surface_model);
  surface_cmd->add_option("--grid", grid_m, "Knots per axis")->check(CLI::Range(2, 100000));
  surface_cmd->add_option("--format", surface_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  surface_cmd->add_option("--seed", surface_seed, "Seed for Monte Carlo CDF evaluation (gaussian, d >= 3)");
  surface_cmd->callback([&] {
    action = [&] {
      const auto fmt = surface_format == "json" ? SurfaceFormat::json : SurfaceFormat::csv;
      if (!surface_in.path.empty() == !surface_model.family.empty())
        throw Error(ErrorKind::invalid_argument, "surface needs exactly one of --input or --family");
      if (!surface_in.path.empty()) {
        const Dataset data = load_dataset(surface_in);
        const auto pseudo = pseudo_observations(data);
        buf << export_surface(meilc_surface(pseudo, GridSpec::uniform(data.dims(), grid_m)), fmt);
        return;
      }
      std::ostringstream note;
      const CopulaModel model = make_model(surface_model, note, common.full_precision);
      auto exps = surface_model.margin_a;
      if (exps.empty()) exps.assign(model.dim(), 1.0);
      const auto margins = power_margins(exps);
      const GridSpec grid = GridSpec::uniform(model.dim(), grid_m);
      std::vector<double> values(grid.size());
      const McOptions mc{100000, surface_seed, common.threads};
      for (std::size_t k = 0; k < grid.size(); ++k) values[k] = parametric_meilc(model, margins, grid.point(k), mc);
      buf << export_surface(MeilcSurface(grid, std::move(values)), fmt);
    };
  });

  // simulate
  ModelSpec sim_model;
  std::string method;
  std::size_t count = 1000000;
  std::optional<std::uint64_t> seed;
  auto* sim_cmd = app.add_subcommand("simulate", "Coefficient of a parametric copula/margin model");
  add_model_options(sim_cmd, sim_model);
  sim_cmd->get_option("--family")->required();
  sim_cmd->add_option("--method", method, "mc|quadrature|both (default: both for d = 2, else mc)")
      ->check(CLI::IsMember({"mc", "quadrature", "both"}));
  sim_cmd->add_option("--count", count, "Monte Carlo draws");
  sim_cmd->add_option("--seed", seed, "Monte Carlo seed (drawn and reported when absent)");
  sim_cmd->callback([&] {
    action = [&] {
      const bool full = common.full_precision;
      const CopulaModel model = make_model(sim_model, buf, full);
      auto exps = sim_model.margin_a;
      if (exps.empty()) exps.assign(model.dim(), 1.0);
      if (exps.size() != model.dim()) throw Error(ErrorKind::dimension_mismatch, "need one --margin-a per variable");
      const auto margins = power_margins(exps);
      std::vector<double> ginis;
      for (const auto& m : margins) ginis.push_back(m.gini());
      buf << "marginal_ginis:";
      for (double g : ginis) buf << " " << num(g, full);
      buf << "\n";
      const std::string how = method.empty() ? (model.dim() == 2 ? "both" : "mc") : method;
      if (how == "quadrature" || how == "both") {
        const auto q = parametric_megc_quadrature(model, margins, common.threads);
        buf << "quadrature: " << num(q.value, full) << " (error estimate " << num(q.std_error, full) << ")\n";
      }
      if (how == "mc" || how == "both") {
        const McOptions mc{count, resolve_seed(seed, err), common.threads};
        const auto e = parametric_megc_mc(model, margins, mc);
        buf << "mc: " << num(e.value, full) << " +/- " << num(e.std_error, full) << " (count " << mc.count
            << ", seed " << mc.seed << ")\n";
      }
    };
  });

  // transfer
  InputSpec transfer_in;
  std::string specs_path;
  std::string transfer_output;
  auto* transfer_cmd = app.add_subcommand("transfer", "Apply JSON-lines transfer specs and audit the coefficient");
  add_input_options(transfer_cmd, transfer_in);
  transfer_cmd->add_option("--specs", specs_path, "JSON-lines file of transfers")->required();
  transfer_cmd->add_option("-o,--output", transfer_output, "Write the transformed data as CSV");
  transfer_cmd->callback([&] {
    action = [&] {
      const Dataset data = load_dataset(transfer_in);
      std::vector<TransferSpec> specs;
      std::istringstream lines(read_text(specs_path));
      for (std::string line; std::getline(lines, line);)
        if (line.find_first_not_of(" \t\r") != std::string::npos) specs.push_back(parse_transfer_spec(line));
      const auto result = apply_transfers(data, specs);
      for (const auto& r : result.records) buf << to_json(r) << "\n";
      if (!transfer_output.empty()) {
        bool unit = true;
        for (double w : result.result.weights()) unit = unit && w == 1.0;
        write_text(transfer_output, write_csv(result.result, !unit));
      }
    };
  });

  // compare
  std::vector<std::string> compare_inputs;
  std::vector<std::string> labels;
  std::string summary_path;
  std::string dot_path;
  std::string compare_weight;
  bool no_reduce = false;
  bool lorenz_pairs = false;
  std::size_t compare_grid = 101;
  auto* compare_cmd = app.add_subcommand("compare", "Reports for several populations and their dominance graph");
  compare_cmd->add_option("-i,--input", compare_inputs, "Population data files")->expected(1, -1);
  compare_cmd->add_option("--labels", labels, "Labels (default: file stems)")->expected(1, -1);
  compare_cmd->add_option("-w,--weight-column", compare_weight, "Weight column name");
  compare_cmd->add_option("--summary", summary_path, "CSV of published summaries: label, marginal Ginis..., megc");
  compare_cmd->add_option("--dot", dot_path, "Write the DOT graph here instead of stdout");
  compare_cmd->add_flag("--no-reduce", no_reduce, "Keep transitive edges");
  compare_cmd->add_flag("--lorenz-order", lorenz_pairs, "Also compare every pair of input surfaces");
  compare_cmd->add_option("--grid", compare_grid, "Knots per axis for --lorenz-order")->check(CLI::Range(2, 100000));
  compare_cmd->callback([&] {
    action = [&] {
      if (compare_inputs.empty() && summary_path.empty())
        throw Error(ErrorKind::invalid_argument, "compare needs --input files or --summary");
      if (!labels.empty() && labels.size() != compare_inputs.size())
        throw Error(ErrorKind::invalid_argument, "need one label per input");
      std::vector<InequalityReport> reports;
      std::vector<Dataset> datasets;
      for (std::size_t k = 0; k < compare_inputs.size(); ++k) {
        InputSpec spec{compare_inputs[k], {}, compare_weight, ','};
        datasets.push_back(load_dataset(spec));
        const std::string label =
            labels.empty() ? std::filesystem::path(compare_inputs[k]).stem().string() : labels[k];
        reports.push_back(report(datasets.back(), label));
      }
      if (!summary_path.empty()) {
        std::istringstream text(read_text(summary_path));
        std::string line;
        std::getline(text, line);  // header
        while (std::getline(text, line)) {
          if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
          std::vector<std::string> cells;
          std::stringstream ss(line);
          for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
          if (cells.size() < 3) throw Error(ErrorKind::parse_error, "summary rows need label, Ginis and megc");
          InequalityReport r;
          r.entity = cells.front();
          try {
            for (std::size_t c = 1; c + 1 < cells.size(); ++c) r.marginal_ginis.push_back(std::stod(cells[c]));
            r.megc = std::stod(cells.back());
          } catch (const std::exception&) {
            throw Error(ErrorKind::parse_error, "non-numeric summary value in '" + line + "'");
          }
          reports.push_back(std::move(r));
        }
      }
      for (const auto& r : reports) buf << r.to_json() << "\n";
      if (lorenz_pairs) {
        for (std::size_t a = 0; a < datasets.size(); ++a)
          for (std::size_t b = a + 1; b < datasets.size(); ++b) {
            const auto order =
                lorenz_order(datasets[a], datasets[b], GridSpec::uniform(datasets[a].dims(), compare_grid));
            buf << "order " << reports[a].entity << " vs " << reports[b].entity << ": " << to_string(order) << " ("
                << describe(order) << ")\n";
          }
      }
      const auto graph = dominance_graph(reports, !no_reduce);
      if (dot_path.empty()) buf << export_dot(graph);
      else write_text(dot_path, export_dot(graph));
    };
  });

  // ingest
  std::string ingest_input;
  std::string config_path;
  std::string ingest_output;
  std::string report_path;
  char ingest_delim = ',';
  auto* ingest_cmd = app.add_subcommand("ingest", "Preprocess household survey data into analysis-ready CSV");
  ingest_cmd->add_option("-i,--input", ingest_input, "Raw delimited file")->required();
  ingest_cmd->add_option("--config", config_path, "Pipeline config (JSON)")->required();
  ingest_cmd->add_option("-o,--output", ingest_output, "Write processed CSV here instead of stdout");
  ingest_cmd->add_option("--report", report_path, "Write the drop report JSON here instead of stderr");
  ingest_cmd->add_option("--delimiter", ingest_delim, "Field delimiter");
  ingest_cmd->callback([&] {
    action = [&] {
      const auto config = PipelineConfig::from_json(read_text(config_path));
      std::istringstream text(read_text(ingest_input));
      TableOptions opts;
      opts.delimiter = ingest_delim;
      const auto table = parse_table(text, opts);
      const auto result = preprocess(table, config);
      const std::string csv = write_csv(result.data, !result.report.materialized);
      if (result.report.weighted_fallback)
        err << "warning: replication exceeds the cap; writing weighted rows instead\n";
      if (ingest_output.empty()) buf << csv;
      else write_text(ingest_output, csv);
      if (report_path.empty()) err << result.report.to_json() << "\n";
      else write_text(report_path, result.report.to_json() + "\n");
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }

  try {
    if (action) action();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::io_error ? kIo : kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  out << buf.str();
  return kOk;
}

}  // namespace mvlorenz::cli
