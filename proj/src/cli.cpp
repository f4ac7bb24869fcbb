#include "sls/cli.hpp"

#include "sls/dataset.hpp"
#include "sls/graph.hpp"
#include "sls/laplacian.hpp"
#include "sls/oracle.hpp"
#include "sls/parallel.hpp"
#include "sls/serialize.hpp"
#include "sls/sim.hpp"
#include "sls/solver.hpp"
#include "sls/tuning.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace sls {

namespace {

struct DataArgs {
  std::string input;
  std::string response = "y";
  bool no_header = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--input", input, "CSV input file")->required();
    cmd->add_option("--response", response, "response column: name (with header) or 0-based index");
    cmd->add_flag("--no-header", no_header, "treat the first CSV line as data");
  }

  RawDataset load() const {
    ResponseColumn col;
    try {
      std::size_t pos = 0;
      const long idx = std::stol(response, &pos);
      if (pos == response.size())
        col = static_cast<Index>(idx);
      else
        col = response;
    } catch (const std::exception&) {
      col = response;
    }
    if (no_header && std::holds_alternative<std::string>(col))
      throw ValidationError("--response must be a column index when --no-header is set");
    return load_csv(input, !no_header, col);
  }
};

struct GraphArgs {
  std::string scheme = "none";
  std::string adjacency_file;
  double cutoff = 0.0;  // 0: scheme default
  double corr_threshold = 0.0;
  double alpha = 6.0;
  bool normalized = false;

  void attach(CLI::App* cmd, bool allow_file = true) {
    cmd->add_option("--scheme", scheme, "adjacency scheme: n1, n2, n3, n4 or none");
    if (allow_file)
      cmd->add_option("--adjacency", adjacency_file, "load the adjacency from a coordinate-list file");
    cmd->add_option("--cutoff", cutoff, "normal-scale threshold c for n1/n2 (default 3.09 / 3.29)");
    cmd->add_option("--corr-threshold", corr_threshold,
                    "direct correlation threshold in (0,1), overrides --cutoff");
    cmd->add_option("--alpha", alpha, "power-scheme exponent (default 6)");
    cmd->add_flag("--normalized", normalized, "use the normalized Laplacian");
  }

  std::optional<AdjacencyScheme> make_scheme() const {
    AdjacencyScheme s;
    if (scheme == "n1")
      s = AdjacencyScheme::n1(cutoff > 0 ? cutoff : 3.09);
    else if (scheme == "n2")
      s = AdjacencyScheme::n2(cutoff > 0 ? cutoff : 3.29);
    else if (scheme == "n3")
      s = AdjacencyScheme::n3(alpha);
    else if (scheme == "n4")
      s = AdjacencyScheme::n4(alpha);
    else if (scheme == "none")
      return std::nullopt;
    else
      throw ValidationError("unknown --scheme '" + scheme + "' (expected n1, n2, n3, n4 or none)");
    if (corr_threshold > 0) s.correlation_threshold = corr_threshold;
    return s;
  }

  /// Adjacency from file or from the data correlations; nullopt when neither
  /// a scheme nor a file was given.
  std::optional<AdjacencyMatrix> make_adjacency(const StandardizedDataset& ds) const {
    if (!adjacency_file.empty()) {
      AdjacencyMatrix adj = load_adjacency(adjacency_file);
      if (adj.p() != ds.p())
        throw ValidationError("adjacency file is " + std::to_string(adj.p()) + "x" +
                              std::to_string(adj.p()) + " but the data has p=" +
                              std::to_string(ds.p()) + " predictors");
      return adj;
    }
    const auto s = make_scheme();
    if (!s) return std::nullopt;
    return build_adjacency(correlations(ds), *s);
  }

  Laplacian make_laplacian(const StandardizedDataset& ds) const {
    const auto adj = make_adjacency(ds);
    if (!adj) return Laplacian::zero(ds.p());
    return build_laplacian(*adj, normalized);
  }
};

struct PenaltyArgs {
  std::string penalty = "mcp";
  double gamma = 3.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--penalty", penalty, "penalty: mcp, scad or l1 (default mcp)");
    cmd->add_option("--gamma", gamma, "concavity parameter (default 3)");
  }

  PenaltyConfig make(double lambda1 = 0.0) const {
    PenaltyConfig cfg;
    if (penalty == "mcp")
      cfg.kind = PenaltyKind::MCP;
    else if (penalty == "scad")
      cfg.kind = PenaltyKind::SCAD;
    else if (penalty == "l1")
      cfg.kind = PenaltyKind::L1;
    else
      throw ValidationError("unknown --penalty '" + penalty + "' (expected mcp, scad or l1)");
    cfg.gamma = gamma;
    cfg.lambda1 = lambda1;
    cfg.validate();
    return cfg;
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write output file '" + path + "'");
  out << text;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> grid;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    grid.push_back(std::stod(tok));
  }
  if (grid.empty()) throw ValidationError("empty grid specification '" + csv + "'");
  return grid;
}

SupportSet load_support(const std::string& path, const StandardizedDataset& ds) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open support file '" + path + "'");
  std::vector<Index> indices;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t pos = 0;
      const long idx = std::stol(tok, &pos);
      if (pos == tok.size()) {
        indices.push_back(static_cast<Index>(idx));
        continue;
      }
    } catch (const std::exception&) {
    }
    bool found = false;
    for (std::size_t j = 0; j < ds.column_names.size(); ++j) {
      if (ds.column_names[j] == tok) {
        indices.push_back(static_cast<Index>(j));
        found = true;
        break;
      }
    }
    if (!found)
      throw ValidationError("support file: '" + tok + "' is neither an index nor a column name");
  }
  if (indices.empty()) throw ValidationError("support file '" + path + "' is empty");
  return SupportSet::from(std::move(indices), ds.p());
}

Vector load_vector(const std::string& path, Index expected) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file '" + path + "'");
  std::vector<double> values;
  double v;
  while (in >> v) values.push_back(v);
  if (static_cast<Index>(values.size()) != expected)
    throw ValidationError("file '" + path + "' holds " + std::to_string(values.size()) +
                          " values, expected " + std::to_string(expected));
  return Eigen::Map<const Vector>(values.data(), expected);
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"sls: sparse Laplacian shrinkage regression"};
  app.require_subcommand(1);
  app.fallthrough();  // let --threads appear after the subcommand

  unsigned threads = default_thread_count();
  app.add_option("--threads", threads, "worker threads for grids/replicates")
      ->check(CLI::PositiveNumber);

  // --- graph ---------------------------------------------------------------
  auto* graph_cmd = app.add_subcommand("graph", "build the predictor graph from a CSV");
  DataArgs graph_data;
  GraphArgs graph_graph;
  std::string adjacency_out, laplacian_out;
  graph_data.attach(graph_cmd);
  graph_graph.attach(graph_cmd, /*allow_file=*/false);
  graph_cmd->add_option("--adjacency-out", adjacency_out, "write the adjacency coordinate list");
  graph_cmd->add_option("--laplacian-out", laplacian_out, "write the Laplacian coordinate list");

  // --- fit -----------------------------------------------------------------
  auto* fit_cmd = app.add_subcommand("fit", "single fit at given (lambda1, lambda2)");
  DataArgs fit_data;
  GraphArgs fit_graph;
  PenaltyArgs fit_penalty;
  double fit_l1 = 0.0, fit_l2 = 0.0;
  std::string fit_out;
  fit_data.attach(fit_cmd);
  fit_graph.attach(fit_cmd);
  fit_penalty.attach(fit_cmd);
  fit_cmd->add_option("--lambda1", fit_l1, "sparsity penalty level")->required();
  fit_cmd->add_option("--lambda2", fit_l2, "Laplacian penalty level")->required();
  fit_cmd->add_option("--output", fit_out, "fit JSON output path")->required();

  // --- path ----------------------------------------------------------------
  auto* path_cmd = app.add_subcommand("path", "warm-started lambda1 path at fixed lambda2");
  DataArgs path_data;
  GraphArgs path_graph;
  PenaltyArgs path_penalty;
  double path_l2 = 0.0;
  std::string path_out, path_l1_grid;
  path_data.attach(path_cmd);
  path_graph.attach(path_cmd);
  path_penalty.attach(path_cmd);
  path_cmd->add_option("--lambda2", path_l2, "Laplacian penalty level")->required();
  path_cmd->add_option("--lambda1-grid", path_l1_grid, "comma-separated descending lambda1 values");
  path_cmd->add_option("--output", path_out, "path JSON output")->required();

  // --- cv ------------------------------------------------------------------
  auto* cv_cmd = app.add_subcommand("cv", "V-fold cross-validation over the (lambda1,lambda2) grid");
  DataArgs cv_data;
  GraphArgs cv_graph;
  PenaltyArgs cv_penalty;
  int cv_folds = 5;
  std::uint64_t cv_seed = 1;
  std::string cv_out, cv_result_out, cv_surface_out, cv_l1_grid, cv_l2_grid;
  cv_data.attach(cv_cmd);
  cv_graph.attach(cv_cmd);
  cv_penalty.attach(cv_cmd);
  cv_cmd->add_option("--folds", cv_folds, "number of folds (default 5)");
  cv_cmd->add_option("--seed", cv_seed, "fold-assignment seed");
  cv_cmd->add_option("--lambda1-grid", cv_l1_grid, "comma-separated lambda1 grid");
  cv_cmd->add_option("--lambda2-grid", cv_l2_grid, "comma-separated lambda2 grid");
  cv_cmd->add_option("--output", cv_out, "refit fit JSON at the selected pair")->required();
  cv_cmd->add_option("--cv-out", cv_result_out, "full CV result JSON");
  cv_cmd->add_option("--surface-out", cv_surface_out, "cv_error surface TSV");

  // --- diagnose --------------------------------------------------------------
  auto* diag_cmd = app.add_subcommand("diagnose", "oracle-estimator diagnostics for a known support");
  DataArgs diag_data;
  GraphArgs diag_graph;
  double diag_l2 = 0.0, diag_l1 = 0.0, diag_gamma = 3.0, diag_sigma = 0.0, diag_eps = 0.1;
  std::string diag_support, diag_beta_true, diag_out;
  bool diag_conditions = false;
  diag_data.attach(diag_cmd);
  diag_graph.attach(diag_cmd);
  diag_cmd->add_option("--support", diag_support, "file of support indices or column names")->required();
  diag_cmd->add_option("--lambda2", diag_l2, "Laplacian penalty level")->required();
  diag_cmd->add_option("--beta-true", diag_beta_true,
                       "file with the true coefficients (default: plug in the oracle estimate)");
  diag_cmd->add_flag("--conditions", diag_conditions, "also evaluate the oracle-property conditions");
  diag_cmd->add_option("--lambda1", diag_l1, "lambda1 for the condition report");
  diag_cmd->add_option("--gamma", diag_gamma, "gamma for the condition report");
  diag_cmd->add_option("--sigma", diag_sigma, "noise level (default: residual estimate)");
  diag_cmd->add_option("--eps", diag_eps, "condition confidence parameter in (0, 1/3)");
  diag_cmd->add_option("--output", diag_out, "diagnostics JSON output")->required();

  // --- simulate --------------------------------------------------------------
  auto* sim_cmd = app.add_subcommand("simulate", "run a simulation study from a JSON config");
  std::string sim_config, sim_out;
  sim_cmd->add_option("--config", sim_config, "study configuration JSON")->required();
  sim_cmd->add_option("--output", sim_out, "summary table TSV output")->required();

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the help text or the parse error
    return code == 0 ? 0 : 1;
  }

  if (*graph_cmd) {
    const StandardizedDataset ds = standardize(graph_data.load());
    const auto scheme = graph_graph.make_scheme();
    if (!scheme) throw ValidationError("graph: --scheme is required");
    const AdjacencyMatrix adj = build_adjacency(correlations(ds), *scheme);
    if (adjacency_out.empty() && laplacian_out.empty())
      throw ValidationError("graph: nothing to do; give --adjacency-out and/or --laplacian-out");
    if (!adjacency_out.empty()) save_adjacency(adj, adjacency_out);
    if (!laplacian_out.empty())
      save_laplacian(build_laplacian(adj, graph_graph.normalized), laplacian_out);
    std::cout << "p=" << adj.p() << " edges=" << adj.edge_count() << "\n";
    return 0;
  }

  if (*fit_cmd) {
    const StandardizedDataset ds = standardize(fit_data.load());
    const Laplacian L = fit_graph.make_laplacian(ds);
    SlsHyperparams hyper;
    hyper.penalty = fit_penalty.make(fit_l1);
    hyper.lambda2 = fit_l2;
    const SlsFit result = fit(ds, L, hyper);
    write_json(fit_out, fit_to_json(result, ds));
    std::cout << "support=" << result.support().size() << " objective=" << result.objective
              << (result.converged ? "" : " (not converged)") << "\n";
    return 0;
  }

  if (*path_cmd) {
    const StandardizedDataset ds = standardize(path_data.load());
    const Laplacian L = path_graph.make_laplacian(ds);
    std::vector<double> grid =
        path_l1_grid.empty() ? default_grid(ds).lambda1 : parse_grid(path_l1_grid);
    const SlsPath result = fit_path(ds, L, grid, path_l2, path_penalty.make());
    write_json(path_out, path_to_json(result, ds));
    return 0;
  }

  if (*cv_cmd) {
    const RawDataset raw = cv_data.load();
    const StandardizedDataset ds = standardize(raw);
    const Laplacian L = cv_graph.make_laplacian(ds);
    CvGrids grids = default_grid(ds);
    if (!cv_l1_grid.empty()) grids.lambda1 = parse_grid(cv_l1_grid);
    if (!cv_l2_grid.empty()) grids.lambda2 = parse_grid(cv_l2_grid);
    const bool no_graph = cv_graph.adjacency_file.empty() && cv_graph.scheme == "none";
    if (no_graph && cv_l2_grid.empty()) grids.lambda2 = {0.0};
    const PenaltyConfig penalty = cv_penalty.make();
    const CvResult cv = cv_select(raw, L, grids, cv_folds, penalty, cv_seed, threads);

    SlsHyperparams hyper;
    hyper.penalty = penalty;
    hyper.penalty.lambda1 = cv.best_lambda1;
    hyper.lambda2 = cv.best_lambda2;
    const SlsFit refit = fit(ds, L, hyper);
    write_json(cv_out, fit_to_json(refit, ds));
    if (!cv_result_out.empty()) write_json(cv_result_out, cv_to_json(cv));
    if (!cv_surface_out.empty()) write_text(cv_surface_out, cv_surface_tsv(cv));
    std::cout << "best lambda1=" << cv.best_lambda1 << " lambda2=" << cv.best_lambda2
              << " cv_error=" << cv.best().cv_error << "\n";
    return 0;
  }

  if (*diag_cmd) {
    const StandardizedDataset ds = standardize(diag_data.load());
    const Laplacian L = diag_graph.make_laplacian(ds);
    const SupportSet support = load_support(diag_support, ds);
    std::optional<Vector> beta_true;
    if (!diag_beta_true.empty()) beta_true = load_vector(diag_beta_true, ds.p());
    const DiagnosticsReport report = diagnostics(ds, L, support, diag_l2, beta_true);
    nlohmann::json j = diagnostics_to_json(report);
    if (diag_conditions) {
      double sigma = diag_sigma;
      if (!(sigma > 0.0)) {
        // Residual noise estimate from the oracle fit.
        const Vector r = ds.y_c - ds.X_s * report.oracle_beta;
        const Index dof = std::max<Index>(1, ds.n() - support.cardinality());
        sigma = std::sqrt(r.squaredNorm() / static_cast<double>(dof));
      }
      j["conditions"] = oracle_property_conditions_to_json(oracle_property_conditions(
          ds, L, support, diag_l2, diag_l1, diag_gamma, sigma, diag_eps, beta_true));
    }
    write_json(diag_out, j);
    return 0;
  }

  if (*sim_cmd) {
    const StudySpec spec = load_study_spec(sim_config);
    const auto rows = run_study(spec.config, spec.methods, threads);
    write_text(sim_out, study_table_tsv(rows));
    int failed = 0;
    for (const auto& row : rows) {
      failed += row.n_failed;
      for (const auto& rec : row.replicates)
        if (!rec.ok)
          std::cerr << "warning: " << row.label << " replicate " << rec.replicate
                    << " failed: " << rec.error << "\n";
    }
    std::cout << study_table_tsv(rows);
    return failed == 0 ? 0 : 2;
  }

  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  try {
    return dispatch(args);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sls
