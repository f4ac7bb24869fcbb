#include "sls/cli.hpp"

#include "sls/rng.hpp"
#include "sls/serialize.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace sls;

namespace {

std::string write_file(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/sls_cli_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

std::string make_data_csv(const std::string& name, Index n = 40, Index p = 6,
                          double noise = 0.3) {
  Rng rng(1234);
  std::ostringstream csv;
  csv << "y";
  for (Index j = 0; j < p; ++j) csv << ",x" << j + 1;
  csv << "\n";
  for (Index i = 0; i < n; ++i) {
    Vector x(p);
    for (Index j = 0; j < p; ++j) x[j] = rng.normal() + (j > 0 ? 0.6 * x[j - 1] : 0.0);
    const double y = 1.5 * x[0] + 1.0 * x[1] + noise * rng.normal();
    csv << y;
    for (Index j = 0; j < p; ++j) csv << ',' << x[j];
    csv << "\n";
  }
  return write_file(name, csv.str());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli rejects unknown flags and missing files") {
  CHECK(run_cli({"fit", "--bogus"}) == 1);
  CHECK(run_cli({"nonsense"}) == 1);
  CHECK(run_cli({"fit", "--input", "/tmp/sls_cli_missing.csv", "--lambda1", "1", "--lambda2",
                 "0", "--output", "/tmp/sls_cli_out.json"}) == 1);
}

TEST_CASE("cli fit writes a JSON fit") {
  const std::string data = make_data_csv("fit.csv");
  const std::string out = "/tmp/sls_cli_fit.json";
  CHECK(run_cli({"fit", "--input", data, "--response", "y", "--lambda1", "0.2", "--lambda2",
                 "0.5", "--scheme", "n3", "--output", out}) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["hyperparameters"]["lambda1"] == 0.2);
  CHECK(j["hyperparameters"]["lambda2"] == 0.5);
  CHECK(j["coefficients"]["standardized"].size() == 6);
  CHECK(j["coefficients"]["original"].size() == 6);
  CHECK(j.contains("objective"));
  CHECK(j.contains("kkt_residual"));
  CHECK(j["converged"].is_boolean());
  std::remove(data.c_str());
  std::remove(out.c_str());
}

TEST_CASE("cli fit at lambda1 >= lambda_max yields the all-zero model") {
  const std::string data = make_data_csv("fitzero.csv");
  const std::string out = "/tmp/sls_cli_fitzero.json";
  CHECK(run_cli({"fit", "--input", data, "--lambda1", "1e9", "--lambda2", "0", "--output",
                 out}) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  for (const auto& v : j["coefficients"]["standardized"]) CHECK(v.get<double>() == 0.0);
  CHECK(j["support"].empty());
  std::remove(data.c_str());
  std::remove(out.c_str());
}

TEST_CASE("cli graph exports adjacency and Laplacian files") {
  const std::string data = make_data_csv("graph.csv");
  const std::string adj = "/tmp/sls_cli_adj.txt";
  const std::string lap = "/tmp/sls_cli_lap.txt";
  CHECK(run_cli({"graph", "--input", data, "--scheme", "n2", "--adjacency-out", adj,
                 "--laplacian-out", lap}) == 0);
  CHECK(slurp(adj).find("# p 6") == 0);
  CHECK(slurp(lap).find("# p 6") == 0);

  // Round trip through --adjacency.
  const std::string out = "/tmp/sls_cli_fit2.json";
  CHECK(run_cli({"fit", "--input", data, "--lambda1", "0.2", "--lambda2", "0.5", "--adjacency",
                 adj, "--output", out}) == 0);
  std::remove(data.c_str());
  std::remove(adj.c_str());
  std::remove(lap.c_str());
  std::remove(out.c_str());
}

TEST_CASE("cli path writes one fit per grid point") {
  const std::string data = make_data_csv("path.csv");
  const std::string out = "/tmp/sls_cli_path.json";
  CHECK(run_cli({"path", "--input", data, "--lambda2", "0.25", "--scheme", "n1",
                 "--lambda1-grid", "0.8,0.4,0.1", "--output", out}) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["fits"].size() == 3);
  CHECK(j["fits"][0]["lambda1"] == 0.8);
  std::remove(data.c_str());
  std::remove(out.c_str());
}

TEST_CASE("cli cv selects a pair, writes surfaces, and is seed-deterministic") {
  const std::string data = make_data_csv("cv.csv");
  const std::string out = "/tmp/sls_cli_cv_fit.json";
  const std::string cvout = "/tmp/sls_cli_cv.json";
  const std::string surf = "/tmp/sls_cli_cv.tsv";
  const std::vector<std::string> args{
      "cv",           "--input",  data,     "--response", "y",          "--scheme", "n1",
      "--folds",      "5",        "--seed", "7",          "--output",   out,
      "--cv-out",     cvout,      "--surface-out", surf,  "--lambda1-grid", "0.9,0.45,0.2,0.1",
      "--lambda2-grid", "0.25,1"};
  CHECK(run_cli(args) == 0);
  const std::string first = slurp(out) + slurp(cvout) + slurp(surf);
  const auto j = nlohmann::json::parse(slurp(cvout));
  CHECK(j["cells"].size() == 8);
  CHECK(j["folds"] == 5);
  CHECK(slurp(surf).find("lambda1\tlambda2\tcv_error\tse") == 0);

  CHECK(run_cli(args) == 0);
  CHECK(slurp(out) + slurp(cvout) + slurp(surf) == first);

  std::remove(data.c_str());
  std::remove(out.c_str());
  std::remove(cvout.c_str());
  std::remove(surf.c_str());
}

TEST_CASE("cli diagnose reports oracle diagnostics from a support file") {
  const std::string data = make_data_csv("diag.csv");
  const std::string support = write_file("support.txt", "x1 x2\n");
  const std::string out = "/tmp/sls_cli_diag.json";
  CHECK(run_cli({"diagnose", "--input", data, "--support", support, "--lambda2", "0.5",
                 "--scheme", "n1", "--conditions", "--lambda1", "0.3", "--output", out}) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["support"] == nlohmann::json::array({0, 1}));
  CHECK(j["oracle_beta"].size() == 6);
  CHECK(j.contains("C1"));
  CHECK(j.contains("c_min"));
  CHECK(j["conditions"].contains("convexity"));
  std::remove(data.c_str());
  std::remove(support.c_str());
  std::remove(out.c_str());
}

TEST_CASE("cli simulate runs a study config") {
  const std::string config = write_file("study.json", R"({
    "n": 30, "p": 10, "cluster_size": 5, "n_nonzero_clusters": 1,
    "structure": "I", "rho": 0.5,
    "coef_scenario": {"kind": "equal", "value": 0.5},
    "sigma": 0.5, "n_replicates": 2, "n_test": 20, "seed": 3,
    "methods": [
      {"label": "mcp", "penalty": "mcp", "lambda1_grid": [1.0, 0.4, 0.15]},
      {"label": "sls-n1", "penalty": "mcp", "scheme": "n1",
       "lambda1_grid": [1.0, 0.4, 0.15], "lambda2_grid": [0.5, 2.0]}
    ]})");
  const std::string out = "/tmp/sls_cli_table.tsv";
  CHECK(run_cli({"simulate", "--config", config, "--output", out}) == 0);
  const std::string table = slurp(out);
  CHECK(table.find("method\tpositives\ttrue_positives\tpmse_x100") == 0);
  CHECK(table.find("mcp\t") != std::string::npos);
  CHECK(table.find("sls-n1\t") != std::string::npos);

  // Same config, same bytes.
  const std::string out2 = "/tmp/sls_cli_table2.tsv";
  CHECK(run_cli({"simulate", "--config", config, "--output", out2, "--threads", "3"}) == 0);
  CHECK(slurp(out2) == table);

  std::remove(config.c_str());
  std::remove(out.c_str());
  std::remove(out2.c_str());
}

TEST_CASE("cli simulate rejects bad configs") {
  const std::string bad = write_file("bad.json", "{ not json");
  CHECK(run_cli({"simulate", "--config", bad, "--output", "/tmp/sls_cli_bad.tsv"}) == 1);
  const std::string empty_methods =
      write_file("nomethods.json", R"({"n": 30, "p": 10, "methods": []})");
  CHECK(run_cli({"simulate", "--config", empty_methods, "--output", "/tmp/sls_cli_bad.tsv"}) == 1);
  std::remove(bad.c_str());
  std::remove(empty_methods.c_str());
}
