#include "sls/serialize.hpp"

#include <fstream>
#include <sstream>

namespace sls {

namespace {

using nlohmann::json;

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

const char* penalty_name(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::MCP: return "mcp";
    case PenaltyKind::SCAD: return "scad";
    case PenaltyKind::L1: return "l1";
  }
  return "mcp";
}

PenaltyKind penalty_from_name(const std::string& name) {
  if (name == "mcp") return PenaltyKind::MCP;
  if (name == "scad") return PenaltyKind::SCAD;
  if (name == "l1") return PenaltyKind::L1;
  throw ValidationError("unknown penalty '" + name + "' (expected mcp, scad or l1)");
}

}  // namespace

json fit_to_json(const SlsFit& fit, const StandardizedDataset& ds) {
  const OriginalScaleCoefs orig = coefficients_to_original_scale(fit.beta, ds);
  json j;
  j["hyperparameters"] = {{"lambda1", fit.hyper.lambda1()},
                          {"lambda2", fit.hyper.lambda2},
                          {"penalty", penalty_name(fit.hyper.penalty.kind)},
                          {"gamma", fit.hyper.penalty.gamma}};
  j["coefficients"] = {{"standardized", vector_to_json(fit.beta)},
                       {"original", vector_to_json(orig.coefs)},
                       {"intercept", orig.intercept}};
  json support = json::array();
  for (const Index idx : fit.support()) support.push_back(idx);
  j["support"] = support;
  j["objective"] = fit.objective;
  j["kkt_residual"] = fit.kkt_residual;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  if (fit.possibly_nonunique) j["possibly_nonunique"] = true;
  return j;
}

json path_to_json(const SlsPath& path, const StandardizedDataset& ds) {
  json j;
  j["lambda2"] = path.lambda2;
  j["penalty"] = penalty_name(path.penalty.kind);
  j["gamma"] = path.penalty.gamma;
  json fits = json::array();
  for (std::size_t i = 0; i < path.fits.size(); ++i) {
    json f = fit_to_json(path.fits[i], ds);
    f["lambda1"] = path.lambda1_grid[i];
    fits.push_back(std::move(f));
  }
  j["fits"] = std::move(fits);
  return j;
}

json cv_to_json(const CvResult& cv) {
  json j;
  j["best"] = {{"lambda1", cv.best_lambda1},
               {"lambda2", cv.best_lambda2},
               {"cv_error", cv.best().cv_error},
               {"se", cv.best().se}};
  j["folds"] = cv.folds;
  j["seed"] = cv.seed;
  j["fold_assignment"] = cv.fold_assignment;
  json cells = json::array();
  for (const auto& cell : cv.cells)
    cells.push_back({{"lambda1", cell.lambda1},
                     {"lambda2", cell.lambda2},
                     {"cv_error", cell.cv_error},
                     {"se", cell.se}});
  j["cells"] = std::move(cells);
  return j;
}

json diagnostics_to_json(const DiagnosticsReport& report) {
  json j;
  json support = json::array();
  for (const Index idx : report.support.indices) support.push_back(idx);
  j["support"] = std::move(support);
  j["lambda2"] = report.lambda2;
  j["oracle_beta"] = vector_to_json(report.oracle_beta);
  j["target_beta"] = vector_to_json(report.target_beta);
  j["C1"] = report.C1;
  j["C2"] = report.C2;
  j["c_min"] = report.c_min;
  j["v_diag"] = vector_to_json(report.v_diag);
  j["unbiased"] = report.unbiased;
  j["unbiased_residual"] = report.unbiased_residual;
  return j;
}

json oracle_property_conditions_to_json(const OraclePropertyReport& report) {
  auto clause = [](const ConditionClause& c) {
    return json{{"name", c.name},
                {"value", c.value},
                {"threshold", c.threshold},
                {"pass", c.pass},
                {"applicable", c.applicable}};
  };
  json j;
  j["convexity"] = clause(report.convexity);
  j["penalty_level"] = clause(report.penalty_level);
  j["beta_magnitude"] = clause(report.beta_magnitude);
  j["C1"] = report.C1;
  j["C2"] = report.C2;
  json src = json::array();
  for (const auto& check : report.src) {
    json s;
    s["subset"] = check.subset;
    s["min_eig"] = check.min_eig;
    s["max_eig"] = check.max_eig;
    src.push_back(std::move(s));
  }
  j["src_spot_checks"] = std::move(src);
  return j;
}

std::string cv_surface_tsv(const CvResult& cv) {
  std::ostringstream out;
  out.precision(12);
  out << "lambda1\tlambda2\tcv_error\tse\n";
  for (const auto& cell : cv.cells)
    out << cell.lambda1 << '\t' << cell.lambda2 << '\t' << cell.cv_error << '\t' << cell.se << '\n';
  return out.str();
}

StudySpec study_spec_from_json(const json& j) {
  StudySpec spec;
  SimConfig& cfg = spec.config;
  cfg.n = j.value("n", cfg.n);
  cfg.p = j.value("p", cfg.p);
  cfg.cluster_size = j.value("cluster_size", cfg.cluster_size);
  cfg.n_nonzero_clusters = j.value("n_nonzero_clusters", cfg.n_nonzero_clusters);
  if (j.contains("structure")) {
    const std::string s = j["structure"];
    if (s == "I" || s == "i" || s == "1")
      cfg.structure = Structure::I;
    else if (s == "II" || s == "ii" || s == "2")
      cfg.structure = Structure::II;
    else
      throw ValidationError("study config: structure must be \"I\" or \"II\"");
  }
  cfg.rho = j.value("rho", cfg.rho);
  if (j.contains("coef_scenario")) {
    const json& c = j["coef_scenario"];
    const std::string kind = c.value("kind", "equal");
    if (kind == "equal") {
      cfg.coef.kind = CoefScenario::Kind::Equal;
      cfg.coef.value = c.value("value", cfg.coef.value);
    } else if (kind == "uniform") {
      cfg.coef.kind = CoefScenario::Kind::Uniform;
      cfg.coef.lo = c.value("lo", cfg.coef.lo);
      cfg.coef.hi = c.value("hi", cfg.coef.hi);
    } else {
      throw ValidationError("study config: coef_scenario.kind must be \"equal\" or \"uniform\"");
    }
  }
  cfg.sigma = j.value("sigma", cfg.sigma);
  cfg.n_replicates = j.value("n_replicates", cfg.n_replicates);
  cfg.n_test = j.value("n_test", cfg.n_test);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.validate();

  if (!j.contains("methods") || !j["methods"].is_array() || j["methods"].empty())
    throw ValidationError("study config: a nonempty \"methods\" array is required");
  for (const json& m : j["methods"]) {
    MethodSpec method;
    method.label = m.value("label", "method" + std::to_string(spec.methods.size() + 1));
    method.penalty = penalty_from_name(m.value("penalty", "mcp"));
    method.gamma = m.value("gamma", method.gamma);
    method.folds = m.value("folds", method.folds);
    method.normalized_laplacian = m.value("normalized_laplacian", false);
    if (m.contains("scheme") && !m["scheme"].is_null()) {
      const std::string s = m["scheme"];
      if (s == "n1")
        method.scheme = AdjacencyScheme::n1(m.value("cutoff", 3.09));
      else if (s == "n2")
        method.scheme = AdjacencyScheme::n2(m.value("cutoff", 3.29));
      else if (s == "n3")
        method.scheme = AdjacencyScheme::n3(m.value("alpha", 6.0));
      else if (s == "n4")
        method.scheme = AdjacencyScheme::n4(m.value("alpha", 6.0));
      else if (s != "none")
        throw ValidationError("study config: scheme must be n1, n2, n3, n4 or none");
    }
    if (m.contains("lambda1_grid"))
      method.lambda1_grid = m["lambda1_grid"].get<std::vector<double>>();
    if (m.contains("lambda2_grid"))
      method.lambda2_grid = m["lambda2_grid"].get<std::vector<double>>();
    spec.methods.push_back(std::move(method));
  }
  return spec;
}

StudySpec load_study_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("study config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("study config: invalid JSON in '" + path + "': " + e.what());
  }
  return study_spec_from_json(j);
}

}  // namespace sls
