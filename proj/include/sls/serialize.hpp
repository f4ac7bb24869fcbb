#pragma once

#include "sls/oracle.hpp"
#include "sls/sim.hpp"
#include "sls/solver.hpp"
#include "sls/tuning.hpp"

#include <json.hpp>

#include <string>

namespace sls {

nlohmann::json fit_to_json(const SlsFit& fit, const StandardizedDataset& ds);
nlohmann::json path_to_json(const SlsPath& path, const StandardizedDataset& ds);
nlohmann::json cv_to_json(const CvResult& cv);
nlohmann::json diagnostics_to_json(const DiagnosticsReport& report);
nlohmann::json oracle_property_conditions_to_json(const OraclePropertyReport& report);

/// Full cv_error surface as TSV: lambda1, lambda2, cv_error, se per line.
std::string cv_surface_tsv(const CvResult& cv);

/// Study configuration (JSON document with "n", "p", ..., "methods": [...]).
struct StudySpec {
  SimConfig config;
  std::vector<MethodSpec> methods;
};
StudySpec study_spec_from_json(const nlohmann::json& j);
StudySpec load_study_spec(const std::string& path);

}  // namespace sls
