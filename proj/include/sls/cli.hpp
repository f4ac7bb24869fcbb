#pragma once

#include <string>
#include <vector>

namespace sls {

/// Command-line entry point. Subcommands: graph, fit, path, cv, diagnose,
/// simulate. Returns 0 on success, 1 on validation errors, 2 on numerical
/// failures.
int run_cli(const std::vector<std::string>& args);

}  // namespace sls
