#pragma once

#include "sls/dataset.hpp"
#include "sls/graph.hpp"
#include "sls/oracle.hpp"
#include "sls/solver.hpp"
#include "sls/tuning.hpp"
#include "sls/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sls {

enum class Structure { I, II };  // block-AR(1) clusters vs global AR(1)

struct CoefScenario {
  enum class Kind { Equal, Uniform };
  Kind kind = Kind::Equal;
  double value = 0.5;  // Equal
  double lo = 0.25, hi = 0.75;  // Uniform
};

struct SimConfig {
  Index n = 100;
  Index p = 500;
  Index cluster_size = 5;
  Index n_nonzero_clusters = 5;
  Structure structure = Structure::I;
  double rho = 0.5;
  CoefScenario coef;
  double sigma = 1.0;
  int n_replicates = 50;
  Index n_test = 100;
  std::uint64_t seed = 1;

  void validate() const;
  Index n_nonzero() const { return n_nonzero_clusters * cluster_size; }
};

/// Gaussian design with unit marginal variances: correlation rho^{|i-j|}
/// within clusters (structure I, clusters independent) or across all columns
/// (structure II), sampled through the analytic AR(1) bidiagonal factor.
Matrix generate_design(const SimConfig& cfg, std::uint64_t replicate_seed,
                       std::optional<Index> rows = std::nullopt);

/// True coefficients: the first n_nonzero_clusters * cluster_size coordinates
/// per scenario, zeros elsewhere.
std::pair<Vector, SupportSet> make_coefficients(const SimConfig& cfg, std::uint64_t replicate_seed);

Vector generate_response(const Matrix& X, const Eigen::Ref<const Vector>& beta, double sigma,
                         std::uint64_t seed);

struct ReplicateMetrics {
  Index positives = 0;       // selected variables
  Index true_positives = 0;  // selected and truly nonzero
  double pmse = 0.0;         // held-out prediction mean squared error
};

ReplicateMetrics evaluate(const SlsFit& fit, const StandardizedDataset& ds,
                          const Eigen::Ref<const Vector>& beta_true, const Matrix& test_X,
                          const Vector& test_y);

struct MethodSpec {
  std::string label;
  PenaltyKind penalty = PenaltyKind::MCP;
  double gamma = 3.0;
  std::optional<AdjacencyScheme> scheme;  // nullopt: no Laplacian (lambda2 = 0)
  bool normalized_laplacian = false;
  int folds = 5;
  std::vector<double> lambda1_grid;  // empty: default from each replicate's data
  std::vector<double> lambda2_grid;  // empty: default (or {0} without a scheme)
};

struct ReplicateRecord {
  int replicate = 0;
  bool ok = false;
  std::string error;
  ReplicateMetrics metrics;
  double best_lambda1 = 0.0;
  double best_lambda2 = 0.0;
};

struct StudyRow {
  std::string label;
  double median_positives = 0.0;
  double median_true_positives = 0.0;
  double median_pmse = 0.0;
  int n_ok = 0;
  int n_failed = 0;
  std::vector<ReplicateRecord> replicates;
};

/// Full per-replicate pipeline: generate, standardize, build graph/Laplacian,
/// cross-validate, refit at the chosen pair, evaluate on an independent test
/// set; reports medians over replicates. Replicates run in parallel on
/// independent seed streams, so results do not depend on the thread count.
/// A failing replicate is recorded and excluded, never silently dropped.
StudyRow run_study_method(const SimConfig& cfg, const MethodSpec& method, unsigned threads = 1);
std::vector<StudyRow> run_study(const SimConfig& cfg, const std::vector<MethodSpec>& methods,
                                unsigned threads = 1);

/// Table layout used by the simulate subcommand: one row per method with the
/// three median statistics (PMSE scaled by 100).
std::string study_table_tsv(const std::vector<StudyRow>& rows);

}  // namespace sls
