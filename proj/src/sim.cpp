#include "sls/sim.hpp"

#include "sls/parallel.hpp"
#include "sls/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sls {

void SimConfig::validate() const {
  if (n < 2 || p < 1) throw ValidationError("sim: need n >= 2 and p >= 1");
  if (cluster_size < 1 || p % cluster_size != 0)
    throw ValidationError("sim: p must be divisible by cluster_size");
  if (n_nonzero_clusters < 0 || n_nonzero() > p)
    throw ValidationError("sim: nonzero coordinates exceed p");
  if (!(rho >= 0.0 && rho < 1.0)) throw ValidationError("sim: rho must lie in [0, 1)");
  if (!(sigma >= 0.0)) throw ValidationError("sim: sigma must be >= 0");
  if (n_replicates < 1) throw ValidationError("sim: n_replicates must be >= 1");
  if (n_test < 1) throw ValidationError("sim: n_test must be >= 1");
  if (coef.kind == CoefScenario::Kind::Uniform && !(coef.lo <= coef.hi))
    throw ValidationError("sim: uniform scenario needs lo <= hi");
}

Matrix generate_design(const SimConfig& cfg, std::uint64_t replicate_seed,
                       std::optional<Index> rows) {
  cfg.validate();
  const Index n = rows.value_or(cfg.n);
  const Index p = cfg.p;
  const double rho = cfg.rho;
  const double innov = std::sqrt(1.0 - rho * rho);

  Rng rng(replicate_seed);
  Matrix X(n, p);
  // AR(1) chain x_j = rho x_{j-1} + sqrt(1-rho^2) z_j along each row,
  // restarted at cluster boundaries under structure I.
  for (Index i = 0; i < n; ++i) {
    double prev = 0.0;
    for (Index j = 0; j < p; ++j) {
      const bool chain_start =
          j == 0 || (cfg.structure == Structure::I && j % cfg.cluster_size == 0);
      const double z = rng.normal();
      const double x = chain_start ? z : rho * prev + innov * z;
      X(i, j) = x;
      prev = x;
    }
  }
  return X;
}

std::pair<Vector, SupportSet> make_coefficients(const SimConfig& cfg,
                                                std::uint64_t replicate_seed) {
  cfg.validate();
  Vector beta = Vector::Zero(cfg.p);
  const Index d = cfg.n_nonzero();
  Rng rng(replicate_seed);
  for (Index j = 0; j < d; ++j) {
    switch (cfg.coef.kind) {
      case CoefScenario::Kind::Equal:
        beta[j] = cfg.coef.value;
        break;
      case CoefScenario::Kind::Uniform:
        beta[j] = cfg.coef.lo + (cfg.coef.hi - cfg.coef.lo) * rng.uniform();
        break;
    }
  }
  std::vector<Index> support(static_cast<std::size_t>(d));
  for (Index j = 0; j < d; ++j) support[static_cast<std::size_t>(j)] = j;
  return {beta, SupportSet::from(std::move(support), cfg.p)};
}

Vector generate_response(const Matrix& X, const Eigen::Ref<const Vector>& beta, double sigma,
                         std::uint64_t seed) {
  if (X.cols() != beta.size()) throw ValidationError("generate_response: dimension mismatch");
  Vector y = X * beta;
  if (sigma > 0.0) {
    Rng rng(seed);
    for (Index i = 0; i < y.size(); ++i) y[i] += sigma * rng.normal();
  }
  return y;
}

ReplicateMetrics evaluate(const SlsFit& fit, const StandardizedDataset& ds,
                          const Eigen::Ref<const Vector>& beta_true, const Matrix& test_X,
                          const Vector& test_y) {
  if (fit.beta.size() != beta_true.size() || test_X.cols() != fit.beta.size() ||
      test_X.rows() != test_y.size())
    throw ValidationError("evaluate: dimension mismatch");

  ReplicateMetrics m;
  for (Index j = 0; j < fit.beta.size(); ++j) {
    if (fit.beta[j] != 0.0) {
      ++m.positives;
      if (beta_true[j] != 0.0) ++m.true_positives;
    }
  }
  const OriginalScaleCoefs orig = coefficients_to_original_scale(fit.beta, ds);
  const Vector pred = test_X * orig.coefs + Vector::Constant(test_y.size(), orig.intercept);
  m.pmse = (test_y - pred).squaredNorm() / static_cast<double>(test_y.size());
  return m;
}

namespace {

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

// Scenario (a) sanity check: on the graph restricted to the true support the
// Laplacian must annihilate the (equal) true coefficients, provided every
// surviving edge is positive.
void check_unbiasedness(const AdjacencyMatrix& adj, const SupportSet& support,
                        const Vector& beta_true) {
  const AdjacencyMatrix restricted = restrict_adjacency(adj, support.indices);
  for (Index j = 0; j < restricted.p(); ++j)
    for (SparseMatrix::InnerIterator it(restricted.signed_weights, j); it; ++it)
      if (it.value() < 0.0) return;  // negative edge: equal coefficients need not be in the kernel
  if (restricted.signed_weights.nonZeros() == 0) return;
  Vector beta_O(restricted.p());
  for (Index a = 0; a < restricted.p(); ++a)
    beta_O[a] = beta_true[support.indices[static_cast<std::size_t>(a)]];
  const Laplacian L_O = build_laplacian(restricted, false);
  const double residual = (L_O.matrix * beta_O).lpNorm<Eigen::Infinity>();
  if (residual > 1e-8)
    throw NumericalError("sim: restricted Laplacian is not unbiased for the equal-coefficient "
                         "scenario (residual " + std::to_string(residual) + ")");
}

ReplicateRecord run_replicate(const SimConfig& cfg, const MethodSpec& method, int rep) {
  ReplicateRecord rec;
  rec.replicate = rep;
  const auto stream = static_cast<std::uint64_t>(rep) * 8;

  const Matrix X = generate_design(cfg, derive_seed(cfg.seed, stream + 0));
  const auto [beta_true, support] = make_coefficients(cfg, derive_seed(cfg.seed, stream + 1));
  const Vector y = generate_response(X, beta_true, cfg.sigma, derive_seed(cfg.seed, stream + 2));
  const Matrix test_X = generate_design(cfg, derive_seed(cfg.seed, stream + 3), cfg.n_test);
  const Vector test_y =
      generate_response(test_X, beta_true, cfg.sigma, derive_seed(cfg.seed, stream + 4));

  RawDataset raw;
  raw.X = X;
  raw.y = y;
  for (Index j = 0; j < cfg.p; ++j) raw.column_names.push_back("x" + std::to_string(j + 1));
  const StandardizedDataset ds = standardize(raw);

  Laplacian L = Laplacian::zero(cfg.p);
  CvGrids grids;
  grids.lambda1 = method.lambda1_grid.empty() ? default_grid(ds).lambda1 : method.lambda1_grid;
  if (method.scheme) {
    const CorrelationMatrix corr = correlations(ds);
    const AdjacencyMatrix adj = build_adjacency(corr, *method.scheme);
    if (cfg.coef.kind == CoefScenario::Kind::Equal && support.cardinality() > 0)
      check_unbiasedness(adj, support, beta_true);
    L = build_laplacian(adj, method.normalized_laplacian);
    grids.lambda2 = method.lambda2_grid.empty() ? default_grid(ds).lambda2 : method.lambda2_grid;
  } else {
    grids.lambda2 = method.lambda2_grid.empty() ? std::vector<double>{0.0} : method.lambda2_grid;
  }

  PenaltyConfig penalty;
  penalty.kind = method.penalty;
  penalty.gamma = method.gamma;

  const CvResult cv =
      cv_select(raw, L, grids, method.folds, penalty, derive_seed(cfg.seed, stream + 5));
  rec.best_lambda1 = cv.best_lambda1;
  rec.best_lambda2 = cv.best_lambda2;

  SlsHyperparams hyper;
  hyper.penalty = penalty;
  hyper.penalty.lambda1 = cv.best_lambda1;
  hyper.lambda2 = cv.best_lambda2;
  const SlsFit fit_full = fit(ds, L, hyper);

  rec.metrics = evaluate(fit_full, ds, beta_true, test_X, test_y);
  rec.ok = true;
  return rec;
}

}  // namespace

StudyRow run_study_method(const SimConfig& cfg, const MethodSpec& method, unsigned threads) {
  cfg.validate();
  StudyRow row;
  row.label = method.label;
  row.replicates.resize(static_cast<std::size_t>(cfg.n_replicates));

  parallel_for(static_cast<std::size_t>(cfg.n_replicates), threads, [&](std::size_t r) {
    auto& rec = row.replicates[r];
    try {
      rec = run_replicate(cfg, method, static_cast<int>(r));
    } catch (const std::exception& e) {
      rec.replicate = static_cast<int>(r);
      rec.ok = false;
      rec.error = e.what();
    }
  });

  std::vector<double> positives, tps, pmses;
  for (const auto& rec : row.replicates) {
    if (!rec.ok) {
      ++row.n_failed;
      continue;
    }
    ++row.n_ok;
    positives.push_back(static_cast<double>(rec.metrics.positives));
    tps.push_back(static_cast<double>(rec.metrics.true_positives));
    pmses.push_back(rec.metrics.pmse);
  }
  row.median_positives = median(std::move(positives));
  row.median_true_positives = median(std::move(tps));
  row.median_pmse = median(std::move(pmses));
  return row;
}

std::vector<StudyRow> run_study(const SimConfig& cfg, const std::vector<MethodSpec>& methods,
                                unsigned threads) {
  std::vector<StudyRow> rows;
  rows.reserve(methods.size());
  for (const auto& method : methods) rows.push_back(run_study_method(cfg, method, threads));
  return rows;
}

std::string study_table_tsv(const std::vector<StudyRow>& rows) {
  std::ostringstream out;
  out << "method\tpositives\ttrue_positives\tpmse_x100\tok\tfailed\n";
  for (const auto& row : rows) {
    out << row.label << '\t' << row.median_positives << '\t' << row.median_true_positives << '\t';
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", row.median_pmse * 100.0);
    out << buf << '\t' << row.n_ok << '\t' << row.n_failed << '\n';
  }
  return out.str();
}

}  // namespace sls
