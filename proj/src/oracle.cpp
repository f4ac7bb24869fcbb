#include "sls/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace sls {

SupportSet SupportSet::from(std::vector<Index> indices, Index p) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  for (const Index j : indices)
    if (j < 0 || j >= p)
      throw ValidationError("support: index " + std::to_string(j) + " out of range [0, " +
                            std::to_string(p - 1) + "]");
  SupportSet s;
  s.indices = std::move(indices);
  return s;
}

SupportSet SupportSet::of_nonzeros(const Eigen::Ref<const Vector>& beta) {
  SupportSet s;
  for (Index j = 0; j < beta.size(); ++j)
    if (beta[j] != 0.0) s.indices.push_back(j);
  return s;
}

namespace {

Matrix submatrix(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b)
      out(static_cast<Index>(a), static_cast<Index>(b)) = m(rows[a], cols[b]);
  return out;
}

struct RestrictedSystem {
  Matrix sigma_O;       // X_O'X_O / n
  Matrix lap_O;         // L_O
  Matrix sigma_O_l2;    // Sigma_O + lambda2 L_O
  Eigen::LDLT<Matrix> solver;
};

RestrictedSystem restricted_system(const StandardizedDataset& ds, const Laplacian& L,
                                   const SupportSet& support, double lambda2) {
  if (support.indices.empty()) throw ValidationError("oracle: support must be nonempty");
  if (L.p() != ds.p()) throw ValidationError("oracle: Laplacian size does not match p");
  for (const Index j : support.indices)
    if (j < 0 || j >= ds.p()) throw ValidationError("oracle: support index out of range");

  RestrictedSystem sys;
  const auto d = static_cast<Index>(support.indices.size());
  Matrix X_O(ds.n(), d);
  for (Index a = 0; a < d; ++a) X_O.col(a) = ds.X_s.col(support.indices[static_cast<std::size_t>(a)]);
  sys.sigma_O = X_O.transpose() * X_O / static_cast<double>(ds.n());
  const Matrix dense_L = Matrix(L.matrix);
  sys.lap_O = submatrix(dense_L, support.indices, support.indices);
  sys.sigma_O_l2 = sys.sigma_O + lambda2 * sys.lap_O;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(sys.sigma_O_l2, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 1e-12)
    throw NumericalError("oracle: Sigma_O + lambda2 L_O is singular (smallest eigenvalue " +
                         std::to_string(eig.eigenvalues().minCoeff()) + ")");
  sys.solver.compute(sys.sigma_O_l2);
  return sys;
}

}  // namespace

Vector oracle_estimator(const StandardizedDataset& ds, const Laplacian& L,
                        const SupportSet& support, double lambda2) {
  const RestrictedSystem sys = restricted_system(ds, L, support, lambda2);
  const auto d = static_cast<Index>(support.indices.size());
  Vector rhs(d);
  for (Index a = 0; a < d; ++a)
    rhs[a] = ds.X_s.col(support.indices[static_cast<std::size_t>(a)]).dot(ds.y_c) /
             static_cast<double>(ds.n());
  const Vector restricted = sys.solver.solve(rhs);
  Vector beta = Vector::Zero(ds.p());
  for (Index a = 0; a < d; ++a) beta[support.indices[static_cast<std::size_t>(a)]] = restricted[a];
  return beta;
}

TargetBias target_and_bias(const StandardizedDataset& ds, const Laplacian& L,
                           const SupportSet& support, double lambda2,
                           const Eigen::Ref<const Vector>& beta_true) {
  if (beta_true.size() != ds.p())
    throw ValidationError("target_and_bias: beta length does not match p");
  const RestrictedSystem sys = restricted_system(ds, L, support, lambda2);
  const auto d = static_cast<Index>(support.indices.size());

  Vector beta_O(d);
  for (Index a = 0; a < d; ++a) beta_O[a] = beta_true[support.indices[static_cast<std::size_t>(a)]];

  const Vector target_O = sys.solver.solve(sys.sigma_O * beta_O);
  const Vector bias_core = sys.solver.solve(sys.lap_O * beta_O);  // Sigma_O^{-1}(l2) L_O beta_O

  TargetBias out;
  out.target_beta = Vector::Zero(ds.p());
  for (Index a = 0; a < d; ++a)
    out.target_beta[support.indices[static_cast<std::size_t>(a)]] = target_O[a];
  out.C1 = d > 0 ? bias_core.lpNorm<Eigen::Infinity>() : 0.0;

  // C2 over the complement: {Sigma_{Oc,O}(l2) Sigma_O^{-1}(l2) L_O - L_{Oc,O}} beta_O.
  std::vector<Index> complement;
  std::vector<bool> in_support(static_cast<std::size_t>(ds.p()), false);
  for (const Index j : support.indices) in_support[static_cast<std::size_t>(j)] = true;
  for (Index j = 0; j < ds.p(); ++j)
    if (!in_support[static_cast<std::size_t>(j)]) complement.push_back(j);
  if (!complement.empty()) {
    const auto dc = static_cast<Index>(complement.size());
    Matrix X_Oc(ds.n(), dc);
    for (Index a = 0; a < dc; ++a) X_Oc.col(a) = ds.X_s.col(complement[static_cast<std::size_t>(a)]);
    Matrix X_O(ds.n(), d);
    for (Index a = 0; a < d; ++a) X_O.col(a) = ds.X_s.col(support.indices[static_cast<std::size_t>(a)]);
    const Matrix dense_L = Matrix(L.matrix);
    const Matrix L_OcO = submatrix(dense_L, complement, support.indices);
    const Matrix sigma_OcO =
        X_Oc.transpose() * X_O / static_cast<double>(ds.n()) + lambda2 * L_OcO;
    const Vector v = sigma_OcO * bias_core - L_OcO * beta_O;
    out.C2 = v.lpNorm<Eigen::Infinity>();
  }

  // beta*_O - beta_O = -lambda2 Sigma_O^{-1}(l2) L_O beta_O, so the gap is lambda2 C1.
  const double gap = (target_O - beta_O).lpNorm<Eigen::Infinity>();
  const double scale = std::max(1.0, beta_O.lpNorm<Eigen::Infinity>());
  if (std::abs(gap - lambda2 * out.C1) > 1e-10 * scale)
    throw NumericalError("target_and_bias: bias identity violated (gap " + std::to_string(gap) +
                         " vs lambda2*C1 " + std::to_string(lambda2 * out.C1) + ")");
  return out;
}

double c_min(const StandardizedDataset& ds, const Laplacian& L, double lambda2) {
  if (L.p() != ds.p()) throw ValidationError("c_min: Laplacian size does not match p");
  Matrix quad = ds.X_s.transpose() * ds.X_s / static_cast<double>(ds.n());
  if (lambda2 != 0.0) quad += lambda2 * Matrix(L.matrix);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(quad, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

TwoPredictorCase two_predictor(double r1, double r2, double r12, double lambda2) {
  if (!(std::abs(r12) < 1.0)) throw ValidationError("two_predictor: |r12| < 1 required");
  if (!(lambda2 >= 0.0)) throw ValidationError("two_predictor: lambda2 must be >= 0");

  TwoPredictorCase c;
  c.r1 = r1;
  c.r2 = r2;
  c.r12 = r12;
  c.lambda2 = lambda2;

  const double den_L = (1.0 + lambda2) * (1.0 + lambda2) - (r12 - lambda2) * (r12 - lambda2);
  c.b_L << ((1.0 + lambda2) * r1 - (r12 - lambda2) * r2) / den_L,
      ((1.0 + lambda2) * r2 - (r12 - lambda2) * r1) / den_L;

  const double den_R = (1.0 + lambda2) * (1.0 + lambda2) - r12 * r12;
  c.b_R << ((1.0 + lambda2) * r1 - r12 * r2) / den_R,
      ((1.0 + lambda2) * r2 - r12 * r1) / den_R;

  c.b_ols << (r1 - r12 * r2) / (1.0 - r12 * r12), (r2 - r12 * r1) / (1.0 - r12 * r12);
  c.b_univ << r1, r2;
  c.b_L_inf = (r1 + r2) / (2.0 * (1.0 + r12));
  c.w_L = 2.0 * lambda2 / (1.0 - r12 + 2.0 * lambda2);
  c.w_R = lambda2 / (1.0 + lambda2 - r12 * r12);
  c.c_lambda = ((1.0 + lambda2) * (1.0 + lambda2) - (1.0 + lambda2) * r12 * r12) / den_R;
  return c;
}

DiagnosticsReport diagnostics(const StandardizedDataset& ds, const Laplacian& L,
                              const SupportSet& support, double lambda2,
                              const std::optional<Vector>& beta_true) {
  DiagnosticsReport report;
  report.support = support;
  report.lambda2 = lambda2;
  report.oracle_beta = oracle_estimator(ds, L, support, lambda2);
  const Vector& reference = beta_true ? *beta_true : report.oracle_beta;
  if (reference.size() != ds.p())
    throw ValidationError("diagnostics: beta_true length does not match p");

  const TargetBias tb = target_and_bias(ds, L, support, lambda2, reference);
  report.target_beta = tb.target_beta;
  report.C1 = tb.C1;
  report.C2 = tb.C2;
  report.c_min = c_min(ds, L, lambda2);

  const RestrictedSystem sys = restricted_system(ds, L, support, lambda2);
  const Matrix inv = sys.solver.solve(Matrix::Identity(support.cardinality(), support.cardinality()));
  report.v_diag = (inv * sys.sigma_O * inv).diagonal();

  const UnbiasednessCheck check = is_unbiased(L, support.indices, reference);
  report.unbiased = check.unbiased;
  report.unbiased_residual = check.residual;
  return report;
}

OraclePropertyReport oracle_property_conditions(const StandardizedDataset& ds, const Laplacian& L,
                                           const SupportSet& support, double lambda2,
                                           double lambda1, double gamma, double sigma, double eps,
                                           const std::optional<Vector>& beta_true,
                                           const std::vector<std::vector<Index>>& src_subsets) {
  if (!(eps > 0.0 && eps < 1.0 / 3.0))
    throw ValidationError("oracle_property_conditions: eps must lie in (0, 1/3)");
  if (!(sigma > 0.0)) throw ValidationError("oracle_property_conditions: sigma must be > 0");

  OraclePropertyReport report;
  const double n = static_cast<double>(ds.n());
  const double p = static_cast<double>(ds.p());
  const double d = static_cast<double>(support.cardinality());

  report.convexity.name = "c_min(lambda2) > 1/gamma";
  report.convexity.value = c_min(ds, L, lambda2);
  report.convexity.threshold = 1.0 / gamma;
  report.convexity.pass = report.convexity.value > report.convexity.threshold;

  const Vector reference = beta_true ? *beta_true : oracle_estimator(ds, L, support, lambda2);
  const TargetBias tb = target_and_bias(ds, L, support, lambda2, reference);
  report.C1 = tb.C1;
  report.C2 = tb.C2;

  const double max_colnorm = ds.X_s.colwise().norm().maxCoeff();
  report.penalty_level.name = "lambda1 >= lambda2 C2 + sigma sqrt(2 log((p-d)/eps)) max_j ||x_j|| / n";
  if (p - d <= 0.0) {
    report.penalty_level.applicable = false;  // log((p-d)/eps) degenerates
    report.penalty_level.value = lambda1;
  } else {
    report.penalty_level.threshold =
        lambda2 * tb.C2 + sigma * std::sqrt(2.0 * std::log((p - d) / eps)) * max_colnorm / n;
    report.penalty_level.value = lambda1;
    report.penalty_level.pass = lambda1 >= report.penalty_level.threshold;
  }

  report.beta_magnitude.name = "min_j |beta*_j| sqrt(n/v_j) >= sigma sqrt(2 log(d/eps))";
  const RestrictedSystem sys = restricted_system(ds, L, support, lambda2);
  const Matrix inv = sys.solver.solve(Matrix::Identity(support.cardinality(), support.cardinality()));
  const Vector v_diag = (inv * sys.sigma_O * inv).diagonal();
  double min_scaled = std::numeric_limits<double>::infinity();
  for (Index a = 0; a < support.cardinality(); ++a) {
    const double target = tb.target_beta[support.indices[static_cast<std::size_t>(a)]];
    min_scaled = std::min(min_scaled, std::abs(target) * std::sqrt(n / v_diag[a]));
  }
  report.beta_magnitude.value = min_scaled;
  report.beta_magnitude.threshold = sigma * std::sqrt(2.0 * std::log(d / eps));
  report.beta_magnitude.pass = report.beta_magnitude.value >= report.beta_magnitude.threshold;

  // Restricted-spectrum spot checks: exhaustive verification over all subsets
  // is combinatorial, so only user-supplied subsets are examined.
  const Matrix dense_L = Matrix(L.matrix);
  for (const auto& subset : src_subsets) {
    SrcSpotCheck check;
    check.subset = subset;
    const auto ds_sub = static_cast<Index>(subset.size());
    Matrix X_B(ds.n(), ds_sub);
    for (Index a = 0; a < ds_sub; ++a) {
      const Index j = subset[static_cast<std::size_t>(a)];
      if (j < 0 || j >= ds.p()) throw ValidationError("oracle_property_conditions: subset index out of range");
      X_B.col(a) = ds.X_s.col(j);
    }
    Matrix quad = X_B.transpose() * X_B / n + lambda2 * submatrix(dense_L, subset, subset);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(quad, Eigen::EigenvaluesOnly);
    check.min_eig = eig.eigenvalues().minCoeff();
    check.max_eig = eig.eigenvalues().maxCoeff();
    report.src.push_back(std::move(check));
  }
  return report;
}

}  // namespace sls
