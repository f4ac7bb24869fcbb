#pragma once

#include "sls/dataset.hpp"
#include "sls/laplacian.hpp"
#include "sls/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sls {

struct SupportSet {
  std::vector<Index> indices;  // sorted ascending, distinct, 0-based

  Index cardinality() const { return static_cast<Index>(indices.size()); }
  static SupportSet from(std::vector<Index> indices, Index p);
  static SupportSet of_nonzeros(const Eigen::Ref<const Vector>& beta);
};

/// Oracle Laplacian shrinkage estimator: the Laplacian-penalized least-squares
/// fit restricted to the support, (Sigma_O + lambda2 L_O)^{-1} X_O'y/n, zeros
/// elsewhere. Requires Sigma_O + lambda2 L_O invertible.
Vector oracle_estimator(const StandardizedDataset& ds, const Laplacian& L,
                        const SupportSet& support, double lambda2);

struct TargetBias {
  Vector target_beta;  // beta*: expectation of the oracle estimator
  double C1 = 0.0;     // ||Sigma_O^{-1}(l2) L_O beta_O||_inf
  double C2 = 0.0;     // ||{Sigma_{Oc,O}(l2) Sigma_O^{-1}(l2) L_O - L_{Oc,O}} beta_O||_inf
};

/// Target beta* = (Sigma_O + lambda2 L_O)^{-1} Sigma_O beta_O and the bias
/// constants; checks the identity ||beta*_O - beta_O||_inf = lambda2 C1.
TargetBias target_and_bias(const StandardizedDataset& ds, const Laplacian& L,
                           const SupportSet& support, double lambda2,
                           const Eigen::Ref<const Vector>& beta_true);

/// Smallest eigenvalue of Sigma + lambda2 L.
double c_min(const StandardizedDataset& ds, const Laplacian& L, double lambda2);

/// All closed-form quantities of the two-predictor comparison of Laplacian
/// and ridge shrinkage: estimates, OLS, equal-coefficient and univariate
/// limits, and the weighted-average decomposition weights.
struct TwoPredictorCase {
  double r1 = 0.0, r2 = 0.0, r12 = 0.0, lambda2 = 0.0;
  Eigen::Vector2d b_L, b_R, b_ols, b_univ;
  double b_L_inf = 0.0;   // equal-coefficient least squares: (r1+r2)/(2(1+r12))
  double w_L = 0.0;       // b_L = (1-w_L) b_ols + w_L b_L_inf
  double w_R = 0.0;       // (1+l2) b_R = c_lambda {(1-w_R) b_ols + w_R b_univ}
  double c_lambda = 1.0;
};

TwoPredictorCase two_predictor(double r1, double r2, double r12, double lambda2);

struct DiagnosticsReport {
  Vector oracle_beta;
  Vector target_beta;
  double C1 = 0.0;
  double C2 = 0.0;
  double c_min = 0.0;
  Vector v_diag;  // diagonal of Sigma_O^{-1}(l2) Sigma_O Sigma_O^{-1}(l2)
  bool unbiased = false;
  double unbiased_residual = 0.0;
  SupportSet support;
  double lambda2 = 0.0;
};

/// Full oracle diagnostics. When the true coefficients are unknown the oracle
/// estimate is plugged in for them.
DiagnosticsReport diagnostics(const StandardizedDataset& ds, const Laplacian& L,
                              const SupportSet& support, double lambda2,
                              const std::optional<Vector>& beta_true = std::nullopt);

struct ConditionClause {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  bool applicable = true;
};

struct SrcSpotCheck {
  std::vector<Index> subset;
  double min_eig = 0.0;
  double max_eig = 0.0;
};

struct OraclePropertyReport {
  ConditionClause convexity;       // c_min(lambda2) > 1/gamma
  ConditionClause penalty_level;   // lambda1 >= lambda2 C2 + noise term
  ConditionClause beta_magnitude;  // min |beta*_j| sqrt(n/v_j) >= noise term
  double C1 = 0.0;
  double C2 = 0.0;
  std::vector<SrcSpotCheck> src;   // restricted spectra for user-supplied subsets
};

/// Numerical evaluation of the sufficient conditions for the oracle property,
/// reported clause by clause with margins. Purely diagnostic.
OraclePropertyReport oracle_property_conditions(
    const StandardizedDataset& ds, const Laplacian& L, const SupportSet& support, double lambda2,
    double lambda1, double gamma, double sigma, double eps,
    const std::optional<Vector>& beta_true = std::nullopt,
    const std::vector<std::vector<Index>>& src_subsets = {});

}  // namespace sls
