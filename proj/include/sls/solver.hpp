#pragma once

#include "sls/dataset.hpp"
#include "sls/laplacian.hpp"
#include "sls/penalty.hpp"
#include "sls/types.hpp"

#include <optional>
#include <vector>

namespace sls {

struct SlsHyperparams {
  PenaltyConfig penalty;  // carries lambda1 and gamma
  double lambda2 = 0.0;

  double lambda1() const { return penalty.lambda1; }
  void validate() const {
    penalty.validate();
    if (!(lambda2 >= 0.0)) throw ValidationError("hyperparams: lambda2 must be >= 0");
  }
};

struct FitOptions {
  int max_iter = 10000;     // full coordinate sweeps
  double tol = 1e-7;        // max |coefficient change| over a full sweep
  double kkt_tol = 1e-6;
  std::optional<Vector> init;  // default: zero
  bool use_active_set = true;
  bool instrument_descent = false;  // track the worst per-update objective increase
  // Count n in the 1/(2n) loss factor; defaults to the row count. Augmented
  // designs carry extra rows but keep the original sample size here.
  std::optional<double> loss_normalizer;
};

struct SlsFit {
  Vector beta;  // standardized scale
  SlsHyperparams hyper;
  int iterations = 0;  // sweeps performed (full + active-set)
  bool converged = false;
  double objective = 0.0;
  double kkt_residual = 0.0;
  bool possibly_nonunique = false;  // lambda1 = 0 with singular Sigma + lambda2 L
  double max_descent_violation = 0.0;  // only filled on instrumented runs

  std::vector<Index> support() const;
};

struct SlsPath {
  std::vector<double> lambda1_grid;  // strictly descending
  std::vector<SlsFit> fits;
  double lambda2 = 0.0;
  PenaltyConfig penalty;
};

/// Smallest lambda1 for which the zero vector is a fixed point: max_j |x_j'y| / n.
double lambda1_max(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y);
double lambda1_max(const StandardizedDataset& ds);

/// The penalized criterion: ||y - Xb||^2/(2n) + sum_j rho(|b_j|) + (lambda2/2) b'Lb.
double criterion_value(const Matrix& X, const Vector& y, const Laplacian& L,
                       const Eigen::Ref<const Vector>& b, const SlsHyperparams& hyper);
double criterion_value(const StandardizedDataset& ds, const Laplacian& L,
                       const Eigen::Ref<const Vector>& b, const SlsHyperparams& hyper);

/// Cyclic coordinate descent on the criterion. The j-th step exactly solves
/// the one-dimensional problem with curvature v_j = x_j'x_j/n + lambda2 L_jj
/// and linear term z_j = x_j'(r + x_j b_j)/n - lambda2 sum_{k != j} L_jk b_k,
/// so the objective never increases. Residuals and L*b are updated
/// incrementally. Convergence: max coefficient change over a full sweep <= tol.
SlsFit fit_design(const Matrix& X, const Vector& y, const Laplacian& L,
                  const SlsHyperparams& hyper, const FitOptions& options = {});
SlsFit fit(const StandardizedDataset& ds, const Laplacian& L, const SlsHyperparams& hyper,
           const FitOptions& options = {});

/// Fit on the stacked augmented design, which folds lambda2 into the data and
/// shares its local minimizers with the direct criterion.
SlsFit fit_augmented(const AugmentedData& aug, Index n_original, const PenaltyConfig& penalty,
                     const FitOptions& options = {});

/// Warm-started fits along a descending lambda1 grid at fixed lambda2.
SlsPath fit_path_design(const Matrix& X, const Vector& y, const Laplacian& L,
                        const std::vector<double>& lambda1_grid, double lambda2,
                        const PenaltyConfig& penalty, const FitOptions& options = {});
SlsPath fit_path(const StandardizedDataset& ds, const Laplacian& L,
                 const std::vector<double>& lambda1_grid, double lambda2,
                 const PenaltyConfig& penalty, const FitOptions& options = {});

/// Max stationarity violation of a fit: for b_j != 0,
/// |x_j'r/n - lambda2 (Lb)_j - rho'(b_j)|; for b_j = 0 the excess of
/// |x_j'r/n - lambda2 (Lb)_j| over lambda1.
double kkt_check(const Matrix& X, const Vector& y, const Laplacian& L, const SlsFit& fit);
double kkt_check(const StandardizedDataset& ds, const Laplacian& L, const SlsFit& fit);

}  // namespace sls
