#include "sls/solver.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace sls {

std::vector<Index> SlsFit::support() const {
  std::vector<Index> s;
  for (Index j = 0; j < beta.size(); ++j)
    if (beta[j] != 0.0) s.push_back(j);
  return s;
}

double lambda1_max(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y) {
  if (X.rows() != y.size()) throw ValidationError("lambda1_max: X rows do not match y length");
  return (X.transpose() * y).cwiseAbs().maxCoeff() / static_cast<double>(X.rows());
}

double lambda1_max(const StandardizedDataset& ds) { return lambda1_max(ds.X_s, ds.y_c); }

double criterion_value(const Matrix& X, const Vector& y, const Laplacian& L,
                       const Eigen::Ref<const Vector>& b, const SlsHyperparams& hyper) {
  if (X.cols() != b.size() || X.rows() != y.size() || L.p() != b.size())
    throw ValidationError("criterion_value: dimension mismatch");
  const double n = static_cast<double>(X.rows());
  double value = (y - X * b).squaredNorm() / (2.0 * n);
  for (Index j = 0; j < b.size(); ++j) value += penalty_value(b[j], hyper.penalty);
  if (hyper.lambda2 > 0.0) value += 0.5 * hyper.lambda2 * b.dot(L.matrix * b);
  return value;
}

double criterion_value(const StandardizedDataset& ds, const Laplacian& L,
                       const Eigen::Ref<const Vector>& b, const SlsHyperparams& hyper) {
  return criterion_value(ds.X_s, ds.y_c, L, b, hyper);
}

namespace {

struct StationarityResiduals {
  double nonzero = 0.0;      // max |x_j'r/n - lambda2 (Lb)_j - rho'(b_j)| over b_j != 0
  double zero_excess = 0.0;  // max (|x_j'r/n - lambda2 (Lb)_j| - lambda1)_+ over b_j = 0
  double overall() const { return std::max(nonzero, zero_excess); }
};

// Shared by fit_design and kkt_check, using freshly computed residual and L*beta.
StationarityResiduals stationarity_residual(const Matrix& X, const Vector& y, const Laplacian& L,
                                            const Vector& beta, const SlsHyperparams& hyper,
                                            double n) {
  const Vector r = y - X * beta;
  const Vector grad = X.transpose() * r / n - hyper.lambda2 * (L.matrix * beta);
  const double l1 = hyper.lambda1();
  StationarityResiduals res;
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0)
      res.nonzero = std::max(res.nonzero,
                             std::abs(grad[j] - penalty_derivative(beta[j], hyper.penalty)));
    else
      res.zero_excess = std::max(res.zero_excess, std::abs(grad[j]) - l1);
  }
  res.zero_excess = std::max(0.0, res.zero_excess);
  return res;
}

}  // namespace

SlsFit fit_design(const Matrix& X, const Vector& y, const Laplacian& L,
                  const SlsHyperparams& hyper, const FitOptions& options) {
  hyper.validate();
  const Index n = X.rows();
  const Index p = X.cols();
  if (y.size() != n) throw ValidationError("fit: y length does not match X rows");
  if (L.p() != p) throw ValidationError("fit: Laplacian size does not match p");
  if (options.init && options.init->size() != p)
    throw ValidationError("fit: init vector length does not match p");

  const double nd = options.loss_normalizer.value_or(static_cast<double>(n));
  if (!(nd > 0.0)) throw ValidationError("fit: loss normalizer must be > 0");
  const double lambda2 = hyper.lambda2;
  const Vector colsq = X.colwise().squaredNorm() / nd;  // x_j'x_j / n
  Vector v(p);
  for (Index j = 0; j < p; ++j) {
    v[j] = colsq[j] + lambda2 * L.diag[j];
    if (!(v[j] > 0.0))
      throw ValidationError("fit: column " + std::to_string(j) + " has zero norm");
  }

  SlsFit out;
  out.hyper = hyper;
  out.beta = options.init ? *options.init : Vector::Zero(p);
  Vector& b = out.beta;
  Vector r = options.init ? Vector(y - X * b) : y;
  Vector lapb = lambda2 > 0.0 && options.init ? Vector(L.matrix * b) : Vector::Zero(p);

  auto objective_at = [&](const Vector& bb) {
    double value = (y - X * bb).squaredNorm() / (2.0 * nd);
    for (Index j = 0; j < p; ++j) value += penalty_value(bb[j], hyper.penalty);
    if (lambda2 > 0.0) value += 0.5 * lambda2 * bb.dot(L.matrix * bb);
    return value;
  };

  double prev_objective = options.instrument_descent ? objective_at(b) : 0.0;

  // One pass over the given coordinates; returns the max coefficient change.
  auto sweep = [&](const std::vector<Index>& coords) {
    double max_change = 0.0;
    for (const Index j : coords) {
      const double bj = b[j];
      double z = X.col(j).dot(r) / nd + bj * colsq[j];
      if (lambda2 > 0.0) z -= lambda2 * (lapb[j] - L.diag[j] * bj);
      const double bn = univariate_minimize(z, v[j], hyper.penalty);
      const double delta = bn - bj;
      if (delta != 0.0) {
        r.noalias() -= delta * X.col(j);
        if (lambda2 > 0.0)
          for (SparseMatrix::InnerIterator it(L.matrix, j); it; ++it)
            lapb[it.row()] += delta * it.value();
        b[j] = bn;
        max_change = std::max(max_change, std::abs(delta));
      }
      if (options.instrument_descent) {
        const double obj = objective_at(b);
        out.max_descent_violation = std::max(out.max_descent_violation, obj - prev_objective);
        prev_objective = obj;
      }
    }
    return max_change;
  };

  std::vector<Index> all_coords(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) all_coords[static_cast<std::size_t>(j)] = j;
  std::vector<Index> active;

  int sweeps = 0;
  bool converged_sweeps = false;
  bool full_next = true;
  while (sweeps < options.max_iter) {
    const bool full = full_next || !options.use_active_set;
    const double max_change = sweep(full ? all_coords : active);
    ++sweeps;

    if (!std::isfinite(max_change) || !b.allFinite())
      throw NumericalError("fit: non-finite coefficients; check the input scaling");

    if (full) {
      if (max_change <= options.tol) {
        converged_sweeps = true;
        break;
      }
      if (options.use_active_set) {
        active.clear();
        for (Index j = 0; j < p; ++j)
          if (b[j] != 0.0) active.push_back(j);
        full_next = false;
      }
    } else if (max_change <= options.tol) {
      full_next = true;  // active set settled; confirm with a full sweep
    }

    // Refresh the incremental state now and then to stop rounding drift.
    if (sweeps % 64 == 0) {
      r = y - X * b;
      if (lambda2 > 0.0) lapb = L.matrix * b;
    }
  }

  out.iterations = sweeps;
  out.objective = objective_at(b);
  if (!std::isfinite(out.objective))
    throw NumericalError("fit: non-finite objective; check the input scaling");
  const StationarityResiduals res = stationarity_residual(X, y, L, b, hyper, nd);
  out.kkt_residual = res.overall();

  const double l1 = hyper.lambda1();
  const double nonzero_bound = l1 > 0.0 ? options.kkt_tol * l1 : options.kkt_tol;
  out.converged =
      converged_sweeps && res.nonzero <= nonzero_bound && res.zero_excess <= options.kkt_tol;

  if (l1 == 0.0) {
    // Uniqueness of the lambda1 = 0 fit needs Sigma + lambda2 L positive definite.
    Matrix quad = X.transpose() * X / nd;
    if (lambda2 > 0.0) quad += lambda2 * Matrix(L.matrix);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(quad, Eigen::EigenvaluesOnly);
    out.possibly_nonunique = eig.eigenvalues().minCoeff() <= 1e-12;
  }
  return out;
}

SlsFit fit(const StandardizedDataset& ds, const Laplacian& L, const SlsHyperparams& hyper,
           const FitOptions& options) {
  return fit_design(ds.X_s, ds.y_c, L, hyper, options);
}

SlsFit fit_augmented(const AugmentedData& aug, Index n_original, const PenaltyConfig& penalty,
                     const FitOptions& options) {
  if (n_original < 1 || n_original > aug.X_tilde.rows())
    throw ValidationError("fit_augmented: invalid original sample size");
  FitOptions opts = options;
  opts.loss_normalizer = static_cast<double>(n_original);
  SlsHyperparams hyper;
  hyper.penalty = penalty;
  hyper.lambda2 = 0.0;  // already folded into the stacked rows
  return fit_design(aug.X_tilde, aug.y_tilde, Laplacian::zero(aug.X_tilde.cols()), hyper, opts);
}

SlsPath fit_path_design(const Matrix& X, const Vector& y, const Laplacian& L,
                        const std::vector<double>& lambda1_grid, double lambda2,
                        const PenaltyConfig& penalty, const FitOptions& options) {
  if (lambda1_grid.empty()) throw ValidationError("fit_path: lambda1 grid is empty");
  for (std::size_t i = 0; i < lambda1_grid.size(); ++i) {
    if (!(lambda1_grid[i] >= 0.0) || !std::isfinite(lambda1_grid[i]))
      throw ValidationError("fit_path: lambda1 grid values must be finite and >= 0");
    if (i > 0 && !(lambda1_grid[i] < lambda1_grid[i - 1]))
      throw ValidationError("fit_path: lambda1 grid must be strictly descending");
  }

  SlsPath path;
  path.lambda1_grid = lambda1_grid;
  path.lambda2 = lambda2;
  path.penalty = penalty;
  path.fits.reserve(lambda1_grid.size());

  FitOptions opts = options;
  for (const double l1 : lambda1_grid) {
    SlsHyperparams hyper;
    hyper.penalty = penalty;
    hyper.penalty.lambda1 = l1;
    hyper.lambda2 = lambda2;
    path.fits.push_back(fit_design(X, y, L, hyper, opts));
    opts.init = path.fits.back().beta;  // warm start the next grid point
  }
  return path;
}

SlsPath fit_path(const StandardizedDataset& ds, const Laplacian& L,
                 const std::vector<double>& lambda1_grid, double lambda2,
                 const PenaltyConfig& penalty, const FitOptions& options) {
  return fit_path_design(ds.X_s, ds.y_c, L, lambda1_grid, lambda2, penalty, options);
}

double kkt_check(const Matrix& X, const Vector& y, const Laplacian& L, const SlsFit& fit) {
  if (fit.beta.size() != X.cols()) throw ValidationError("kkt_check: dimension mismatch");
  return stationarity_residual(X, y, L, fit.beta, fit.hyper, static_cast<double>(X.rows()))
      .overall();
}

double kkt_check(const StandardizedDataset& ds, const Laplacian& L, const SlsFit& fit) {
  return kkt_check(ds.X_s, ds.y_c, L, fit);
}

}  // namespace sls
