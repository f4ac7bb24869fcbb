#include "sls/tuning.hpp"

#include "sls/parallel.hpp"
#include "sls/rng.hpp"

#include <algorithm>
#include <cmath>

namespace sls {

CvGrids default_grid(const StandardizedDataset& ds) {
  CvGrids grids;
  const double lmax = lambda1_max(ds);
  for (int k = 0; k <= 16; ++k) grids.lambda1.push_back(lmax * std::pow(2.0, -0.5 * k));
  for (int k = 0; k <= 16; ++k) grids.lambda2.push_back(std::pow(2.0, -4.0 + 0.5 * k));
  return grids;
}

namespace {

struct Fold {
  StandardizedDataset train;  // re-standardized training portion
  Matrix holdout_X_std;       // held-out rows under the training scaling
  Vector holdout_y;
};

std::vector<double> normalize_descending(std::vector<double> grid, const char* what) {
  if (grid.empty()) throw ValidationError(std::string("cv_select: empty ") + what + " grid");
  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (const double v : grid)
    if (!std::isfinite(v) || v < 0.0)
      throw ValidationError(std::string("cv_select: ") + what + " grid values must be finite and >= 0");
  return grid;
}

}  // namespace

CvResult cv_select(const RawDataset& raw, const Laplacian& L, const CvGrids& grids, int folds,
                   const PenaltyConfig& penalty, std::uint64_t seed, unsigned threads,
                   const FitOptions& options) {
  raw.validate();
  const Index n = raw.n();
  if (folds < 2) throw ValidationError("cv_select: V >= 2 folds required");
  if (folds > n)
    throw ValidationError("cv_select: V = " + std::to_string(folds) + " exceeds n = " +
                          std::to_string(n));
  if (L.p() != raw.p()) throw ValidationError("cv_select: Laplacian size does not match p");

  const std::vector<double> l1_grid = normalize_descending(grids.lambda1, "lambda1");
  std::vector<double> l2_grid = normalize_descending(grids.lambda2, "lambda2");
  std::reverse(l2_grid.begin(), l2_grid.end());  // ascending for reporting

  CvResult result;
  result.folds = folds;
  result.seed = seed;

  // Deterministic fold assignment: shuffle indices, deal round-robin.
  Rng rng(derive_seed(seed, 0));
  const std::vector<int> perm = rng.permutation(static_cast<int>(n));
  result.fold_assignment.assign(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i)
    result.fold_assignment[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
        static_cast<int>(i % folds);

  std::vector<Fold> fold_data(static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    std::vector<Index> train_rows, ho_rows;
    for (Index i = 0; i < n; ++i) {
      if (result.fold_assignment[static_cast<std::size_t>(i)] == f)
        ho_rows.push_back(i);
      else
        train_rows.push_back(i);
    }
    Matrix Xtr(static_cast<Index>(train_rows.size()), raw.p());
    Vector ytr(static_cast<Index>(train_rows.size()));
    for (std::size_t a = 0; a < train_rows.size(); ++a) {
      Xtr.row(static_cast<Index>(a)) = raw.X.row(train_rows[a]);
      ytr[static_cast<Index>(a)] = raw.y[train_rows[a]];
    }
    Fold& fold = fold_data[static_cast<std::size_t>(f)];
    fold.train = standardize(Xtr, ytr, raw.column_names);
    fold.holdout_X_std.resize(static_cast<Index>(ho_rows.size()), raw.p());
    fold.holdout_y.resize(static_cast<Index>(ho_rows.size()));
    for (std::size_t a = 0; a < ho_rows.size(); ++a) {
      fold.holdout_X_std.row(static_cast<Index>(a)) =
          (raw.X.row(ho_rows[a]).transpose() - fold.train.col_means)
              .cwiseQuotient(fold.train.col_scales)
              .transpose();
      fold.holdout_y[static_cast<Index>(a)] = raw.y[ho_rows[a]];
    }
  }

  // One warm-started lambda1 path per (fold, lambda2) cell.
  const std::size_t n_l1 = l1_grid.size();
  const std::size_t n_l2 = l2_grid.size();
  std::vector<double> fold_errors(n_l2 * n_l1 * static_cast<std::size_t>(folds), 0.0);
  parallel_for(n_l2 * static_cast<std::size_t>(folds), threads, [&](std::size_t job) {
    const std::size_t il2 = job / static_cast<std::size_t>(folds);
    const auto f = static_cast<std::size_t>(job % static_cast<std::size_t>(folds));
    const Fold& fold = fold_data[f];
    const SlsPath path = fit_path(fold.train, L, l1_grid, l2_grid[il2], penalty, options);
    for (std::size_t il1 = 0; il1 < n_l1; ++il1) {
      const Vector pred = fold.holdout_X_std * path.fits[il1].beta +
                          Vector::Constant(fold.holdout_y.size(), fold.train.y_mean);
      fold_errors[(il2 * n_l1 + il1) * static_cast<std::size_t>(folds) + f] =
          (fold.holdout_y - pred).squaredNorm() / static_cast<double>(fold.holdout_y.size());
    }
  });

  result.cells.reserve(n_l2 * n_l1);
  for (std::size_t il2 = 0; il2 < n_l2; ++il2)
    for (std::size_t il1 = 0; il1 < n_l1; ++il1) {
      CvCell cell;
      cell.lambda1 = l1_grid[il1];
      cell.lambda2 = l2_grid[il2];
      double mean = 0.0;
      for (int f = 0; f < folds; ++f)
        mean += fold_errors[(il2 * n_l1 + il1) * static_cast<std::size_t>(folds) +
                            static_cast<std::size_t>(f)];
      mean /= folds;
      double var = 0.0;
      for (int f = 0; f < folds; ++f) {
        const double d = fold_errors[(il2 * n_l1 + il1) * static_cast<std::size_t>(folds) +
                                     static_cast<std::size_t>(f)] -
                         mean;
        var += d * d;
      }
      cell.cv_error = mean;
      cell.se = folds > 1 ? std::sqrt(var / (folds - 1) / folds) : 0.0;
      result.cells.push_back(cell);
    }

  // Minimal cv_error; ties prefer the sparser (larger lambda1), then larger
  // lambda2. Scanning with this comparator makes the pick grid-order invariant.
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    if (result.best_index < 0) {
      result.best_index = static_cast<int>(i);
      continue;
    }
    const CvCell& cur = result.cells[i];
    const CvCell& best = result.cells[static_cast<std::size_t>(result.best_index)];
    const bool better = cur.cv_error < best.cv_error ||
                        (cur.cv_error == best.cv_error &&
                         (cur.lambda1 > best.lambda1 ||
                          (cur.lambda1 == best.lambda1 && cur.lambda2 > best.lambda2)));
    if (better) result.best_index = static_cast<int>(i);
  }
  result.best_lambda1 = result.best().lambda1;
  result.best_lambda2 = result.best().lambda2;
  return result;
}

}  // namespace sls
