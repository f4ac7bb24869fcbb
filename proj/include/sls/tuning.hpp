#pragma once

#include "sls/dataset.hpp"
#include "sls/laplacian.hpp"
#include "sls/solver.hpp"
#include "sls/types.hpp"

#include <cstdint>
#include <vector>

namespace sls {

struct CvGrids {
  std::vector<double> lambda1;  // any order; normalized to descending internally
  std::vector<double> lambda2;
};

/// Default search grids with half-power-of-two spacing: lambda1 runs from
/// lambda1_max down by factors of 2^{-1/2} (17 points), lambda2 spans
/// 2^{-4} .. 2^{4} (17 points).
CvGrids default_grid(const StandardizedDataset& ds);

struct CvCell {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double cv_error = 0.0;  // mean over folds of held-out mean squared prediction error
  double se = 0.0;        // standard error of the fold errors
};

struct CvResult {
  std::vector<CvCell> cells;  // lambda2 outer (ascending), lambda1 inner (descending)
  int best_index = -1;
  double best_lambda1 = 0.0;
  double best_lambda2 = 0.0;
  std::vector<int> fold_assignment;  // fold id per observation
  int folds = 0;
  std::uint64_t seed = 0;

  const CvCell& best() const { return cells[static_cast<std::size_t>(best_index)]; }
};

/// V-fold cross-validation over the (lambda1, lambda2) grid. Folds are dealt
/// round-robin over a seeded shuffle; each training fold is re-standardized
/// and its scaling applied to the held-out rows; the Laplacian is built once
/// outside and held fixed. Ties in cv_error break toward larger lambda1, then
/// larger lambda2.
CvResult cv_select(const RawDataset& raw, const Laplacian& L, const CvGrids& grids, int folds,
                   const PenaltyConfig& penalty, std::uint64_t seed, unsigned threads = 1,
                   const FitOptions& options = {});

}  // namespace sls
