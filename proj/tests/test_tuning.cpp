#include "sls/tuning.hpp"

#include "sls/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace sls;

namespace {

RawDataset random_raw(Index n, Index p, Rng& rng, double signal, double noise) {
  RawDataset raw;
  raw.X.resize(n, p);
  raw.y.resize(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) raw.X(i, j) = rng.normal();
  Vector beta = Vector::Zero(p);
  for (Index j = 0; j < std::min<Index>(3, p); ++j) beta[j] = signal;
  raw.y = raw.X * beta;
  for (Index i = 0; i < n; ++i) raw.y[i] += noise * rng.normal();
  for (Index j = 0; j < p; ++j) raw.column_names.push_back("x" + std::to_string(j + 1));
  return raw;
}

PenaltyConfig mcp() { return {PenaltyKind::MCP, 0.0, 3.0}; }

}  // namespace

TEST_CASE("default_grid shape and spacing") {
  Rng rng(81);
  const RawDataset raw = random_raw(30, 5, rng, 1.0, 0.5);
  const StandardizedDataset ds = standardize(raw);
  const CvGrids grids = default_grid(ds);
  REQUIRE(grids.lambda1.size() == 17);
  REQUIRE(grids.lambda2.size() == 17);
  CHECK(grids.lambda1.front() == doctest::Approx(lambda1_max(ds)).epsilon(1e-14));
  for (std::size_t k = 1; k < 17; ++k)
    CHECK(grids.lambda1[k] / grids.lambda1[k - 1] ==
          doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-12));
  CHECK(grids.lambda2.front() == doctest::Approx(std::pow(2.0, -4.0)));
  CHECK(grids.lambda2.back() == doctest::Approx(std::pow(2.0, 4.0)));
  for (std::size_t k = 1; k < 17; ++k)
    CHECK(grids.lambda2[k] / grids.lambda2[k - 1] ==
          doctest::Approx(std::pow(2.0, 0.5)).epsilon(1e-12));
}

TEST_CASE("cv_select is deterministic for a fixed seed") {
  Rng rng(82);
  const RawDataset raw = random_raw(24, 6, rng, 0.8, 0.6);
  const StandardizedDataset ds = standardize(raw);
  CvGrids grids;
  grids.lambda1 = {lambda1_max(ds), 0.3 * lambda1_max(ds), 0.1 * lambda1_max(ds)};
  grids.lambda2 = {0.0, 0.5};
  const Laplacian L = Laplacian::zero(6);
  const CvResult a = cv_select(raw, L, grids, 4, mcp(), 7);
  const CvResult b = cv_select(raw, L, grids, 4, mcp(), 7);
  CHECK(a.fold_assignment == b.fold_assignment);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].cv_error == b.cells[i].cv_error);
    CHECK(a.cells[i].se == b.cells[i].se);
  }
  CHECK(a.best_lambda1 == b.best_lambda1);
  CHECK(a.best_lambda2 == b.best_lambda2);

  const CvResult c = cv_select(raw, L, grids, 4, mcp(), 8);
  CHECK(a.fold_assignment != c.fold_assignment);
}

TEST_CASE("fold sizes differ by at most one") {
  Rng rng(83);
  const RawDataset raw = random_raw(23, 4, rng, 0.8, 0.6);
  CvGrids grids;
  grids.lambda1 = {1.0, 0.1};
  grids.lambda2 = {0.0};
  const CvResult cv = cv_select(raw, Laplacian::zero(4), grids, 5, mcp(), 3);
  std::vector<int> counts(5, 0);
  for (const int f : cv.fold_assignment) counts[static_cast<std::size_t>(f)]++;
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  CHECK(*hi - *lo <= 1);
}

TEST_CASE("strong noiseless signal drives lambda1 small and cv error low") {
  Rng rng(84);
  const RawDataset raw = random_raw(40, 6, rng, 2.0, 0.0);  // noiseless y = X beta
  const StandardizedDataset ds = standardize(raw);
  const CvGrids grids = default_grid(ds);
  CvGrids small = grids;
  small.lambda2 = {0.0};
  const CvResult cv = cv_select(raw, Laplacian::zero(6), small, 5, mcp(), 5);
  CHECK(cv.best_lambda1 < 0.1 * lambda1_max(ds));

  double zero_model_error = 0.0;
  for (const auto& cell : cv.cells)
    if (cell.lambda1 == grids.lambda1.front()) zero_model_error = cell.cv_error;
  CHECK(cv.best().cv_error < 0.01 * zero_model_error);
}

TEST_CASE("cv_error at lambda_max matches the held-out variance around the training mean") {
  Rng rng(85);
  RawDataset raw = random_raw(60, 4, rng, 0.0, 1.0);  // pure noise
  const StandardizedDataset ds = standardize(raw);
  CvGrids grids;
  grids.lambda1 = {lambda1_max(ds) * 1.0000001};
  grids.lambda2 = {0.0};
  const int V = 5;
  const CvResult cv = cv_select(raw, Laplacian::zero(4), grids, V, mcp(), 11);

  // The all-zero model predicts the training mean in every fold.
  double expected = 0.0;
  for (int f = 0; f < V; ++f) {
    double train_sum = 0.0, mse = 0.0;
    int train_n = 0, ho_n = 0;
    for (Index i = 0; i < raw.n(); ++i)
      if (cv.fold_assignment[static_cast<std::size_t>(i)] != f) {
        train_sum += raw.y[i];
        ++train_n;
      }
    const double train_mean = train_sum / train_n;
    for (Index i = 0; i < raw.n(); ++i)
      if (cv.fold_assignment[static_cast<std::size_t>(i)] == f) {
        mse += (raw.y[i] - train_mean) * (raw.y[i] - train_mean);
        ++ho_n;
      }
    expected += mse / ho_n;
  }
  expected /= V;
  CHECK(cv.cells[0].cv_error == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("leave-one-out runs") {
  Rng rng(86);
  const RawDataset raw = random_raw(10, 3, rng, 1.0, 0.3);
  CvGrids grids;
  grids.lambda1 = {0.5, 0.1};
  grids.lambda2 = {0.0};
  const CvResult cv = cv_select(raw, Laplacian::zero(3), grids, 10, mcp(), 2);
  std::vector<int> counts(10, 0);
  for (const int f : cv.fold_assignment) counts[static_cast<std::size_t>(f)]++;
  for (const int c : counts) CHECK(c == 1);
}

TEST_CASE("best pair is invariant to grid ordering") {
  Rng rng(87);
  const RawDataset raw = random_raw(30, 5, rng, 1.0, 0.5);
  const StandardizedDataset ds = standardize(raw);
  const double lmax = lambda1_max(ds);
  CvGrids fwd;
  fwd.lambda1 = {lmax, 0.5 * lmax, 0.25 * lmax, 0.05 * lmax};
  fwd.lambda2 = {0.0, 0.25, 1.0};
  CvGrids rev = fwd;
  std::reverse(rev.lambda1.begin(), rev.lambda1.end());
  std::reverse(rev.lambda2.begin(), rev.lambda2.end());
  const Laplacian L = Laplacian::zero(5);
  const CvResult a = cv_select(raw, L, fwd, 5, mcp(), 9);
  const CvResult b = cv_select(raw, L, rev, 5, mcp(), 9);
  CHECK(a.best_lambda1 == b.best_lambda1);
  CHECK(a.best_lambda2 == b.best_lambda2);
}

TEST_CASE("threaded and serial cv agree bitwise") {
  Rng rng(88);
  const RawDataset raw = random_raw(36, 8, rng, 1.0, 0.5);
  const StandardizedDataset ds = standardize(raw);
  CvGrids grids;
  grids.lambda1 = default_grid(ds).lambda1;
  grids.lambda2 = {0.0, 0.5, 2.0};
  const Laplacian L = Laplacian::zero(8);
  const CvResult serial = cv_select(raw, L, grids, 4, mcp(), 13, 1);
  const CvResult threaded = cv_select(raw, L, grids, 4, mcp(), 13, 4);
  REQUIRE(serial.cells.size() == threaded.cells.size());
  for (std::size_t i = 0; i < serial.cells.size(); ++i)
    CHECK(serial.cells[i].cv_error == threaded.cells[i].cv_error);
}

TEST_CASE("validation errors") {
  Rng rng(89);
  const RawDataset raw = random_raw(10, 3, rng, 1.0, 0.3);
  CvGrids grids;
  grids.lambda1 = {0.5};
  grids.lambda2 = {0.0};
  CHECK_THROWS_AS(cv_select(raw, Laplacian::zero(3), grids, 11, mcp(), 1), ValidationError);
  CHECK_THROWS_AS(cv_select(raw, Laplacian::zero(3), grids, 1, mcp(), 1), ValidationError);
  CvGrids empty;
  empty.lambda2 = {0.0};
  CHECK_THROWS_AS(cv_select(raw, Laplacian::zero(3), empty, 5, mcp(), 1), ValidationError);
}
