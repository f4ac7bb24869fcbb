#include "sls/dataset.hpp"

#include "sls/rng.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

using namespace sls;

namespace {

std::string write_temp_csv(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/sls_test_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_csv parses a small file with header") {
  const auto path = write_temp_csv("basic.csv", "y,x1,x2\n1,2,3\n4,5,6\n7,8,9\n");
  const RawDataset ds = load_csv(path, true, std::string("y"));
  CHECK(ds.n() == 3);
  CHECK(ds.p() == 2);
  CHECK(ds.y[0] == 1.0);
  CHECK(ds.X(0, 0) == 2.0);
  CHECK(ds.X(2, 1) == 9.0);
  CHECK(ds.column_names == std::vector<std::string>{"x1", "x2"});
  std::remove(path.c_str());
}

TEST_CASE("load_csv response by index, no header") {
  const auto path = write_temp_csv("noheader.csv", "1,2,3\n4,5,6\n");
  const RawDataset ds = load_csv(path, false, Index{2});
  CHECK(ds.p() == 2);
  CHECK(ds.y[1] == 6.0);
  CHECK(ds.X(1, 0) == 4.0);
  std::remove(path.c_str());
}

TEST_CASE("load_csv error paths name the offending cell") {
  const auto nan_path = write_temp_csv("nan.csv", "y,x1\n1,NaN\n2,3\n");
  CHECK_THROWS_WITH_AS(load_csv(nan_path, true, std::string("y")),
                       doctest::Contains("row 2, column 2"), ValidationError);

  const auto text_path = write_temp_csv("text.csv", "y,x1\n1,2\n2,abc\n");
  CHECK_THROWS_WITH_AS(load_csv(text_path, true, std::string("y")),
                       doctest::Contains("non-numeric"), ValidationError);

  const auto short_path = write_temp_csv("short.csv", "y,x1\n1,2\n");
  CHECK_THROWS_WITH_AS(load_csv(short_path, true, std::string("y")),
                       doctest::Contains("n >= 2"), ValidationError);

  const auto ragged_path = write_temp_csv("ragged.csv", "y,x1,x2\n1,2,3\n4,5\n");
  CHECK_THROWS_WITH_AS(load_csv(ragged_path, true, std::string("y")),
                       doctest::Contains("ragged"), ValidationError);

  CHECK_THROWS_AS(load_csv("/tmp/sls_does_not_exist.csv", true, std::string("y")), ValidationError);

  const auto ok_path = write_temp_csv("resp.csv", "y,x1\n1,2\n3,4\n");
  CHECK_THROWS_WITH_AS(load_csv(ok_path, true, std::string("missing")),
                       doctest::Contains("not found"), ValidationError);
  std::remove(nan_path.c_str());
  std::remove(text_path.c_str());
  std::remove(short_path.c_str());
  std::remove(ragged_path.c_str());
  std::remove(ok_path.c_str());
}

TEST_CASE("standardize centers and scales to squared norm n") {
  RawDataset raw;
  raw.X.resize(3, 1);
  raw.X << 1, 2, 3;
  raw.y.resize(3);
  raw.y << 1, 0, -1;
  raw.column_names = {"x1"};

  const StandardizedDataset ds = standardize(raw);
  const double root = std::sqrt(1.5);
  CHECK(ds.X_s(0, 0) == doctest::Approx(-root).epsilon(1e-14));
  CHECK(ds.X_s(1, 0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ds.X_s(2, 0) == doctest::Approx(root).epsilon(1e-14));
  CHECK(ds.y_c.sum() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("standardize is idempotent on already standardized columns") {
  RawDataset raw;
  raw.X.resize(3, 1);
  const double root = std::sqrt(1.5);
  raw.X << -root, 0, root;
  raw.y.resize(3);
  raw.y << 1, 2, 3;
  raw.column_names = {"x1"};
  const StandardizedDataset ds = standardize(raw);
  CHECK((ds.X_s - raw.X).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("standardize rejects constant columns by name") {
  RawDataset raw;
  raw.X.resize(3, 2);
  raw.X << 1, 5, 2, 5, 3, 5;
  raw.y.resize(3);
  raw.y << 1, 2, 3;
  raw.column_names = {"good", "flat"};
  CHECK_THROWS_WITH_AS(standardize(raw), doctest::Contains("flat"), ValidationError);
}

TEST_CASE("standardize invariants on random data") {
  Rng rng(7);
  const Index n = 40, p = 6;
  Matrix X(n, p);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    y[i] = rng.normal() * 3 + 1;
    for (Index j = 0; j < p; ++j) X(i, j) = rng.normal() * (1.0 + j) + j;
  }
  const StandardizedDataset ds = standardize(X, y);
  for (Index j = 0; j < p; ++j) {
    CHECK(std::abs(ds.X_s.col(j).sum()) <= 1e-8 * n);
    CHECK(std::abs(ds.X_s.col(j).squaredNorm() - n) <= 1e-8 * n);
  }
  CHECK(std::abs(ds.y_c.sum()) <= 1e-8 * n);
}

TEST_CASE("coefficients_to_original_scale") {
  Rng rng(11);
  const Index n = 25, p = 4;
  Matrix X(n, p);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    y[i] = rng.normal() + 2;
    for (Index j = 0; j < p; ++j) X(i, j) = 2 * rng.normal() + 3 * (j + 1);
  }
  const StandardizedDataset ds = standardize(X, y);

  SUBCASE("zero coefficients give the mean-only model") {
    const auto out = coefficients_to_original_scale(Vector::Zero(p), ds);
    CHECK(out.intercept == doctest::Approx(ds.y_mean));
    CHECK(out.coefs.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("round trip: predictions agree on both scales") {
    Vector beta(p);
    for (Index j = 0; j < p; ++j) beta[j] = rng.normal();
    const auto out = coefficients_to_original_scale(beta, ds);
    const Vector pred_std = ds.X_s * beta + Vector::Constant(n, ds.y_mean);
    const Vector pred_orig = X * out.coefs + Vector::Constant(n, out.intercept);
    CHECK((pred_std - pred_orig).cwiseAbs().maxCoeff() <
          1e-10 * pred_std.cwiseAbs().maxCoeff());
  }

  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(coefficients_to_original_scale(Vector::Zero(p + 1), ds), ValidationError);
  }
}

TEST_CASE("single-predictor back-transform divides by the scale") {
  // Column with mean 2 and population sd 0.5.
  RawDataset raw;
  raw.X.resize(2, 1);
  raw.X << 1.5, 2.5;
  raw.y.resize(2);
  raw.y << 0, 1;
  raw.column_names = {"x1"};
  const StandardizedDataset ds = standardize(raw);
  CHECK(ds.col_means[0] == doctest::Approx(2.0));
  CHECK(ds.col_scales[0] == doctest::Approx(0.5));
  Vector beta(1);
  beta << 0.3;
  const auto out = coefficients_to_original_scale(beta, ds);
  CHECK(out.coefs[0] == doctest::Approx(0.3 / 0.5));
}

TEST_CASE("already standardized data leaves coefficients unchanged") {
  Rng rng(3);
  const Index n = 30, p = 3;
  Matrix X(n, p);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    y[i] = rng.normal();
    for (Index j = 0; j < p; ++j) X(i, j) = rng.normal();
  }
  const StandardizedDataset first = standardize(X, y);
  const StandardizedDataset ds = standardize(first.X_s, first.y_c);
  Vector beta(p);
  beta << 0.5, -1.0, 0.25;
  const auto out = coefficients_to_original_scale(beta, ds);
  CHECK((out.coefs - beta).cwiseAbs().maxCoeff() < 1e-10);
}
