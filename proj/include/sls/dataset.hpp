#pragma once

#include "sls/types.hpp"

#include <string>
#include <variant>
#include <vector>

namespace sls {

struct RawDataset {
  Vector y;
  Matrix X;
  std::vector<std::string> column_names;  // predictor labels, size p
  std::string response_name = "y";

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }
  void validate() const;
};

/// Centered response and design with every column rescaled so its squared
/// norm equals n (population scaling). The original means/scales are kept so
/// fits can be mapped back to the input scale.
struct StandardizedDataset {
  Vector y_c;
  Matrix X_s;
  Vector col_means;
  Vector col_scales;
  double y_mean = 0.0;
  std::vector<std::string> column_names;

  Index n() const { return X_s.rows(); }
  Index p() const { return X_s.cols(); }
};

/// Response selector: column name (requires a header) or 0-based column index.
using ResponseColumn = std::variant<std::string, Index>;

RawDataset load_csv(const std::string& path, bool has_header, const ResponseColumn& response);

StandardizedDataset standardize(const RawDataset& raw);
StandardizedDataset standardize(const Matrix& X, const Vector& y,
                                std::vector<std::string> column_names = {});

struct OriginalScaleCoefs {
  double intercept = 0.0;
  Vector coefs;
};

/// Maps coefficients fitted on the standardized scale back to the original
/// scale, recovering the intercept absorbed by centering.
OriginalScaleCoefs coefficients_to_original_scale(const Vector& fit_coefs,
                                                  const StandardizedDataset& ds);

}  // namespace sls
