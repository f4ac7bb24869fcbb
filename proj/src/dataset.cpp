#include "sls/dataset.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sls {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_numeric_cell(const std::string& cell, std::size_t row, std::size_t col) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (cell.empty() || end != begin + cell.size())
    throw ValidationError("load_csv: non-numeric cell '" + cell + "' at row " +
                          std::to_string(row) + ", column " + std::to_string(col));
  if (!std::isfinite(value))
    throw ValidationError("load_csv: non-finite value '" + cell + "' at row " +
                          std::to_string(row) + ", column " + std::to_string(col));
  return value;
}

}  // namespace

void RawDataset::validate() const {
  if (n() < 2) throw ValidationError("dataset: n >= 2 required, got n=" + std::to_string(n()));
  if (p() < 1) throw ValidationError("dataset: p >= 1 required");
  if (y.size() != n()) throw ValidationError("dataset: y length does not match X rows");
  if (!y.allFinite() || !X.allFinite())
    throw ValidationError("dataset: non-finite entries are not allowed");
}

RawDataset load_csv(const std::string& path, bool has_header, const ResponseColumn& response) {
  std::ifstream in(path);
  if (!in) throw ValidationError("load_csv: cannot open file '" + path + "'");

  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (has_header && header.empty()) {
      header = cells;
      width = cells.size();
      continue;
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width)
      throw ValidationError("load_csv: ragged row at line " + std::to_string(lineno) + ": expected " +
                            std::to_string(width) + " cells, got " + std::to_string(cells.size()));
    std::vector<double> values(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      values[c] = parse_numeric_cell(cells[c], lineno, c + 1);
    rows.push_back(std::move(values));
  }

  if (width == 0) throw ValidationError("load_csv: file '" + path + "' has no data");
  if (rows.size() < 2)
    throw ValidationError("load_csv: n >= 2 required, got " + std::to_string(rows.size()) + " data row(s)");
  if (width < 2) throw ValidationError("load_csv: need a response column plus at least one predictor");

  // Resolve the response column.
  std::size_t resp = 0;
  std::string resp_name;
  if (std::holds_alternative<std::string>(response)) {
    const auto& name = std::get<std::string>(response);
    if (!has_header)
      throw ValidationError("load_csv: response column named '" + name + "' requires a header");
    bool found = false;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == name) {
        resp = c;
        found = true;
        break;
      }
    }
    if (!found) throw ValidationError("load_csv: response column '" + name + "' not found in header");
    resp_name = name;
  } else {
    const Index idx = std::get<Index>(response);
    if (idx < 0 || static_cast<std::size_t>(idx) >= width)
      throw ValidationError("load_csv: response column index " + std::to_string(idx) +
                            " out of range [0, " + std::to_string(width - 1) + "]");
    resp = static_cast<std::size_t>(idx);
    resp_name = has_header ? header[resp] : "y";
  }

  const auto n = static_cast<Index>(rows.size());
  const auto p = static_cast<Index>(width - 1);
  RawDataset ds;
  ds.y.resize(n);
  ds.X.resize(n, p);
  ds.response_name = resp_name;
  ds.column_names.reserve(static_cast<std::size_t>(p));
  for (std::size_t c = 0; c < width; ++c) {
    if (c == resp) continue;
    ds.column_names.push_back(has_header ? header[c] : "x" + std::to_string(ds.column_names.size() + 1));
  }
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    Index k = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == resp)
        ds.y[i] = row[c];
      else
        ds.X(i, k++) = row[c];
    }
  }
  ds.validate();
  return ds;
}

StandardizedDataset standardize(const RawDataset& raw) {
  raw.validate();
  const Index n = raw.n();
  const Index p = raw.p();

  StandardizedDataset out;
  out.column_names = raw.column_names;
  out.y_mean = raw.y.mean();
  out.y_c = raw.y.array() - out.y_mean;
  out.col_means.resize(p);
  out.col_scales.resize(p);
  out.X_s.resize(n, p);

  for (Index j = 0; j < p; ++j) {
    const double mean = raw.X.col(j).mean();
    const Vector centered = raw.X.col(j).array() - mean;
    const double scale = std::sqrt(centered.squaredNorm() / static_cast<double>(n));
    if (!(scale > 1e-14 * std::max(1.0, std::abs(mean)))) {
      const std::string name = j < static_cast<Index>(raw.column_names.size())
                                   ? raw.column_names[static_cast<std::size_t>(j)]
                                   : "x" + std::to_string(j + 1);
      throw ValidationError("standardize: column '" + name + "' (index " + std::to_string(j) +
                            ") is constant; its scale would be zero");
    }
    out.col_means[j] = mean;
    out.col_scales[j] = scale;
    out.X_s.col(j) = centered / scale;
  }
  return out;
}

StandardizedDataset standardize(const Matrix& X, const Vector& y,
                                std::vector<std::string> column_names) {
  RawDataset raw;
  raw.X = X;
  raw.y = y;
  if (column_names.empty()) {
    for (Index j = 0; j < X.cols(); ++j) column_names.push_back("x" + std::to_string(j + 1));
  }
  raw.column_names = std::move(column_names);
  return standardize(raw);
}

OriginalScaleCoefs coefficients_to_original_scale(const Vector& fit_coefs,
                                                  const StandardizedDataset& ds) {
  if (fit_coefs.size() != ds.p())
    throw ValidationError("coefficients_to_original_scale: coefficient length " +
                          std::to_string(fit_coefs.size()) + " does not match p=" +
                          std::to_string(ds.p()));
  OriginalScaleCoefs out;
  out.coefs = fit_coefs.cwiseQuotient(ds.col_scales);
  out.intercept = ds.y_mean - out.coefs.dot(ds.col_means);
  return out;
}

}  // namespace sls
