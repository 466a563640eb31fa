#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gperc/errors.hpp"

namespace gperc {

struct ColumnRange {
  double min = 0.0;
  double max = 0.0;
};

struct Dataset {
  std::vector<double> values;  // row-major, rows x cols
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<int> labels;
  std::vector<std::string> column_names;
  std::vector<ColumnRange> norm_stats;  // empty until normalize

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * cols, cols};
  }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
};

// Named schemas: iris-2class, iris-3class-regression, iris-multiclass,
// wdbc, pima. "generic" treats the last column as an integer label.
struct DatasetSchema {
  std::string name;
  std::size_t expected_columns = 0;  // 0 = accept any width
  std::size_t label_column = 0;
  std::vector<std::pair<std::string, int>> label_mapping;  // empty = parse as int
  std::vector<std::size_t> dropped_columns;   // raw file positions
  std::vector<std::size_t> zero_as_missing;   // feature positions, post-drop
  bool skip_unmapped_labels = false;          // subset schemas drop other rows
  std::vector<std::string> default_column_names;

  static DatasetSchema named(std::string_view schema_name);
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

inline const std::vector<std::string> kIrisColumns = {
    "sepal_length", "sepal_width", "petal_length", "petal_width"};
inline const std::vector<std::string> kPimaColumns = {
    "pregnancies", "glucose",  "blood_pressure", "skin_thickness",
    "insulin",     "bmi",      "pedigree",       "age"};

}  // namespace detail

inline DatasetSchema DatasetSchema::named(std::string_view schema_name) {
  DatasetSchema s;
  s.name = std::string(schema_name);
  if (schema_name == "iris-multiclass") {
    s.expected_columns = 5;
    s.label_column = 4;
    s.label_mapping = {{"Iris-setosa", 0}, {"Iris-versicolor", 1}, {"Iris-virginica", 2}};
    s.default_column_names = detail::kIrisColumns;
  } else if (schema_name == "iris-3class-regression") {
    s.expected_columns = 5;
    s.label_column = 4;
    s.label_mapping = {{"Iris-setosa", +1}, {"Iris-versicolor", -1}, {"Iris-virginica", +1}};
    s.default_column_names = detail::kIrisColumns;
  } else if (schema_name == "iris-2class") {
    s.expected_columns = 5;
    s.label_column = 4;
    s.label_mapping = {{"Iris-setosa", +1}, {"Iris-versicolor", -1}};
    s.skip_unmapped_labels = true;  // virginica rows are not part of this task
    s.default_column_names = detail::kIrisColumns;
  } else if (schema_name == "wdbc") {
    s.expected_columns = 32;
    s.label_column = 1;
    s.label_mapping = {{"M", 1}, {"B", 0}};
    s.dropped_columns = {0};  // sample id
  } else if (schema_name == "pima") {
    s.expected_columns = 9;
    s.label_column = 8;
    s.label_mapping = {{"0", 0}, {"1", 1}};
    s.zero_as_missing = {1, 2, 3, 4, 5};  // physiological columns where 0 means absent
    s.default_column_names = detail::kPimaColumns;
  } else if (schema_name == "generic") {
    // last column is the label; width taken from the file
  } else {
    throw ConfigError("unknown schema: " + std::string(schema_name));
  }
  return s;
}

inline Dataset load_csv(const std::string& path, const DatasetSchema& schema_in) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  DatasetSchema schema = schema_in;
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  bool saw_data_row = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> cells = detail::split_csv_line(line);

    if (!saw_data_row && schema.name == "generic") {
      schema.expected_columns = cells.size();
      schema.label_column = cells.size() - 1;
    }
    if (cells.size() != schema.expected_columns)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(schema.expected_columns) + " columns, got " +
                      std::to_string(cells.size()));

    // Header auto-detection: a first row whose feature cells are not numeric.
    if (!saw_data_row && header.empty()) {
      bool numeric = true;
      for (std::size_t j = 0; j < cells.size(); ++j) {
        if (j == schema.label_column) continue;
        if (std::find(schema.dropped_columns.begin(), schema.dropped_columns.end(), j) !=
            schema.dropped_columns.end())
          continue;
        if (!detail::parse_double(cells[j])) {
          numeric = false;
          break;
        }
      }
      if (!numeric) {
        header = cells;
        continue;
      }
    }

    // Label.
    const std::string& token = cells[schema.label_column];
    int label = 0;
    if (schema.label_mapping.empty()) {
      auto v = detail::parse_double(token);
      if (!v || *v != std::floor(*v))
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": label is not an integer: '" + token + "'");
      label = static_cast<int>(*v);
    } else {
      auto it = std::find_if(schema.label_mapping.begin(), schema.label_mapping.end(),
                             [&](const auto& kv) { return kv.first == token; });
      if (it == schema.label_mapping.end()) {
        if (schema.skip_unmapped_labels) continue;
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": unknown label token: '" + token + "'");
      }
      label = it->second;
    }

    // Features.
    std::vector<double> feats;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j == schema.label_column) continue;
      if (std::find(schema.dropped_columns.begin(), schema.dropped_columns.end(), j) !=
          schema.dropped_columns.end())
        continue;
      auto v = detail::parse_double(cells[j]);
      if (!v)
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": malformed numeric field '" + cells[j] + "'");
      feats.push_back(*v);
    }
    if (!saw_data_row) {
      data.cols = feats.size();
      saw_data_row = true;
    }
    data.values.insert(data.values.end(), feats.begin(), feats.end());
    data.labels.push_back(label);
    ++data.rows;
  }

  if (data.rows == 0) throw DataError(path + ": no data rows");

  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j == schema.label_column) continue;
      if (std::find(schema.dropped_columns.begin(), schema.dropped_columns.end(), j) !=
          schema.dropped_columns.end())
        continue;
      data.column_names.push_back(header[j]);
    }
  } else if (schema.default_column_names.size() == data.cols) {
    data.column_names = schema.default_column_names;
  } else {
    for (std::size_t j = 0; j < data.cols; ++j)
      data.column_names.push_back("f" + std::to_string(j));
  }
  return data;
}

// Zeros in the schema's designated columns are treated as missing and
// replaced by the median of the non-zero values among fit_indices. The fit
// set is the training split, so no test statistics leak in.
inline Dataset impute_missing(const Dataset& data, const DatasetSchema& schema,
                              std::span<const std::size_t> fit_indices) {
  if (fit_indices.empty()) throw ConfigError("impute_missing: empty fit set");
  if (schema.zero_as_missing.empty()) return data;

  Dataset out = data;
  for (std::size_t col : schema.zero_as_missing) {
    std::vector<double> nonzero;
    for (std::size_t i : fit_indices) {
      const double v = data.at(i, col);
      if (v != 0.0) nonzero.push_back(v);
    }
    if (nonzero.empty())
      throw DataError("impute_missing: column " + data.column_names[col] +
                      " has no non-zero fit values; median undefined");
    std::sort(nonzero.begin(), nonzero.end());
    const std::size_t n = nonzero.size();
    const double median =
        n % 2 == 1 ? nonzero[n / 2] : 0.5 * (nonzero[n / 2 - 1] + nonzero[n / 2]);
    for (std::size_t i = 0; i < out.rows; ++i)
      if (out.at(i, col) == 0.0) out.at(i, col) = median;
  }
  return out;
}

// Min-max scaling fit on fit_indices and applied to every row. In-fit
// values land in [0,1]; out-of-fit rows may fall outside and are not
// clamped. Constant columns map to 0.
inline Dataset normalize(const Dataset& data,
                         std::span<const std::size_t> fit_indices) {
  if (fit_indices.empty()) throw ConfigError("normalize: empty fit set");
  Dataset out = data;
  out.norm_stats.resize(data.cols);
  for (std::size_t j = 0; j < data.cols; ++j) {
    double lo = data.at(fit_indices[0], j), hi = lo;
    for (std::size_t i : fit_indices) {
      lo = std::min(lo, data.at(i, j));
      hi = std::max(hi, data.at(i, j));
    }
    out.norm_stats[j] = {lo, hi};
    const double span = hi - lo;
    for (std::size_t i = 0; i < out.rows; ++i)
      out.at(i, j) = span > 0.0 ? (data.at(i, j) - lo) / span : 0.0;
  }
  return out;
}

// New trailing column: the product of all existing feature columns.
inline Dataset append_product_feature(const Dataset& data) {
  Dataset out;
  out.rows = data.rows;
  out.cols = data.cols + 1;
  out.labels = data.labels;
  out.column_names = data.column_names;
  out.column_names.push_back("product");
  out.values.reserve(out.rows * out.cols);
  for (std::size_t i = 0; i < data.rows; ++i) {
    auto r = data.row(i);
    out.values.insert(out.values.end(), r.begin(), r.end());
    double product = 1.0;
    for (double v : r) product *= v;
    out.values.push_back(product);
  }
  return out;
}

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded uniform shuffle; the first ceil(N * (1 - test_fraction)) indices
// form the training set.
inline SplitIndices split_indices(std::size_t rows, const SplitSpec& spec) {
  if (rows < 2) throw DataError("split: need at least 2 rows");
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    throw ConfigError("split: test_fraction must be in (0,1)");
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto train_count = static_cast<std::size_t>(
      std::ceil(static_cast<double>(rows) * (1.0 - spec.test_fraction)));
  if (train_count == 0 || train_count == rows)
    throw ConfigError("split: test_fraction yields an empty side");
  SplitIndices idx;
  idx.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_count));
  idx.test.assign(order.begin() + static_cast<std::ptrdiff_t>(train_count), order.end());
  return idx;
}

inline Dataset take_rows(const Dataset& data, std::span<const std::size_t> indices) {
  Dataset out;
  out.rows = indices.size();
  out.cols = data.cols;
  out.column_names = data.column_names;
  out.norm_stats = data.norm_stats;
  out.values.reserve(out.rows * out.cols);
  out.labels.reserve(out.rows);
  for (std::size_t i : indices) {
    auto r = data.row(i);
    out.values.insert(out.values.end(), r.begin(), r.end());
    out.labels.push_back(data.labels[i]);
  }
  return out;
}

inline std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec) {
  const SplitIndices idx = split_indices(data.rows, spec);
  return {take_rows(data, idx.train), take_rows(data, idx.test)};
}

// Feature columns plus the label as the last column. Re-loadable through
// the "generic" schema.
inline void write_csv(const Dataset& data, std::ostream& out) {
  for (std::size_t j = 0; j < data.cols; ++j) out << data.column_names[j] << ',';
  out << "label\n";
  char buf[40];
  for (std::size_t i = 0; i < data.rows; ++i) {
    for (std::size_t j = 0; j < data.cols; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.at(i, j));
      out << buf << ',';
    }
    out << data.labels[i] << '\n';
  }
}

}  // namespace gperc
