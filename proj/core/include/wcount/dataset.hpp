#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wcount/regression.hpp"

namespace wcount {

// Which CSV columns feed which observation fields.
struct ColumnBindings {
  std::string count;
  std::optional<std::string> exposure;  // absent: exposure_t = default_t
  std::vector<std::string> covariates;
  double default_t = 1.0;
};

struct CountDataset {
  std::vector<Observation> rows;
  std::vector<std::string> covariate_names;
  std::string source_path;

  size_t n() const { return rows.size(); }
  double total_weight() const;
  // Weight-averaged covariate column means (used for centering).
  std::vector<double> weighted_covariate_means() const;
};

// Parse failure with 1-based data-row number (first row after the header is
// row 1) and the offending column name.
struct ParseError : std::runtime_error {
  ParseError(std::string msg, int row, std::string column)
      : std::runtime_error(std::move(msg)), row(row), column(std::move(column)) {}
  int row;
  std::string column;
};

// CSV with a header row, comma separated, '.' decimal point. Counts must be
// non-negative integers, exposures strictly positive, and every bound cell
// present; violations throw ParseError naming the row and column.
CountDataset parse_dataset(const std::string& path, const ColumnBindings& bindings);
CountDataset parse_dataset(std::istream& in, const ColumnBindings& bindings,
                           const std::string& source_path = "<stream>");

// Writes the schema parse_dataset reads: count, covariates, exposure column
// "t". Floats are serialized with 17 significant digits so a round trip is
// value-exact.
void write_dataset_csv(std::ostream& out, const CountDataset& ds);
void write_dataset_csv(const std::string& path, const CountDataset& ds);

}  // namespace wcount
