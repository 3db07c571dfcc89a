#include "wcount/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wcount {

double CountDataset::total_weight() const {
  double s = 0.0;
  for (const auto& r : rows) s += r.weight;
  return s;
}

std::vector<double> CountDataset::weighted_covariate_means() const {
  std::vector<double> means(covariate_names.size(), 0.0);
  double w_total = 0.0;
  for (const auto& r : rows) {
    w_total += r.weight;
    for (size_t k = 0; k < means.size(); ++k)
      means[k] += r.weight * r.covariates[k];
  }
  if (w_total > 0.0)
    for (auto& m : means) m /= w_total;
  return means;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.emplace_back(trim(std::string_view(line).substr(start)));
      break;
    }
    out.emplace_back(trim(std::string_view(line).substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

double parse_double_cell(const std::string& cell, int row, const std::string& col) {
  if (cell.empty())
    throw ParseError("missing value in row " + std::to_string(row) +
                         ", column '" + col + "'",
                     row, col);
  const char* begin = cell.data();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end != begin + cell.size() || errno == ERANGE || !std::isfinite(v))
    throw ParseError("malformed number '" + cell + "' in row " +
                         std::to_string(row) + ", column '" + col + "'",
                     row, col);
  return v;
}

int parse_count_cell(const std::string& cell, int row, const std::string& col) {
  if (cell.empty())
    throw ParseError("missing value in row " + std::to_string(row) +
                         ", column '" + col + "'",
                     row, col);
  long v = 0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size())
    throw ParseError("count value '" + cell + "' in row " +
                         std::to_string(row) + ", column '" + col +
                         "' is not an integer",
                     row, col);
  if (v < 0)
    throw ParseError("count value in row " + std::to_string(row) +
                         ", column '" + col + "' is negative",
                     row, col);
  return static_cast<int>(v);
}

size_t column_index(const std::vector<std::string>& header,
                    const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end())
    throw ParseError("unknown column '" + name + "'", 0, name);
  return static_cast<size_t>(it - header.begin());
}

}  // namespace

CountDataset parse_dataset(std::istream& in, const ColumnBindings& bindings,
                           const std::string& source_path) {
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("empty input: header row required", 0, "");
  const auto header = split_csv_line(line);

  const size_t count_col = column_index(header, bindings.count);
  std::optional<size_t> exposure_col;
  if (bindings.exposure)
    exposure_col = column_index(header, *bindings.exposure);
  std::vector<size_t> cov_cols;
  for (const auto& name : bindings.covariates)
    cov_cols.push_back(column_index(header, name));

  CountDataset ds;
  ds.covariate_names = bindings.covariates;
  ds.source_path = source_path;

  int row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_csv_line(line);
    auto cell = [&](size_t idx, const std::string& col) -> const std::string& {
      static const std::string empty;
      if (idx >= cells.size())
        throw ParseError("row " + std::to_string(row) + " is missing column '" +
                             col + "'",
                         row, col);
      return cells[idx];
    };

    Observation obs;
    obs.count = parse_count_cell(cell(count_col, bindings.count), row, bindings.count);
    if (exposure_col) {
      obs.exposure_t =
          parse_double_cell(cell(*exposure_col, *bindings.exposure), row,
                            *bindings.exposure);
      if (!(obs.exposure_t > 0.0))
        throw ParseError("exposure in row " + std::to_string(row) +
                             " must be positive",
                         row, *bindings.exposure);
    } else {
      obs.exposure_t = bindings.default_t;
    }
    obs.covariates.reserve(cov_cols.size());
    for (size_t k = 0; k < cov_cols.size(); ++k)
      obs.covariates.push_back(parse_double_cell(
          cell(cov_cols[k], bindings.covariates[k]), row, bindings.covariates[k]));
    ds.rows.push_back(std::move(obs));
  }
  return ds;
}

CountDataset parse_dataset(const std::string& path,
                           const ColumnBindings& bindings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  return parse_dataset(in, bindings, path);
}

void write_dataset_csv(std::ostream& out, const CountDataset& ds) {
  out << "count";
  for (const auto& n : ds.covariate_names) out << ',' << n;
  out << ",t\n";
  char buf[64];
  for (const auto& r : ds.rows) {
    out << r.count;
    for (const double x : r.covariates) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out << ',' << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", r.exposure_t);
    out << ',' << buf << '\n';
  }
}

void write_dataset_csv(const std::string& path, const CountDataset& ds) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_dataset_csv(out, ds);
}

}  // namespace wcount
