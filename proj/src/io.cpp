#include "skewbs/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "skewbs/errors.hpp"

namespace skewbs {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool contains(const std::vector<std::string>& names, const std::string& name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParseError("no column named '" + name + "' in header", 1);
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (!have_header) {
      for (auto cell : cells) {
        if (cell.empty()) throw ParseError("empty column name in header", line_no);
        table.header.emplace_back(cell);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size())
      throw ParseError("expected " + std::to_string(table.header.size()) + " fields, found " +
                           std::to_string(cells.size()),
                       line_no);
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto cell = cells[j];
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), row[j]);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(row[j]))
        throw ParseError("field '" + table.header[j] + "' is not a finite number: '" + std::string(cell) + "'",
                         line_no);
    }
    table.rows.push_back(std::move(row));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) throw ParseError("missing header row", line_no == 0 ? 1 : line_no);
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return parse_csv(in);
}

Dataset ingest(const RunConfig& config) { return ingest(config, read_csv(config.input_path)); }

Dataset ingest(const RunConfig& config, const CsvTable& table) {
  if (contains(config.covariate_columns, config.response_column))
    throw DomainError("response column '" + config.response_column + "' is also listed as a covariate");
  for (const auto& name : config.log_covariates) {
    if (!contains(config.covariate_columns, name))
      throw DomainError("log transform requested for '" + name + "', which is not a covariate");
  }
  const std::size_t y_col = table.column(config.response_column);
  std::vector<std::size_t> x_cols;
  for (const auto& name : config.covariate_columns) x_cols.push_back(table.column(name));

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const Eigen::Index offset = config.intercept ? 1 : 0;
  const auto p = static_cast<Eigen::Index>(x_cols.size()) + offset;
  Eigen::VectorXd y(n);
  Eigen::MatrixXd X(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    const auto line = table.line_numbers[static_cast<std::size_t>(i)];
    auto take = [&](std::size_t col, bool log_it) {
      const double v = row[col];
      if (!log_it) return v;
      if (!(v > 0.0))
        throw DomainError("row " + std::to_string(i + 1) + " (line " + std::to_string(line) + "): column '" +
                          table.header[col] + "' must be positive to take its log, got " + format_double(v));
      return std::log(v);
    };
    y(i) = take(y_col, config.log_response);
    if (config.intercept) X(i, 0) = 1.0;
    for (std::size_t j = 0; j < x_cols.size(); ++j)
      X(i, offset + static_cast<Eigen::Index>(j)) = take(x_cols[j], contains(config.log_covariates,
                                                                              config.covariate_columns[j]));
  }
  return Dataset(std::move(y), std::move(X));
}

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

void write_dataset_csv(std::ostream& out, const Dataset& data, bool has_intercept) {
  const Eigen::Index first = has_intercept ? 1 : 0;
  out << "y";
  for (Eigen::Index j = first; j < data.p(); ++j) out << ",x" << (j - first + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << format_double(data.y()(i));
    for (Eigen::Index j = first; j < data.p(); ++j) out << ',' << format_double(data.X()(i, j));
    out << '\n';
  }
}

}  // namespace skewbs
