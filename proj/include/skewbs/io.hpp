#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "skewbs/regression.hpp"

namespace skewbs {

enum class OutputFormat { Json, Csv };

struct RunConfig {
  std::string input_path;
  std::string response_column;
  std::vector<std::string> covariate_columns;
  bool log_response = false;
  std::vector<std::string> log_covariates;
  bool intercept = true;
  int quadrature_order = kDefaultQuadOrder;
  std::uint64_t seed = 0;
  OutputFormat output_format = OutputFormat::Json;
};

/// Comma-separated text with a header row. Cells are parsed as doubles in the
/// C locale; surrounding blanks are ignored, blank lines are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  std::size_t column(const std::string& name) const;  // throws ParseError
};

CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

/// Builds the Dataset described by `config`: natural logs where flagged and an
/// all-ones first column when `intercept` is set. Row order is preserved.
Dataset ingest(const RunConfig& config);
Dataset ingest(const RunConfig& config, const CsvTable& table);

/// 17 significant digits; parses back to the same double.
std::string format_double(double value);

/// Writes `y` and the non-intercept design columns as CSV (header y,x1,...,xk).
void write_dataset_csv(std::ostream& out, const Dataset& data, bool has_intercept);

}  // namespace skewbs
