#pragma once

#include <string>
#include <vector>

#include "curvtest/dataset.hpp"

namespace curvtest {

// =====================================================================
// CSV ingestion (RFC-4180-style quoting) with column selection by
// header name or 1-based index, optional row filters, and precise
// error reporting (1-based data row, 1-based file column).
// =====================================================================

// Simple comparison filter on one column: "amount>=1000".
struct RowFilter {
  std::string column;  // name or 1-based index token
  std::string op;      // one of > >= < <= == !=
  double value = 0.0;
};

struct CsvSchema {
  std::string y_column;                // name or 1-based index token
  std::vector<std::string> x_columns;  // same; must not contain y_column
  bool header = true;
  char delimiter = ',';
  std::vector<RowFilter> filters;      // ANDed; applied before validation
};

// Parses "col>=1.5" etc.; throws UsageError on malformed expressions.
RowFilter parse_filter(const std::string& expr);

// Raw records of a parsed file (after header removal); exposed for tests.
std::vector<std::vector<std::string>> parse_csv_records(const std::string& text,
                                                        char delimiter);

Dataset ingest_csv(const std::string& path, const CsvSchema& schema);

}  // namespace curvtest
