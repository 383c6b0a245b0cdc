#include "curvtest/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "curvtest/errors.hpp"

namespace curvtest {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t')) --b;
  return s.substr(a, b - a);
}

bool parse_double(const std::string& raw, double& out) {
  const std::string t = trim(raw);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

double parse_cell(const std::string& cell, std::size_t data_row, int file_col) {
  double v = 0.0;
  if (!parse_double(cell, v)) {
    throw DataError("cannot parse '" + cell + "' as a number at row " +
                    std::to_string(data_row) + ", column " + std::to_string(file_col + 1));
  }
  return v;
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(),
                                   [](unsigned char c) { return std::isdigit(c); });
}

// Resolves a column token to a 0-based file column: header name first,
// then a 1-based numeric index.
int resolve_column(const std::string& token, const std::vector<std::string>& header,
                   int ncols) {
  const std::string t = trim(token);
  if (!header.empty()) {
    int found = -1, matches = 0;
    for (int j = 0; j < static_cast<int>(header.size()); ++j) {
      if (header[j] == t) {
        found = j;
        ++matches;
      }
    }
    if (matches > 1) throw DataError("column '" + t + "' is ambiguous in the header");
    if (matches == 1) return found;
  }
  if (all_digits(t)) {
    const int v = std::stoi(t);
    if (v >= 1 && v <= ncols) return v - 1;
    throw DataError("column index " + t + " out of range (file has " +
                    std::to_string(ncols) + " columns)");
  }
  throw DataError("missing column '" + t + "'");
}

bool apply_op(double lhs, const std::string& op, double rhs) {
  if (op == ">") return lhs > rhs;
  if (op == ">=") return lhs >= rhs;
  if (op == "<") return lhs < rhs;
  if (op == "<=") return lhs <= rhs;
  if (op == "==") return lhs == rhs;
  if (op == "!=") return lhs != rhs;
  throw UsageError("unknown filter operator '" + op + "'");
}

}  // namespace

RowFilter parse_filter(const std::string& expr) {
  static const char* kOps[] = {">=", "<=", "==", "!=", ">", "<"};
  for (const char* op : kOps) {
    const std::size_t pos = expr.find(op);
    if (pos == std::string::npos) continue;
    RowFilter f;
    f.column = trim(expr.substr(0, pos));
    f.op = op;
    const std::string rhs = trim(expr.substr(pos + std::string(op).size()));
    if (f.column.empty()) throw UsageError("filter '" + expr + "' is missing a column");
    if (!parse_double(rhs, f.value)) {
      throw UsageError("filter '" + expr + "' needs a numeric right-hand side");
    }
    return f;
  }
  throw UsageError("filter '" + expr + "' has no comparison operator");
}

std::vector<std::vector<std::string>> parse_csv_records(const std::string& text,
                                                        char delimiter) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_quoted = false;

  auto end_field = [&]() {
    record.push_back(field_quoted ? field : trim(field));
    field.clear();
    field_quoted = false;
  };
  auto end_record = [&]() {
    end_field();
    const bool blank = record.size() == 1 && record[0].empty();
    if (!blank) records.push_back(record);
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      field_quoted = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\n') {
      end_record();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field at end of file");
  if (!field.empty() || field_quoted || !record.empty()) end_record();
  return records;
}

Dataset ingest_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (trim(text).empty()) throw DataError("empty file '" + path + "'");

  const auto records = parse_csv_records(text, schema.delimiter);
  if (records.empty()) throw DataError("no records in '" + path + "'");

  std::vector<std::string> header;
  std::size_t first_data = 0;
  if (schema.header) {
    header = records[0];
    first_data = 1;
  }
  if (first_data >= records.size()) throw DataError("no data rows in '" + path + "'");
  const int ncols = static_cast<int>(schema.header ? header.size() : records[0].size());

  if (schema.x_columns.empty()) throw UsageError("need at least one x column");
  const int y_col = resolve_column(schema.y_column, header, ncols);
  std::vector<int> x_cols;
  std::vector<std::string> x_labels;
  for (const auto& token : schema.x_columns) {
    const int col = resolve_column(token, header, ncols);
    if (col == y_col) {
      throw UsageError("column '" + token + "' selected as both y and x");
    }
    if (std::find(x_cols.begin(), x_cols.end(), col) != x_cols.end()) {
      throw UsageError("column '" + token + "' selected twice");
    }
    x_cols.push_back(col);
    x_labels.push_back(schema.header ? header[col] : "col" + std::to_string(col + 1));
  }
  std::vector<std::pair<int, RowFilter>> filters;
  for (const auto& f : schema.filters) {
    filters.emplace_back(resolve_column(f.column, header, ncols), f);
  }

  std::vector<double> y_vals;
  std::vector<std::vector<double>> x_vals;
  for (std::size_t rec = first_data; rec < records.size(); ++rec) {
    const auto& row = records[rec];
    const std::size_t data_row = rec - first_data + 1;  // 1-based, header excluded
    if (static_cast<int>(row.size()) != ncols) {
      throw DataError("row " + std::to_string(data_row) + " has " +
                      std::to_string(row.size()) + " fields, expected " +
                      std::to_string(ncols));
    }
    bool keep = true;
    for (const auto& [col, f] : filters) {
      if (!apply_op(parse_cell(row[col], data_row, col), f.op, f.value)) {
        keep = false;
        break;
      }
    }
    if (!keep) continue;
    y_vals.push_back(parse_cell(row[y_col], data_row, y_col));
    std::vector<double> xs(x_cols.size());
    for (std::size_t j = 0; j < x_cols.size(); ++j) {
      xs[j] = parse_cell(row[x_cols[j]], data_row, x_cols[j]);
    }
    x_vals.push_back(std::move(xs));
  }

  const Eigen::Index n = static_cast<Eigen::Index>(y_vals.size());
  Eigen::VectorXd y(n);
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(x_cols.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = y_vals[i];
    for (std::size_t j = 0; j < x_cols.size(); ++j) x(i, static_cast<Eigen::Index>(j)) = x_vals[i][j];
  }
  return validate_dataset(std::move(y), std::move(x), std::move(x_labels));
}

}  // namespace curvtest
