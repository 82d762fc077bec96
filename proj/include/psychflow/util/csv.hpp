#pragma once

#include <string>
#include <vector>

namespace psychflow::util {

/// A CSV file reduced to a header row plus data rows of raw string cells.
struct CsvTable {
  std::string path;  ///< origin, used in error messages ("<string>" if in-memory)
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of `column` in the header, or throws ParseError naming the file.
  std::size_t column(const std::string& name) const;
};

/// Parses CSV text. Supports quoted fields with embedded commas/quotes and
/// both \n and \r\n line endings. Every data row must have exactly as many
/// cells as the header; violations raise ParseError naming the 1-based line.
CsvTable parse_csv(const std::string& text, const std::string& origin);

/// Reads and parses a CSV file; IoError if unreadable.
CsvTable read_csv(const std::string& path);

/// Requires the header to be exactly `expected` (order included);
/// throws ParseError otherwise.
void require_header(const CsvTable& table, const std::vector<std::string>& expected);

/// Escapes one cell for CSV output (quotes only when needed).
std::string csv_escape(const std::string& cell);

/// Joins cells into one CSV line (no trailing newline).
std::string csv_line(const std::vector<std::string>& cells);

// Typed cell accessors; all throw ParseError naming file/line/column.
double cell_double(const CsvTable& t, std::size_t row, std::size_t col);
long long cell_int(const CsvTable& t, std::size_t row, std::size_t col);
bool cell_bool01(const CsvTable& t, std::size_t row, std::size_t col);

}  // namespace psychflow::util
