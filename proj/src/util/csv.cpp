#include "psychflow/util/csv.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "psychflow/errors.hpp"

namespace psychflow::util {

std::size_t CsvTable::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw ParseError(fmt::format("{}: missing column '{}'", path, name));
  }
  return static_cast<std::size_t>(it - header.begin());
}

namespace {

// Splits one logical CSV record. `line_no` is 1-based for diagnostics.
std::vector<std::string> split_record(const std::string& line, const std::string& origin,
                                      std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      if (!cell.empty()) {
        throw ParseError(fmt::format("{}:{}: stray quote inside unquoted cell", origin, line_no));
      }
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  if (quoted) {
    throw ParseError(fmt::format("{}:{}: unterminated quoted cell", origin, line_no));
  }
  cells.push_back(std::move(cell));
  return cells;
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& origin) {
  CsvTable table;
  table.path = origin;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.eof()) break;
    auto cells = split_record(line, origin, line_no);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw ParseError(fmt::format("{}:{}: expected {} cells, found {}", origin, line_no,
                                   table.header.size(), cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) {
    throw ParseError(fmt::format("{}: empty file (missing header row)", origin));
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(fmt::format("cannot open '{}' for reading", path));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path);
}

void require_header(const CsvTable& table, const std::vector<std::string>& expected) {
  if (table.header != expected) {
    throw ParseError(fmt::format("{}: expected header '{}', found '{}'", table.path,
                                 csv_line(expected), csv_line(table.header)));
  }
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(cells[i]);
  }
  return out;
}

namespace {

[[noreturn]] void bad_cell(const CsvTable& t, std::size_t row, std::size_t col,
                           const char* what) {
  // +2: 1-based lines with the header on line 1.
  throw ParseError(fmt::format("{}:{}: column '{}': {} ('{}')", t.path, row + 2,
                               col < t.header.size() ? t.header[col] : "?", what,
                               t.rows[row][col]));
}

}  // namespace

double cell_double(const CsvTable& t, std::size_t row, std::size_t col) {
  const std::string& s = t.rows[row][col];
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    bad_cell(t, row, col, "not a number");
  }
  return v;
}

long long cell_int(const CsvTable& t, std::size_t row, std::size_t col) {
  const std::string& s = t.rows[row][col];
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    bad_cell(t, row, col, "not an integer");
  }
  return v;
}

bool cell_bool01(const CsvTable& t, std::size_t row, std::size_t col) {
  const std::string& s = t.rows[row][col];
  if (s == "0" || s == "false") return false;
  if (s == "1" || s == "true") return true;
  bad_cell(t, row, col, "expected 0/1/true/false");
}

}  // namespace psychflow::util
