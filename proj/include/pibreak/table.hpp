#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace pibreak {

using Cell = std::variant<std::string, long long, double>;

/// Column-labelled rows written as CSV (RFC 4180 quoting, LF endings) or as
/// a JSON array of objects. Floats use the shortest decimal form that reads
/// back to the same double.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  std::size_t column_index(const std::string& name) const;
  /// Numeric value of a cell (integers widened, strings parsed).
  double number(std::size_t row, const std::string& column) const;
  std::string text(std::size_t row, const std::string& column) const;
};

std::string format_double(double v);
std::string format_cell(const Cell& c);

std::string to_csv(const Table& t);
std::string to_json(const Table& t);
/// Cells that parse fully as integers or floats are typed accordingly.
Table parse_csv(const std::string& text);

enum class TableFormat { csv, json };

/// Writes `<stem>.csv` or `<stem>.json` in `dir`; I/O failures name the path.
std::filesystem::path write_table(const Table& t, const std::filesystem::path& dir, const std::string& stem,
                                  TableFormat format);
Table read_csv(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace pibreak
