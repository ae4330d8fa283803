#pragma once

// Minimal delimited-table reader/writer for the project's CSV schemas.
// Fields may be double-quoted; embedded quotes are doubled.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace solarzoning::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based source line of each row, for diagnostics.
  std::vector<std::size_t> line_numbers;

  // Index of a header column, or nullopt.
  std::optional<std::size_t> find(std::string_view name) const;
  // Index of a header column; throws ParseError naming the column.
  std::size_t require(std::string_view name) const;
};

// Reads a header-bearing table. Blank lines are skipped; every row must
// have exactly as many fields as the header.
Table read(std::istream& in, char delimiter = ',');
Table read_file(const std::string& path, char delimiter = ',');

std::vector<std::string> split_line(std::string_view line, char delimiter = ',');

// Quotes a field only when it contains the delimiter, a quote, or a newline.
std::string escape(std::string_view field, char delimiter = ',');

// Shortest decimal text that round-trips the double.
std::string format_double(double value);

double parse_double(std::string_view text, std::string_view context);
long long parse_int(std::string_view text, std::string_view context);
bool parse_bool(std::string_view text, std::string_view context);

}  // namespace solarzoning::csv
