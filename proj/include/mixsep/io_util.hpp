#ifndef MIXSEP_IO_UTIL_HPP
#define MIXSEP_IO_UTIL_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mixsep {

// Shortest "%.*g" text with at most `precision` digits that parses back to x;
// 17 always round-trips a double.
std::string format_double(double x, int precision = 17);

// Strict full-string parse; throws ParseError naming the context.
double parse_double(std::string_view text, std::string_view context);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Writes to "<path>.tmp" then renames over path.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// FNV-1a, 64 bit, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

// Numeric CSV table with a header row. Lines starting with '#' are kept
// as comments (key=value metadata in practice).
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const;  // throws ParseError
  std::vector<double> column_values(std::string_view name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::string_view text, std::string_view context);
std::string render_csv(const CsvTable& table, int precision = 10);

}  // namespace mixsep

#endif  // MIXSEP_IO_UTIL_HPP
