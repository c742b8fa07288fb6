#include "mixsep/io_util.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixsep/error.hpp"

namespace mixsep {

std::string format_double(double x, int precision) {
  char buf[64];
  // Fewest digits up to `precision` that read back as the same double.
  for (int p = std::min(precision, 15); p <= precision; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, x);
    if (p == precision || std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

double parse_double(std::string_view text, std::string_view context) {
  const std::string s = trim(text);
  if (s.empty()) throw Error(ErrorCode::ParseError, std::string(context) + ": empty number");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) {
    throw Error(ErrorCode::ParseError, std::string(context) + ": not a number: '" + s + "'");
  }
  return v;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(target.parent_path(), ec);
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp);
    out << content;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::IoError, "rename to " + path + " failed: " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingInput, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return k;
  }
  throw Error(ErrorCode::ParseError, "missing CSV column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::column_values(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

CsvTable parse_csv(std::string_view text, std::string_view context) {
  CsvTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      table.comments.push_back(trim(t.substr(1)));
      continue;
    }
    auto cells = split(t, ',');
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw Error(ErrorCode::ParseError,
                  std::string(context) + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(table.header.size()) + " columns");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      row.push_back(parse_double(c, std::string(context) + ":" + std::to_string(lineno)));
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw Error(ErrorCode::ParseError, std::string(context) + ": no header row");
  return table;
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_file(path), path); }

std::string render_csv(const CsvTable& table, int precision) {
  std::string out;
  for (const auto& c : table.comments) out += "# " + c + "\n";
  for (std::size_t k = 0; k < table.header.size(); ++k) {
    if (k) out += ',';
    out += table.header[k];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += format_double(row[k], precision);
    }
    out += '\n';
  }
  return out;
}

}  // namespace mixsep
