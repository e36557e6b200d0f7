#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "geocloud/error.hpp"

namespace geocloud::csv {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void read(const std::filesystem::path& path, const std::vector<std::string>& header,
          const std::function<void(const std::vector<std::string>&, std::size_t)>& on_row) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());

  std::string line;
  std::size_t row = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (!seen_header) {
      if (fields != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        throw ParseError(path.string() + ": expected header '" + expected + "'", row);
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw ParseError(path.string() + ": expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(fields.size()),
                       row);
    }
    on_row(fields, row);
  }
  if (!seen_header) throw ParseError(path.string() + ": empty file", row);
}

double to_double(const std::string& field, std::size_t row, std::string_view column) {
  double value = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError("invalid number '" + field + "' in column " + std::string(column), row);
  }
  return value;
}

long long to_integer(const std::string& field, std::size_t row, std::string_view column) {
  long long value = 0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("invalid integer '" + field + "' in column " + std::string(column), row);
  }
  return value;
}

}  // namespace geocloud::csv
