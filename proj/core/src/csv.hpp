#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace geocloud::csv {

/// Splits one line on commas; surrounding whitespace is trimmed.
std::vector<std::string> split(std::string_view line);

/// Streams a headered CSV file. `row` is 1-based and counts the header.
/// Blank lines are skipped. Throws ParseError on a header mismatch and
/// std::runtime_error when the file cannot be opened.
void read(const std::filesystem::path& path, const std::vector<std::string>& header,
          const std::function<void(const std::vector<std::string>& fields, std::size_t row)>&
              on_row);

double to_double(const std::string& field, std::size_t row, std::string_view column);
long long to_integer(const std::string& field, std::size_t row, std::string_view column);

}  // namespace geocloud::csv
