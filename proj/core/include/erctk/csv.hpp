#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace erctk::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws std::runtime_error when absent.
  std::size_t column(const std::string& name) const;
};

// delimiter ',' parses RFC-4180: quoted fields may contain the delimiter,
// doubled quotes, and embedded newlines. delimiter '\t' is a plain split
// with no quoting (fields must not contain tabs).
Table parse(std::string_view data, char delimiter = ',');
Table read_file(const std::string& path, char delimiter = ',');

}  // namespace erctk::csv
