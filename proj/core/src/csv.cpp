#include "erctk/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace erctk::csv {
namespace {

// RFC-4180 record reader: returns one logical record (quotes may swallow
// delimiters and newlines) and advances `pos` past its terminator.
// `saw_quote` distinguishes a quoted-empty record from a blank line.
std::vector<std::string> read_record(std::string_view data, std::size_t& pos, char delimiter,
                                     bool& saw_quote) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool done = false;
  saw_quote = false;
  while (!done) {
    if (pos >= data.size()) {
      if (in_quotes) throw std::runtime_error("csv: unterminated quoted field");
      break;
    }
    const char c = data[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < data.size() && data[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
        } else {
          in_quotes = false;
          ++pos;
        }
      } else {
        field.push_back(c);
        ++pos;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        saw_quote = true;
        ++pos;
        break;
      case '\r':
        if (pos + 1 < data.size() && data[pos + 1] == '\n') ++pos;
        [[fallthrough]];
      case '\n':
        ++pos;
        done = true;
        break;
      default:
        if (c == delimiter) {
          fields.push_back(std::move(field));
          field.clear();
          ++pos;
        } else {
          field.push_back(c);
          ++pos;
        }
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::vector<std::string> split_plain(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::runtime_error("csv: no column named '" + name + "'");
}

Table parse(std::string_view data, char delimiter) {
  if (data.empty()) throw std::runtime_error("csv: empty input");
  Table table;
  if (delimiter == ',') {
    std::size_t pos = 0;
    bool saw_quote = false;
    table.header = read_record(data, pos, delimiter, saw_quote);
    while (pos < data.size()) {
      std::vector<std::string> row = read_record(data, pos, delimiter, saw_quote);
      if (row.size() == 1 && row[0].empty() && !saw_quote && pos >= data.size()) {
        break;  // trailing newline
      }
      if (row.size() != table.header.size()) {
        throw std::runtime_error("csv: row " + std::to_string(table.rows.size() + 2) + " has " +
                                 std::to_string(row.size()) + " fields, header has " +
                                 std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(row));
    }
  } else {
    // Plain split: no quoting, one record per physical line.
    std::size_t start = 0;
    bool have_header = false;
    while (start <= data.size()) {
      if (start == data.size()) break;
      std::size_t end = data.find('\n', start);
      std::size_t next = end == std::string_view::npos ? data.size() : end + 1;
      std::string_view line = data.substr(start, (end == std::string_view::npos ? data.size() : end) - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      start = next;
      if (line.empty() && start >= data.size()) break;  // trailing newline
      std::vector<std::string> row = split_plain(line, delimiter);
      if (!have_header) {
        table.header = std::move(row);
        have_header = true;
        continue;
      }
      if (row.size() != table.header.size()) {
        throw std::runtime_error("csv: row " + std::to_string(table.rows.size() + 2) + " has " +
                                 std::to_string(row.size()) + " fields, header has " +
                                 std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

Table read_file(const std::string& path, char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("csv: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), delimiter);
}

}  // namespace erctk::csv
