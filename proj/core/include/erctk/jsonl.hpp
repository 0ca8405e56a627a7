#pragma once

#include <string>
#include <vector>

namespace erctk::jsonl {

// One string per line, trailing newline stripped. A final empty line is
// tolerated; empty lines elsewhere are an error.
std::vector<std::string> read_lines(const std::string& path);

// Write every line plus '\n' to a temporary file in the destination
// directory, then rename it into place.
void write_atomic(const std::string& path, const std::vector<std::string>& lines);

// Same atomicity for a single pre-rendered blob.
void write_file_atomic(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

}  // namespace erctk::jsonl
