#include "erctk/jsonl.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace erctk::jsonl {
namespace {

namespace fs = std::filesystem;

// Unique sibling path so the final rename stays within one filesystem.
fs::path temp_sibling(const fs::path& target) {
  static std::mt19937_64 rng{std::random_device{}()};
  std::uniform_int_distribution<unsigned long long> dist;
  std::ostringstream name;
  name << "." << target.filename().string() << ".tmp." << std::hex << dist(rng);
  fs::path dir = target.parent_path();
  if (dir.empty()) dir = ".";
  return dir / name.str();
}

void commit(const fs::path& tmp, const fs::path& target) {
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("jsonl: cannot rename into " + target.string() + ": " + ec.message());
  }
}

}  // namespace

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("jsonl: cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  bool pending_blank = false;
  while (std::getline(in, line)) {
    if (pending_blank) {
      throw std::runtime_error("jsonl: blank interior line in " + path);
    }
    if (line.empty()) {
      pending_blank = true;  // legal only as the very last line
      continue;
    }
    lines.push_back(line);
  }
  return lines;
}

void write_atomic(const std::string& path, const std::vector<std::string>& lines) {
  std::string blob;
  for (const std::string& line : lines) {
    blob += line;
    blob += '\n';
  }
  write_file_atomic(path, blob);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  const fs::path tmp = temp_sibling(target);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("jsonl: cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("jsonl: short write to " + tmp.string());
    }
  }
  commit(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("jsonl: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace erctk::jsonl
