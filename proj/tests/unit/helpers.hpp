#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testutil {

inline std::string source_dir() { return ERCTK_SOURCE_DIR; }
inline std::string fixture_dir() { return source_dir() + "/tests/fixtures"; }
inline std::string data_dir() { return source_dir() + "/data/mini_corpus"; }
inline std::string config_dir() { return source_dir() + "/config"; }
inline std::string cli_path() { return ERCTK_CLI_PATH; }

// Self-deleting unique temp directory.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    std::random_device rd;
    std::uniform_int_distribution<unsigned long long> dist;
    std::ostringstream name;
    name << "erctk_test_" << std::hex << dist(rd);
    path = std::filesystem::temp_directory_path() / name.str();
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
}

// Run a command, capture combined stdout+stderr and the exit code.
struct RunResult {
  int exit_code = -1;
  std::string output;
};

inline RunResult run_command(const std::string& cmd) {
  TempDir dir;
  std::string out_file = dir.file("out.txt");
  std::string full = cmd + " > " + out_file + " 2>&1";
  int rc = std::system(full.c_str());
  RunResult result;
  result.output = slurp(out_file);
  if (rc == -1) {
    result.exit_code = -1;
  } else {
    result.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }
  return result;
}

}  // namespace testutil
