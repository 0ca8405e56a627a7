#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "erctk/text.hpp"
#include "parsers.hpp"

namespace erctk::detail {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("IEMOCAP: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Category assignments keyed by turn id, e.g.
// "[6.2901 - 8.2357]\tSes01F_impro01_F000\tneu\t[2.5000, 2.5000, 2.5000]".
std::map<std::string, std::string> read_labels(const fs::path& path) {
  std::map<std::string, std::string> labels;
  std::istringstream in(slurp(path));
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] != '[') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 3) continue;
    labels[text::trim(fields[1])] = text::trim(fields[2]);
  }
  return labels;
}

int session_number(const std::string& name) {
  return std::stoi(name.substr(std::string("Session").size()));
}

}  // namespace

ParseResult parse_iemocap(const std::string& root) {
  ParseResult result;
  result.corpus.dataset = Dataset::IEMOCAP;
  result.corpus.label_space = default_label_space(Dataset::IEMOCAP);

  std::vector<fs::path> sessions;
  for (const fs::directory_entry& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && entry.path().filename().string().rfind("Session", 0) == 0) {
      sessions.push_back(entry.path());
    }
  }
  if (sessions.empty()) {
    throw std::runtime_error("IEMOCAP: no Session directories under " + root);
  }
  std::sort(sessions.begin(), sessions.end());

  // Transcript lines look like
  // "Ses01F_impro01_F000 [006.2901-008.2357]: Excuse me, is this seat taken?"
  static const std::regex turn_re(R"(^(\S+) \[([0-9.]+)-([0-9.]+)\]: (.*)$)");

  for (const fs::path& session : sessions) {
    const std::string session_name = session.filename().string();
    const Split split = session_number(session_name) <= 4 ? Split::train : Split::test;

    const fs::path transcripts = session / "dialog" / "transcriptions";
    if (!fs::is_directory(transcripts)) {
      result.notes.push_back("IEMOCAP: " + session_name + " has no transcriptions directory");
      continue;
    }
    std::vector<fs::path> files;
    for (const fs::directory_entry& entry : fs::directory_iterator(transcripts)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());

    for (const fs::path& file : files) {
      const std::string dialogue_id = file.stem().string();
      const fs::path label_path = session / "dialog" / "EmoEvaluation" / file.filename();
      std::map<std::string, std::string> labels;
      if (fs::exists(label_path)) {
        labels = read_labels(label_path);
      } else {
        result.notes.push_back("IEMOCAP: no EmoEvaluation file for " + dialogue_id);
      }

      Conversation conv;
      conv.conversation_id = dialogue_id;
      conv.split = split;

      std::istringstream in(slurp(file));
      for (std::string line; std::getline(in, line);) {
        if (text::trim(line).empty()) continue;
        std::smatch m;
        if (!std::regex_match(line, m, turn_re)) continue;
        result.counts.rows_parsed += 1;
        const std::string turn_id = m[1].str();
        const auto label_it = labels.find(turn_id);
        if (label_it == labels.end() || label_it->second == "xxx" || label_it->second == "oth") {
          result.counts.rows_rejected += 1;
          result.counts.rejected_reasons["unassigned_label"] += 1;
          continue;
        }
        Utterance u;
        u.turn_index = static_cast<int>(conv.utterances.size());
        // The token after the dialogue id encodes the speaker: F000 -> F.
        const std::size_t underscore = turn_id.rfind('_');
        u.speaker = underscore == std::string::npos ? "?"
                                                    : turn_id.substr(underscore + 1, 1);
        u.text = text::canonicalize(m[4].str());
        u.video_ref = session_name + "/dialog/avi/DivX/" + dialogue_id + ".avi#t=" + m[2].str() +
                      "," + m[3].str();
        u.raw_label = label_it->second;
        conv.utterances.push_back(std::move(u));
      }
      result.corpus.conversations.push_back(std::move(conv));
    }
  }

  // Keep split blocks ordered train, then test (session order preserved
  // inside each block).
  std::stable_sort(result.corpus.conversations.begin(), result.corpus.conversations.end(),
                   [](const Conversation& a, const Conversation& b) {
                     return static_cast<int>(a.split) < static_cast<int>(b.split);
                   });
  return result;
}

}  // namespace erctk::detail
