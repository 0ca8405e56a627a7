#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "erctk/text.hpp"
#include "parsers.hpp"

namespace erctk::detail {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> read_nonempty_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("DailyDialog: cannot open " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!text::trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

// "Hello . __eou__ Hi . __eou__" -> {"Hello .", "Hi ."}
std::vector<std::string> split_utterances(const std::string& line) {
  static const std::string kSeparator = "__eou__";
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= line.size()) {
    const std::size_t at = line.find(kSeparator, start);
    const std::string piece =
        at == std::string::npos ? line.substr(start) : line.substr(start, at - start);
    const std::string trimmed = text::canonicalize(piece);
    if (!trimmed.empty()) parts.push_back(trimmed);
    if (at == std::string::npos) break;
    start = at + kSeparator.size();
  }
  return parts;
}

std::vector<std::string> split_labels(const std::string& line) {
  std::vector<std::string> labels;
  std::istringstream in(line);
  for (std::string token; in >> token;) labels.push_back(token);
  return labels;
}

struct SplitSource {
  Split split;
  const char* dir;
  const char* suffix;
};

constexpr SplitSource kSources[] = {
    {Split::train, "train", "train"},
    {Split::validation, "validation", "validation"},
    {Split::test, "test", "test"},
};

}  // namespace

ParseResult parse_dailydialog(const std::string& root) {
  ParseResult result;
  result.corpus.dataset = Dataset::DailyDialog;
  result.corpus.label_space = default_label_space(Dataset::DailyDialog);

  for (const SplitSource& source : kSources) {
    const fs::path dir = fs::path(root) / source.dir;
    const fs::path text_path = dir / (std::string("dialogues_") + source.suffix + ".txt");
    const fs::path label_path =
        dir / (std::string("dialogues_emotion_") + source.suffix + ".txt");
    if (!fs::exists(text_path) || !fs::exists(label_path)) {
      result.notes.push_back(std::string("DailyDialog: ") + source.dir +
                             " split files absent, split skipped");
      continue;
    }
    const std::vector<std::string> text_lines = read_nonempty_lines(text_path);
    const std::vector<std::string> label_lines = read_nonempty_lines(label_path);
    if (text_lines.size() != label_lines.size()) {
      throw std::runtime_error("DailyDialog: " + std::string(source.dir) + " has " +
                               std::to_string(text_lines.size()) + " dialogue lines but " +
                               std::to_string(label_lines.size()) + " emotion lines");
    }
    for (std::size_t i = 0; i < text_lines.size(); ++i) {
      const std::vector<std::string> utterances = split_utterances(text_lines[i]);
      const std::vector<std::string> labels = split_labels(label_lines[i]);
      if (utterances.size() != labels.size()) {
        throw std::runtime_error(
            "DailyDialog: " + std::string(source.dir) + " dialogue " + std::to_string(i) +
            " has " + std::to_string(utterances.size()) + " utterances but " +
            std::to_string(labels.size()) + " labels");
      }
      Conversation conv;
      conv.conversation_id = std::string(split_name(source.split)) + "/dlg" + std::to_string(i);
      conv.split = source.split;
      for (std::size_t t = 0; t < utterances.size(); ++t) {
        result.counts.rows_parsed += 1;
        Utterance u;
        u.turn_index = static_cast<int>(t);
        u.speaker = t % 2 == 0 ? "A" : "B";
        u.text = utterances[t];
        u.raw_label = labels[t];
        conv.utterances.push_back(std::move(u));
      }
      result.corpus.conversations.push_back(std::move(conv));
    }
  }
  return result;
}

}  // namespace erctk::detail
