#include <filesystem>
#include <map>
#include <stdexcept>

#include "erctk/csv.hpp"
#include "erctk/text.hpp"
#include "parsers.hpp"

namespace erctk::detail {
namespace {

namespace fs = std::filesystem;

struct SplitSource {
  Split split;
  const char* file;
};

constexpr SplitSource kSources[] = {
    {Split::train, "MEISD_train.tsv"},
    {Split::validation, "MEISD_dev.tsv"},
    {Split::test, "MEISD_test.tsv"},
};

}  // namespace

ParseResult parse_meisd(const std::string& root) {
  ParseResult result;
  result.corpus.dataset = Dataset::MEISD;
  result.corpus.label_space = default_label_space(Dataset::MEISD);

  for (const SplitSource& source : kSources) {
    const fs::path path = fs::path(root) / source.file;
    if (!fs::exists(path)) {
      result.notes.push_back(std::string("MEISD: ") + source.file + " absent, split skipped");
      continue;
    }
    const csv::Table table = csv::read_file(path.string(), '\t');
    const std::size_t col_dialogue = table.column("Dialogue_ID");
    const std::size_t col_speaker = table.column("Speaker");
    const std::size_t col_text = table.column("Utterance");
    const std::size_t col_emotion = table.column("Emotion");

    std::vector<std::string> order;
    std::map<std::string, Conversation> by_id;
    for (const std::vector<std::string>& row : table.rows) {
      result.counts.rows_parsed += 1;
      const std::string dialogue_id = text::trim(row[col_dialogue]);
      const std::string conv_id = std::string(split_name(source.split)) + "/dia" + dialogue_id;
      auto [it, inserted] = by_id.try_emplace(conv_id);
      if (inserted) {
        it->second.conversation_id = conv_id;
        it->second.split = source.split;
        order.push_back(conv_id);
      }
      Utterance u;
      u.turn_index = static_cast<int>(it->second.utterances.size());
      u.speaker = text::canonicalize(row[col_speaker]);
      u.text = text::canonicalize(row[col_text]);
      u.raw_label = text::lower_ascii(text::trim(row[col_emotion]));
      it->second.utterances.push_back(std::move(u));
    }
    for (const std::string& id : order) {
      result.corpus.conversations.push_back(std::move(by_id.at(id)));
    }
  }
  return result;
}

}  // namespace erctk::detail
