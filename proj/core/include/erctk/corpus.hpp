#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace erctk {

enum class Dataset { MELD, IEMOCAP, EmoryNLP, DailyDialog, MEISD };

const char* dataset_name(Dataset d);
Dataset dataset_from_name(std::string_view name);  // case-insensitive
std::vector<Dataset> all_datasets();

// The fixed per-dataset evaluation label space, in prompt/report order.
std::vector<std::string> default_label_space(Dataset d);

// The shared seven-emotion space, in prompt order.
std::vector<std::string> unified_label_space();

enum class Split { train, validation, test };
const char* split_name(Split s);
Split split_from_name(std::string_view name);

struct Utterance {
  int turn_index = 0;
  std::string speaker;
  std::string text;
  std::optional<std::string> video_ref;
  std::string raw_label;
  std::optional<std::string> canonical_label;
};

struct Conversation {
  std::string conversation_id;
  Split split = Split::train;
  std::vector<Utterance> utterances;
};

struct Corpus {
  Dataset dataset = Dataset::MELD;
  std::vector<std::string> label_space;  // canonical, ordered
  std::vector<Conversation> conversations;
};

struct IngestCounts {
  std::size_t rows_parsed = 0;
  std::size_t rows_rejected = 0;
  std::map<std::string, std::size_t> rejected_reasons;
};

struct ParseResult {
  Corpus corpus;
  IngestCounts counts;
  std::vector<std::string> notes;  // e.g. a split file was absent
};

// Parse a source corpus from its official on-disk layout (docs/formats.md).
ParseResult parse_corpus(Dataset dataset, const std::string& root);

struct Violation {
  std::string kind;  // empty_text, duplicate_conversation, non_contiguous_turns,
                     // unknown_label, empty_conversation, duplicate_turn
  std::string conversation_id;
  int turn_index = -1;  // -1 for conversation-level findings
  std::string detail;
};

std::vector<Violation> validate_corpus(const Corpus& corpus);

struct SplitStats {
  std::size_t conversations = 0;
  std::size_t utterances = 0;
};

struct CorpusStats {
  std::size_t conversations = 0;
  std::size_t utterances = 0;
  double avg_turns_per_conversation = 0.0;
  std::map<std::string, SplitStats> by_split;          // keyed by split name
  std::map<std::string, std::size_t> label_histogram;  // raw labels
};

CorpusStats corpus_stats(const Corpus& corpus);
std::string stats_to_json(const Corpus& corpus);
std::string stats_to_text(const Corpus& corpus);

// Deterministically move ~fraction of train conversations to validation:
// train conversations are ranked by sha256(seed + ":" + conversation_id)
// and the first floor(fraction * n_train) move. Returns how many moved.
std::size_t carve_validation(Corpus& corpus, double fraction, const std::string& seed);

void save_corpus_jsonl(const Corpus& corpus, const std::string& path);
Corpus load_corpus_jsonl(const std::string& path);

}  // namespace erctk
