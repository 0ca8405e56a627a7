#include "erctk/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>

#include "erctk/hash.hpp"
#include "erctk/jsonl.hpp"
#include "erctk/text.hpp"
#include "json.hpp"
#include "parsers.hpp"

namespace erctk {
namespace {

using ordered_json = nlohmann::ordered_json;

// Raw tags each source corpus is allowed to ship; anything else is a
// validation finding.
const std::set<std::string>& raw_label_inventory(Dataset d) {
  static const std::set<std::string> meld = {"anger",   "disgust", "fear",    "joy",
                                             "neutral", "sadness", "surprise"};
  static const std::set<std::string> iemocap = {"ang", "dis", "exc", "fea", "fru",
                                                "hap", "neu", "sad", "sur"};
  static const std::set<std::string> emorynlp = {"joyful",   "mad",      "neutral", "peaceful",
                                                 "powerful", "sad",      "scared"};
  static const std::set<std::string> dailydialog = {"0", "1", "2", "3", "4", "5", "6"};
  static const std::set<std::string> meisd = {"acceptance", "anger",   "disgust", "fear",
                                              "happiness",  "happy",   "joy",     "neutral",
                                              "sadness",    "surprise"};
  switch (d) {
    case Dataset::MELD:
      return meld;
    case Dataset::IEMOCAP:
      return iemocap;
    case Dataset::EmoryNLP:
      return emorynlp;
    case Dataset::DailyDialog:
      return dailydialog;
    case Dataset::MEISD:
      return meisd;
  }
  throw std::logic_error("unreachable dataset");
}

ordered_json conversation_to_json(const Corpus& corpus, const Conversation& conv) {
  ordered_json j;
  j["conversation_id"] = conv.conversation_id;
  j["source_dataset"] = dataset_name(corpus.dataset);
  j["split"] = split_name(conv.split);
  ordered_json utts = ordered_json::array();
  for (const Utterance& u : conv.utterances) {
    ordered_json ju;
    ju["turn_index"] = u.turn_index;
    ju["speaker"] = u.speaker;
    ju["text"] = u.text;
    if (u.video_ref) {
      ju["video_ref"] = *u.video_ref;
    } else {
      ju["video_ref"] = nullptr;
    }
    ju["raw_label"] = u.raw_label;
    if (u.canonical_label) {
      ju["canonical_label"] = *u.canonical_label;
    } else {
      ju["canonical_label"] = nullptr;
    }
    utts.push_back(std::move(ju));
  }
  j["utterances"] = std::move(utts);
  return j;
}

}  // namespace

const char* dataset_name(Dataset d) {
  switch (d) {
    case Dataset::MELD:
      return "MELD";
    case Dataset::IEMOCAP:
      return "IEMOCAP";
    case Dataset::EmoryNLP:
      return "EmoryNLP";
    case Dataset::DailyDialog:
      return "DailyDialog";
    case Dataset::MEISD:
      return "MEISD";
  }
  throw std::logic_error("unreachable dataset");
}

Dataset dataset_from_name(std::string_view name) {
  const std::string lowered = text::lower_ascii(name);
  for (Dataset d : all_datasets()) {
    if (lowered == text::lower_ascii(dataset_name(d))) return d;
  }
  throw std::runtime_error("unknown dataset: " + std::string(name));
}

std::vector<Dataset> all_datasets() {
  return {Dataset::MELD, Dataset::IEMOCAP, Dataset::EmoryNLP, Dataset::DailyDialog,
          Dataset::MEISD};
}

std::vector<std::string> default_label_space(Dataset d) {
  switch (d) {
    case Dataset::MELD:
      return {"happiness", "anger", "fear", "sadness", "disgust", "surprise", "neutral"};
    case Dataset::IEMOCAP:
      return {"anger",       "excitement", "fear",      "sadness",        "surprise",
              "frustration", "happiness",  "disappointment", "neutral"};
    case Dataset::EmoryNLP:
      return {"sadness", "anger", "fear", "powerful", "peaceful", "happiness", "neutral"};
    case Dataset::DailyDialog:
      return {"neutral", "anger", "disgust", "fear", "happiness", "sadness", "surprise"};
    case Dataset::MEISD:
      return {"happiness", "anger",    "fear",    "sadness",
              "disgust",   "surprise", "neutral", "acceptance"};
  }
  throw std::logic_error("unreachable dataset");
}

std::vector<std::string> unified_label_space() { return default_label_space(Dataset::MELD); }

const char* split_name(Split s) {
  switch (s) {
    case Split::train:
      return "train";
    case Split::validation:
      return "validation";
    case Split::test:
      return "test";
  }
  throw std::logic_error("unreachable split");
}

Split split_from_name(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "validation") return Split::validation;
  if (name == "test") return Split::test;
  throw std::runtime_error("unknown split: " + std::string(name));
}

namespace detail {

void require_root(const std::string& root, Dataset dataset) {
  if (!std::filesystem::is_directory(root)) {
    throw std::runtime_error(std::string(dataset_name(dataset)) + ": corpus root " + root +
                             " is not a directory");
  }
}

}  // namespace detail

ParseResult parse_corpus(Dataset dataset, const std::string& root) {
  detail::require_root(root, dataset);
  switch (dataset) {
    case Dataset::MELD:
      return detail::parse_meld(root);
    case Dataset::IEMOCAP:
      return detail::parse_iemocap(root);
    case Dataset::EmoryNLP:
      return detail::parse_emorynlp(root);
    case Dataset::DailyDialog:
      return detail::parse_dailydialog(root);
    case Dataset::MEISD:
      return detail::parse_meisd(root);
  }
  throw std::logic_error("unreachable dataset");
}

std::vector<Violation> validate_corpus(const Corpus& corpus) {
  std::vector<Violation> out;
  const std::set<std::string>& inventory = raw_label_inventory(corpus.dataset);
  const std::set<std::string> space(corpus.label_space.begin(), corpus.label_space.end());

  std::set<std::string> seen_ids;
  for (const Conversation& conv : corpus.conversations) {
    if (!seen_ids.insert(conv.conversation_id).second) {
      out.push_back({"duplicate_conversation", conv.conversation_id, -1,
                     "conversation id appears more than once"});
    }
    if (conv.utterances.empty()) {
      out.push_back(
          {"empty_conversation", conv.conversation_id, -1, "conversation has no utterances"});
      continue;
    }

    bool has_duplicate_turn = false;
    std::set<int> seen_turns;
    for (const Utterance& u : conv.utterances) {
      if (!seen_turns.insert(u.turn_index).second) {
        has_duplicate_turn = true;
        out.push_back({"duplicate_turn", conv.conversation_id, u.turn_index,
                       "turn index repeats within the conversation"});
      }
    }
    if (!has_duplicate_turn) {
      for (std::size_t i = 0; i < conv.utterances.size(); ++i) {
        if (conv.utterances[i].turn_index != static_cast<int>(i)) {
          out.push_back({"non_contiguous_turns", conv.conversation_id,
                         conv.utterances[i].turn_index,
                         "expected turn index " + std::to_string(i)});
          break;
        }
      }
    }

    for (const Utterance& u : conv.utterances) {
      if (u.text.empty()) {
        out.push_back({"empty_text", conv.conversation_id, u.turn_index, "utterance has no text"});
      }
      if (inventory.find(u.raw_label) == inventory.end()) {
        out.push_back({"unknown_label", conv.conversation_id, u.turn_index,
                       "raw label '" + u.raw_label + "' is outside the " +
                           dataset_name(corpus.dataset) + " inventory"});
      } else if (u.canonical_label && space.find(*u.canonical_label) == space.end()) {
        out.push_back({"unknown_label", conv.conversation_id, u.turn_index,
                       "canonical label '" + *u.canonical_label +
                           "' is outside the corpus label space"});
      }
    }
  }
  return out;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.conversations = corpus.conversations.size();
  for (const Conversation& conv : corpus.conversations) {
    SplitStats& split = stats.by_split[split_name(conv.split)];
    split.conversations += 1;
    split.utterances += conv.utterances.size();
    stats.utterances += conv.utterances.size();
    for (const Utterance& u : conv.utterances) {
      stats.label_histogram[u.raw_label] += 1;
    }
  }
  stats.avg_turns_per_conversation =
      stats.conversations == 0
          ? 0.0
          : static_cast<double>(stats.utterances) / static_cast<double>(stats.conversations);
  return stats;
}

std::string stats_to_json(const Corpus& corpus) {
  const CorpusStats stats = corpus_stats(corpus);
  ordered_json j;
  j["dataset"] = dataset_name(corpus.dataset);
  j["conversations"] = stats.conversations;
  j["utterances"] = stats.utterances;
  j["avg_turns_per_conversation"] = stats.avg_turns_per_conversation;
  ordered_json splits = ordered_json::object();
  for (const auto& [name, split] : stats.by_split) {
    splits[name] = {{"conversations", split.conversations}, {"utterances", split.utterances}};
  }
  j["splits"] = std::move(splits);
  ordered_json labels = ordered_json::object();
  for (const auto& [label, count] : stats.label_histogram) {
    labels[label] = count;
  }
  j["label_histogram"] = std::move(labels);
  return j.dump();
}

std::string stats_to_text(const Corpus& corpus) {
  const CorpusStats stats = corpus_stats(corpus);
  std::ostringstream out;
  out << dataset_name(corpus.dataset) << ": " << stats.conversations << " conversations, "
      << stats.utterances << " utterances (avg " << stats.avg_turns_per_conversation
      << " turns/conversation)\n";
  for (const auto& [name, split] : stats.by_split) {
    out << "  " << name << ": " << split.conversations << " conversations, " << split.utterances
        << " utterances\n";
  }
  out << "  labels:";
  for (const auto& [label, count] : stats.label_histogram) {
    out << " " << label << "=" << count;
  }
  out << "\n";
  return out.str();
}

std::size_t carve_validation(Corpus& corpus, double fraction, const std::string& seed) {
  if (fraction < 0.0 || fraction > 1.0) {
    throw std::runtime_error("carve_validation: fraction must lie in [0, 1]");
  }
  std::vector<std::pair<std::string, Conversation*>> ranked;
  for (Conversation& conv : corpus.conversations) {
    if (conv.split == Split::train) {
      ranked.emplace_back(hash::sha256_hex(seed + ":" + conv.conversation_id), &conv);
    }
  }
  const std::size_t take =
      static_cast<std::size_t>(std::floor(fraction * static_cast<double>(ranked.size())));
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < take; ++i) {
    ranked[i].second->split = Split::validation;
  }
  return take;
}

void save_corpus_jsonl(const Corpus& corpus, const std::string& path) {
  std::vector<std::string> lines;
  lines.reserve(corpus.conversations.size());
  for (const Conversation& conv : corpus.conversations) {
    lines.push_back(conversation_to_json(corpus, conv).dump());
  }
  jsonl::write_atomic(path, lines);
}

Corpus load_corpus_jsonl(const std::string& path) {
  const std::vector<std::string> lines = jsonl::read_lines(path);
  if (lines.empty()) throw std::runtime_error("corpus jsonl: " + path + " holds no conversations");
  Corpus corpus;
  bool first = true;
  for (const std::string& line : lines) {
    const ordered_json j = ordered_json::parse(line);
    const Dataset dataset = dataset_from_name(j.at("source_dataset").get<std::string>());
    if (first) {
      corpus.dataset = dataset;
      corpus.label_space = default_label_space(dataset);
      first = false;
    } else if (dataset != corpus.dataset) {
      throw std::runtime_error("corpus jsonl: mixed source_dataset values in " + path);
    }
    Conversation conv;
    conv.conversation_id = j.at("conversation_id").get<std::string>();
    conv.split = split_from_name(j.at("split").get<std::string>());
    for (const ordered_json& ju : j.at("utterances")) {
      Utterance u;
      u.turn_index = ju.at("turn_index").get<int>();
      u.speaker = ju.at("speaker").get<std::string>();
      u.text = ju.at("text").get<std::string>();
      if (!ju.at("video_ref").is_null()) u.video_ref = ju.at("video_ref").get<std::string>();
      u.raw_label = ju.at("raw_label").get<std::string>();
      if (!ju.at("canonical_label").is_null()) {
        u.canonical_label = ju.at("canonical_label").get<std::string>();
      }
      conv.utterances.push_back(std::move(u));
    }
    corpus.conversations.push_back(std::move(conv));
  }
  return corpus;
}

}  // namespace erctk
