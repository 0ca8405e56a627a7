#include "erctk/inference.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "erctk/jsonl.hpp"
#include "erctk/text.hpp"
#include "nlohmann/json.hpp"

namespace erctk {

namespace {

using ordered_json = nlohmann::ordered_json;

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// First whole-word occurrence of `needle` in `haystack`, npos when absent.
// Both sides must already be lower-cased.
std::size_t find_whole_word(const std::string& haystack, const std::string& needle) {
  std::size_t pos = haystack.find(needle);
  while (pos != std::string::npos) {
    const bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
    const std::size_t after = pos + needle.size();
    const bool right_ok = after >= haystack.size() || !is_word_char(haystack[after]);
    if (left_ok && right_ok) return pos;
    pos = haystack.find(needle, pos + 1);
  }
  return std::string::npos;
}

}  // namespace

const char* parse_status_name(ParseStatus s) {
  switch (s) {
    case ParseStatus::exact:
      return "exact";
    case ParseStatus::substring:
      return "substring";
    case ParseStatus::fallback:
      return "fallback";
    case ParseStatus::unparsed:
      return "unparsed";
  }
  throw std::runtime_error("parse_status_name: invalid status");
}

ParseStatus parse_status_from_name(std::string_view name) {
  if (name == "exact") return ParseStatus::exact;
  if (name == "substring") return ParseStatus::substring;
  if (name == "fallback") return ParseStatus::fallback;
  if (name == "unparsed") return ParseStatus::unparsed;
  throw std::runtime_error("unknown parse status '" + std::string(name) + "'");
}

ParseOutcome parse_label(const std::string& generation, const std::vector<std::string>& label_space,
                         const ParsePolicy& policy) {
  if (label_space.empty()) {
    throw std::runtime_error("parse_label: empty label space");
  }

  const std::string trimmed = text::lower_ascii(text::trim(generation));
  for (const std::string& label : label_space) {
    if (trimmed == text::lower_ascii(label)) {
      return ParseOutcome{label, ParseStatus::exact};
    }
  }

  const std::string haystack = text::lower_ascii(generation);
  std::size_t best_pos = std::string::npos;
  const std::string* best_label = nullptr;
  for (const std::string& label : label_space) {
    const std::size_t pos = find_whole_word(haystack, text::lower_ascii(label));
    if (pos < best_pos) {  // strict <: ties keep the earlier label-space entry
      best_pos = pos;
      best_label = &label;
    }
  }
  if (best_label != nullptr) {
    return ParseOutcome{*best_label, ParseStatus::substring};
  }

  if (policy.lenient) {
    if (std::find(label_space.begin(), label_space.end(), policy.fallback_label) ==
        label_space.end()) {
      throw std::runtime_error("parse_label: fallback label '" + policy.fallback_label +
                               "' is not in the label space");
    }
    return ParseOutcome{policy.fallback_label, ParseStatus::fallback};
  }
  return ParseOutcome{kUnparsed, ParseStatus::unparsed};
}

std::string EchoBackend::generate(const InstructionInstance& instance, const DecodeConfig&) {
  return instance.output;
}

std::vector<Prediction> classify_instances(const std::vector<InstructionInstance>& instances,
                                           GenerationBackend& backend, const DecodeConfig& decode,
                                           const ParsePolicy& policy) {
  std::vector<Prediction> predictions;
  predictions.reserve(instances.size());
  for (const InstructionInstance& inst : instances) {
    Prediction pred;
    pred.meta = inst.meta;
    pred.gold = inst.output;
    try {
      pred.generation = backend.generate(inst, decode);
      ParseOutcome outcome =
          parse_label(pred.generation, extract_label_space(inst.instruction), policy);
      pred.predicted = outcome.label;
      pred.status = outcome.status;
    } catch (const std::exception& e) {
      pred.generation = std::string("<error: ") + e.what() + ">";
      pred.predicted = kUnparsed;
      pred.status = ParseStatus::unparsed;
    }
    predictions.push_back(std::move(pred));
  }
  return predictions;
}

void save_predictions_jsonl(const std::vector<Prediction>& preds, const std::string& path) {
  std::vector<std::string> lines;
  lines.reserve(preds.size());
  for (const Prediction& pred : preds) {
    ordered_json j;
    j["meta"]["source_dataset"] = pred.meta.source_dataset;
    j["meta"]["conversation_id"] = pred.meta.conversation_id;
    j["meta"]["turn_index"] = pred.meta.turn_index;
    j["meta"]["split"] = pred.meta.split;
    j["gold"] = pred.gold;
    j["generation"] = pred.generation;
    j["predicted"] = pred.predicted;
    j["parse_status"] = parse_status_name(pred.status);
    lines.push_back(j.dump());
  }
  jsonl::write_atomic(path, lines);
}

std::vector<Prediction> load_predictions_jsonl(const std::string& path) {
  std::vector<Prediction> preds;
  for (const std::string& line : jsonl::read_lines(path)) {
    ordered_json j = ordered_json::parse(line);
    Prediction pred;
    const auto& meta = j.at("meta");
    pred.meta.source_dataset = meta.at("source_dataset").get<std::string>();
    pred.meta.conversation_id = meta.at("conversation_id").get<std::string>();
    pred.meta.turn_index = meta.at("turn_index").get<int>();
    pred.meta.split = meta.at("split").get<std::string>();
    pred.gold = j.at("gold").get<std::string>();
    pred.generation = j.at("generation").get<std::string>();
    pred.predicted = j.at("predicted").get<std::string>();
    pred.status = parse_status_from_name(j.at("parse_status").get<std::string>());
    preds.push_back(std::move(pred));
  }
  return preds;
}

}  // namespace erctk
