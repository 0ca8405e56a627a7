#include "erctk/instruction.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <tuple>

#include "erctk/hash.hpp"
#include "erctk/jsonl.hpp"
#include "erctk/text.hpp"
#include "nlohmann/json.hpp"

namespace erctk {

namespace {

using ordered_json = nlohmann::ordered_json;

std::tuple<Dataset, const std::string&, int> instance_key(const InstructionInstance& inst) {
  return {dataset_from_name(inst.meta.source_dataset), inst.meta.conversation_id,
          inst.meta.turn_index};
}

void validate_build_config(const BuildConfig& cfg) {
  if (cfg.context_window < 0) {
    throw std::runtime_error("build config: context_window must be >= 0, got " +
                             std::to_string(cfg.context_window));
  }
  if (cfg.label_space_mode != "per_dataset" && cfg.label_space_mode != "unified") {
    throw std::runtime_error("build config: label_space_mode must be 'per_dataset' or 'unified', got '" +
                             cfg.label_space_mode + "'");
  }
  if (cfg.cutoff_len < 1) {
    throw std::runtime_error("build config: cutoff_len must be >= 1, got " +
                             std::to_string(cfg.cutoff_len));
  }
  if (cfg.template_version != "v1") {
    throw std::runtime_error("build config: unknown template_version '" + cfg.template_version +
                             "'");
  }
  for (const std::string& split : cfg.splits) {
    split_from_name(split);  // throws on unknown names
  }
  if (cfg.splits.empty()) {
    throw std::runtime_error("build config: splits must not be empty");
  }
}

}  // namespace

BuildConfig load_build_config(const std::string& path) {
  ordered_json j = ordered_json::parse(jsonl::read_file(path));
  if (!j.is_object()) {
    throw std::runtime_error("build config " + path + ": expected a JSON object");
  }
  static const std::set<std::string> kKnown = {"context_window", "include_video_description",
                                               "label_space_mode", "template_version",
                                               "splits",         "cutoff_len"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!kKnown.count(key)) {
      throw std::runtime_error("build config " + path + ": unknown key '" + key + "'");
    }
  }
  BuildConfig cfg;
  if (j.contains("context_window")) cfg.context_window = j["context_window"].get<int>();
  if (j.contains("include_video_description"))
    cfg.include_video_description = j["include_video_description"].get<bool>();
  if (j.contains("label_space_mode"))
    cfg.label_space_mode = j["label_space_mode"].get<std::string>();
  if (j.contains("template_version"))
    cfg.template_version = j["template_version"].get<std::string>();
  if (j.contains("splits")) cfg.splits = j["splits"].get<std::vector<std::string>>();
  if (j.contains("cutoff_len")) cfg.cutoff_len = j["cutoff_len"].get<int>();
  validate_build_config(cfg);
  return cfg;
}

void save_build_config(const BuildConfig& cfg, const std::string& path) {
  ordered_json j;
  j["context_window"] = cfg.context_window;
  j["include_video_description"] = cfg.include_video_description;
  j["label_space_mode"] = cfg.label_space_mode;
  j["template_version"] = cfg.template_version;
  j["splits"] = cfg.splits;
  j["cutoff_len"] = cfg.cutoff_len;
  jsonl::write_file_atomic(path, j.dump(2) + "\n");
}

std::string instruction_text(const std::vector<std::string>& label_space) {
  std::string list;
  for (const std::string& label : label_space) {
    if (!list.empty()) list += ", ";
    list += "'" + label + "'";
  }
  return "Given the Video Description and Context, detect the emotion of the input, and assign "
         "an accuracy label from [" +
         list + "].";
}

std::vector<std::string> extract_label_space(const std::string& instruction) {
  std::size_t open = instruction.find('[');
  std::size_t close = instruction.find(']', open == std::string::npos ? 0 : open);
  if (open == std::string::npos || close == std::string::npos) {
    throw std::runtime_error("instruction sentence has no [...] label list");
  }
  std::string inner = instruction.substr(open + 1, close - open - 1);
  std::vector<std::string> labels;
  std::size_t pos = 0;
  while (pos < inner.size()) {
    std::size_t end = inner.find(", ", pos);
    std::string item =
        end == std::string::npos ? inner.substr(pos) : inner.substr(pos, end - pos);
    if (item.size() < 2 || item.front() != '\'' || item.back() != '\'') {
      throw std::runtime_error("instruction label list entry is not single-quoted: " + item);
    }
    labels.push_back(item.substr(1, item.size() - 2));
    if (end == std::string::npos) break;
    pos = end + 2;
  }
  if (labels.empty()) {
    throw std::runtime_error("instruction sentence has an empty label list");
  }
  return labels;
}

std::vector<SpeakerTurn> build_context(const Conversation& conv, int index, int k) {
  if (index < 0 || std::size_t(index) >= conv.utterances.size()) {
    throw std::runtime_error("build_context: index " + std::to_string(index) +
                             " out of range for conversation " + conv.conversation_id);
  }
  if (k < 0) {
    throw std::runtime_error("build_context: negative window " + std::to_string(k));
  }
  std::vector<SpeakerTurn> context;
  const int start = std::max(0, index - k);
  context.reserve(std::size_t(index - start));
  for (int j = start; j < index; ++j) {
    context.push_back(SpeakerTurn{conv.utterances[std::size_t(j)].speaker,
                                  conv.utterances[std::size_t(j)].text});
  }
  return context;
}

InstructionInstance render_instruction(Dataset dataset, const Conversation& conv, int index, int k,
                                       const std::string& video_description,
                                       const std::vector<std::string>& label_space) {
  const Utterance& target = conv.utterances.at(std::size_t(index));
  if (!target.canonical_label.has_value()) {
    throw std::runtime_error("render_instruction: utterance " + conv.conversation_id + "/" +
                             std::to_string(target.turn_index) +
                             " has no canonical label; normalize the corpus first");
  }
  InstructionInstance inst;
  inst.instruction = instruction_text(label_space);
  inst.video_description = video_description;
  inst.context = build_context(conv, index, k);
  inst.input = SpeakerTurn{target.speaker, target.text};
  inst.output = *target.canonical_label;
  inst.meta.source_dataset = dataset_name(dataset);
  inst.meta.conversation_id = conv.conversation_id;
  inst.meta.turn_index = target.turn_index;
  inst.meta.split = split_name(conv.split);
  return inst;
}

BuildResult build_dataset(const std::vector<const Corpus*>& corpora, const BuildConfig& cfg,
                          const DescriptionCache* cache) {
  validate_build_config(cfg);
  std::set<std::string> wanted_splits(cfg.splits.begin(), cfg.splits.end());
  const bool unified = cfg.label_space_mode == "unified";
  const std::vector<std::string> unified_space = unified_label_space();

  BuildResult result;
  for (const Corpus* corpus : corpora) {
    if (corpus == nullptr) throw std::runtime_error("build_dataset: null corpus");
    const std::vector<std::string>& space = unified ? unified_space : corpus->label_space;
    const std::string dataset = dataset_name(corpus->dataset);
    for (const Conversation& conv : corpus->conversations) {
      if (!wanted_splits.count(split_name(conv.split))) continue;
      for (std::size_t i = 0; i < conv.utterances.size(); ++i) {
        const Utterance& utt = conv.utterances[i];
        if (!utt.canonical_label.has_value()) {
          throw std::runtime_error("build_dataset: " + dataset + " " + conv.conversation_id +
                                   " turn " + std::to_string(utt.turn_index) +
                                   " has no canonical label; normalize the corpus first");
        }
        if (std::find(space.begin(), space.end(), *utt.canonical_label) == space.end()) {
          throw std::runtime_error("build_dataset: label '" + *utt.canonical_label + "' (" +
                                   dataset + " " + conv.conversation_id + " turn " +
                                   std::to_string(utt.turn_index) +
                                   ") is outside the configured label space");
        }
        std::string description;
        if (cfg.include_video_description && cache != nullptr) {
          if (auto hit = cache->lookup(DescriptionKey{dataset, conv.conversation_id,
                                                      utt.turn_index})) {
            description = *hit;
          }
        }
        result.instances.push_back(render_instruction(corpus->dataset, conv, int(i),
                                                      cfg.context_window, description, space));
      }
    }
  }

  std::sort(result.instances.begin(), result.instances.end(),
            [](const InstructionInstance& a, const InstructionInstance& b) {
              return instance_key(a) < instance_key(b);
            });
  for (const InstructionInstance& inst : result.instances) {
    if (text::word_count(render_prompt(inst)) > std::size_t(cfg.cutoff_len)) {
      ++result.over_cutoff;
    }
  }
  return result;
}

std::string instance_to_json(const InstructionInstance& inst) {
  ordered_json j;
  j["instruction"] = inst.instruction;
  j["video_description"] = inst.video_description;
  j["context"] = ordered_json::array();
  for (const SpeakerTurn& turn : inst.context) {
    ordered_json t;
    t["speaker"] = turn.speaker;
    t["text"] = turn.text;
    j["context"].push_back(std::move(t));
  }
  j["input"]["speaker"] = inst.input.speaker;
  j["input"]["text"] = inst.input.text;
  j["output"] = inst.output;
  j["meta"]["source_dataset"] = inst.meta.source_dataset;
  j["meta"]["conversation_id"] = inst.meta.conversation_id;
  j["meta"]["turn_index"] = inst.meta.turn_index;
  j["meta"]["split"] = inst.meta.split;
  return j.dump();
}

InstructionInstance instance_from_json(const std::string& line) {
  ordered_json j = ordered_json::parse(line);
  InstructionInstance inst;
  inst.instruction = j.at("instruction").get<std::string>();
  inst.video_description = j.at("video_description").get<std::string>();
  for (const auto& t : j.at("context")) {
    inst.context.push_back(
        SpeakerTurn{t.at("speaker").get<std::string>(), t.at("text").get<std::string>()});
  }
  inst.input.speaker = j.at("input").at("speaker").get<std::string>();
  inst.input.text = j.at("input").at("text").get<std::string>();
  inst.output = j.at("output").get<std::string>();
  const auto& meta = j.at("meta");
  inst.meta.source_dataset = meta.at("source_dataset").get<std::string>();
  inst.meta.conversation_id = meta.at("conversation_id").get<std::string>();
  inst.meta.turn_index = meta.at("turn_index").get<int>();
  inst.meta.split = meta.at("split").get<std::string>();
  return inst;
}

EmitResult emit_jsonl(const std::vector<InstructionInstance>& instances, const std::string& path) {
  std::vector<std::string> lines;
  lines.reserve(instances.size());
  for (const InstructionInstance& inst : instances) lines.push_back(instance_to_json(inst));
  jsonl::write_atomic(path, lines);
  EmitResult result;
  result.count = instances.size();
  result.sha256 = hash::sha256_hex_file(path);
  return result;
}

std::vector<InstructionInstance> load_instances_jsonl(const std::string& path) {
  std::vector<InstructionInstance> instances;
  for (const std::string& line : jsonl::read_lines(path)) {
    instances.push_back(instance_from_json(line));
  }
  return instances;
}

std::string render_prompt(const InstructionInstance& inst) {
  std::string prompt = inst.instruction;
  prompt += "\n\nVideo Description:\n";
  prompt += inst.video_description;
  prompt += "\n\nContext:\n";
  for (const SpeakerTurn& turn : inst.context) {
    prompt += turn.speaker + ": " + turn.text + "\n";
  }
  prompt += "\nInput:\n" + inst.input.speaker + ": " + inst.input.text + "\n\nLabel:";
  return prompt;
}

}  // namespace erctk
