#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "erctk/corpus.hpp"
#include "erctk/describe.hpp"

namespace erctk {

struct SpeakerTurn {
  std::string speaker;
  std::string text;
  friend bool operator==(const SpeakerTurn&, const SpeakerTurn&) = default;
};

struct InstanceMeta {
  std::string source_dataset;
  std::string conversation_id;
  int turn_index = 0;
  std::string split;
  friend bool operator==(const InstanceMeta&, const InstanceMeta&) = default;
};

struct InstructionInstance {
  std::string instruction;
  std::string video_description;  // empty string when absent, never omitted
  std::vector<SpeakerTurn> context;
  SpeakerTurn input;
  std::string output;
  InstanceMeta meta;
  friend bool operator==(const InstructionInstance&, const InstructionInstance&) = default;
};

struct BuildConfig {
  int context_window = 1;  // k preceding turns
  bool include_video_description = false;
  std::string label_space_mode = "per_dataset";  // or "unified"
  std::string template_version = "v1";
  std::vector<std::string> splits = {"train"};
  int cutoff_len = 256;  // whitespace tokens; instances over it are counted
  friend bool operator==(const BuildConfig&, const BuildConfig&) = default;
};

BuildConfig load_build_config(const std::string& path);
void save_build_config(const BuildConfig& cfg, const std::string& path);

// The fixed v1 instruction sentence with the label space spliced in as
// ['a', 'b', ...].
std::string instruction_text(const std::vector<std::string>& label_space);

// The k turns preceding `index` in order; fewer near the start.
std::vector<SpeakerTurn> build_context(const Conversation& conv, int index, int k);

InstructionInstance render_instruction(Dataset dataset, const Conversation& conv, int index, int k,
                                       const std::string& video_description,
                                       const std::vector<std::string>& label_space);

struct BuildResult {
  std::vector<InstructionInstance> instances;
  std::size_t over_cutoff = 0;
};

// Build instances for the configured splits of the given corpora, ordered
// by (dataset, conversation_id, turn_index). Corpora must be normalized
// (canonical_label set everywhere). `cache` supplies descriptions when
// include_video_description is on; a miss yields "".
BuildResult build_dataset(const std::vector<const Corpus*>& corpora, const BuildConfig& cfg,
                          const DescriptionCache* cache);

struct EmitResult {
  std::size_t count = 0;
  std::string sha256;
};

EmitResult emit_jsonl(const std::vector<InstructionInstance>& instances, const std::string& path);
std::vector<InstructionInstance> load_instances_jsonl(const std::string& path);

std::string instance_to_json(const InstructionInstance& inst);  // one line, schema-exact
InstructionInstance instance_from_json(const std::string& line);

// Flatten an instance into the prompt text a generation backend consumes.
std::string render_prompt(const InstructionInstance& inst);

// Recover the label list from an instruction sentence's [...] clause.
std::vector<std::string> extract_label_space(const std::string& instruction);

}  // namespace erctk
