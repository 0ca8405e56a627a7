#pragma once

#include <string>
#include <vector>

#include "erctk/instruction.hpp"

namespace erctk {

inline constexpr const char* kUnparsed = "<unparsed>";

enum class ParseStatus { exact, substring, fallback, unparsed };
const char* parse_status_name(ParseStatus s);
ParseStatus parse_status_from_name(std::string_view name);

struct ParsePolicy {
  bool lenient = false;                  // strict -> unparsed, lenient -> fallback label
  std::string fallback_label = "neutral";
};

struct ParseOutcome {
  std::string label;  // kUnparsed when nothing matched under strict policy
  ParseStatus status = ParseStatus::unparsed;
  friend bool operator==(const ParseOutcome&, const ParseOutcome&) = default;
};

// Rules, in order:
//  1. the trimmed generation equals a label case-insensitively -> exact;
//  2. labels occurring in the generation as whole words (case-insensitive,
//     boundaries = non-alphanumeric) -> substring; the earliest occurrence
//     wins, ties broken by label-space order;
//  3. otherwise strict yields <unparsed>, lenient yields the policy's
//     fallback label with status fallback.
ParseOutcome parse_label(const std::string& generation, const std::vector<std::string>& label_space,
                         const ParsePolicy& policy);

struct DecodeConfig {
  std::string strategy = "greedy";  // or "sample"
  int max_new_tokens = 16;
  unsigned seed = 0;
};

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::string name() const = 0;
  virtual std::string generate(const InstructionInstance& instance, const DecodeConfig& decode) = 0;
};

// Returns the instance's gold output verbatim; closes the loop for
// pipeline tests.
class EchoBackend : public GenerationBackend {
 public:
  std::string name() const override { return "echo"; }
  std::string generate(const InstructionInstance& instance, const DecodeConfig&) override;
};

class FixedBackend : public GenerationBackend {
 public:
  explicit FixedBackend(std::string text) : text_(std::move(text)) {}
  std::string name() const override { return "fixed"; }
  std::string generate(const InstructionInstance&, const DecodeConfig&) override { return text_; }

 private:
  std::string text_;
};

// Scores with a tiny adapter checkpoint (see TinyAdapterBackend). greedy
// returns the argmax label; sample draws from the softmax with the decode
// seed.
class TinyGenerationBackend : public GenerationBackend {
 public:
  explicit TinyGenerationBackend(const std::string& checkpoint_path);
  ~TinyGenerationBackend() override;
  TinyGenerationBackend(TinyGenerationBackend&&) noexcept;
  TinyGenerationBackend& operator=(TinyGenerationBackend&&) noexcept;
  std::string name() const override { return "tiny"; }
  std::string generate(const InstructionInstance& instance, const DecodeConfig& decode) override;

 private:
  struct Impl;
  Impl* impl_ = nullptr;
};

struct Prediction {
  InstanceMeta meta;
  std::string gold;
  std::string generation;
  std::string predicted;  // kUnparsed possible
  ParseStatus status = ParseStatus::unparsed;
};

// Order-preserving; a backend failure on one instance is recorded as an
// unparsed prediction with the error text in `generation`.
std::vector<Prediction> classify_instances(const std::vector<InstructionInstance>& instances,
                                           GenerationBackend& backend, const DecodeConfig& decode,
                                           const ParsePolicy& policy);

void save_predictions_jsonl(const std::vector<Prediction>& preds, const std::string& path);
std::vector<Prediction> load_predictions_jsonl(const std::string& path);

}  // namespace erctk
