#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "erctk/corpus.hpp"
#include "erctk/instruction.hpp"

namespace {

erctk::Conversation make_conversation(int turns) {
  erctk::Conversation conv;
  conv.conversation_id = "train/dia0";
  conv.split = erctk::Split::train;
  for (int i = 0; i < turns; ++i) {
    erctk::Utterance utt;
    utt.turn_index = i;
    utt.speaker = "Speaker" + std::to_string(i % 5);
    utt.text = "This is turn number " + std::to_string(i) +
               " of a synthetic multi-party conversation used for benchmarking.";
    utt.raw_label = "neutral";
    utt.canonical_label = "neutral";
    conv.utterances.push_back(std::move(utt));
  }
  return conv;
}

void BM_RenderInstruction(benchmark::State& state) {
  int turns = static_cast<int>(state.range(0));
  erctk::Conversation conv = make_conversation(turns);
  std::vector<std::string> space = erctk::unified_label_space();
  for (auto _ : state) {
    erctk::InstructionInstance inst = erctk::render_instruction(
        erctk::Dataset::MELD, conv, turns - 1, 5, "Two people talk at a table.", space);
    benchmark::DoNotOptimize(inst.output.size());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()));
}

void BM_InstanceToJson(benchmark::State& state) {
  erctk::Conversation conv = make_conversation(16);
  std::vector<std::string> space = erctk::unified_label_space();
  erctk::InstructionInstance inst = erctk::render_instruction(
      erctk::Dataset::MELD, conv, 15, 5, "Two people talk at a table.", space);
  for (auto _ : state) {
    std::string line = erctk::instance_to_json(inst);
    benchmark::DoNotOptimize(line.size());
  }
}

void BM_RenderPrompt(benchmark::State& state) {
  erctk::Conversation conv = make_conversation(16);
  std::vector<std::string> space = erctk::unified_label_space();
  erctk::InstructionInstance inst = erctk::render_instruction(
      erctk::Dataset::MELD, conv, 15, static_cast<int>(state.range(0)),
      "Two people talk at a table.", space);
  for (auto _ : state) {
    std::string prompt = erctk::render_prompt(inst);
    benchmark::DoNotOptimize(prompt.size());
  }
}

void BM_BuildDataset(benchmark::State& state) {
  erctk::Corpus corpus;
  corpus.dataset = erctk::Dataset::MELD;
  corpus.label_space = erctk::unified_label_space();
  for (int d = 0; d < static_cast<int>(state.range(0)); ++d) {
    erctk::Conversation conv = make_conversation(12);
    conv.conversation_id = "train/dia" + std::to_string(d);
    corpus.conversations.push_back(std::move(conv));
  }
  erctk::BuildConfig cfg;
  cfg.context_window = 3;
  for (auto _ : state) {
    erctk::BuildResult result = erctk::build_dataset({&corpus}, cfg, nullptr);
    benchmark::DoNotOptimize(result.instances.size());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * state.range(0) * 12);
}

BENCHMARK(BM_RenderInstruction)->Arg(8)->Arg(64);
BENCHMARK(BM_InstanceToJson);
BENCHMARK(BM_RenderPrompt)->Arg(0)->Arg(5)->Arg(15);
BENCHMARK(BM_BuildDataset)->Range(8, 512);

}  // namespace
