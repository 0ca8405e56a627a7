#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "erctk/corpus.hpp"
#include "erctk/inference.hpp"
#include "erctk/metrics.hpp"

namespace {

std::vector<erctk::Prediction> make_predictions(int n) {
  std::vector<std::string> space = erctk::unified_label_space();
  std::mt19937 rng(12345);
  std::uniform_int_distribution<std::size_t> pick(0, space.size() - 1);
  std::uniform_int_distribution<int> coin(0, 19);

  std::vector<erctk::Prediction> preds;
  preds.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    erctk::Prediction p;
    p.meta = {"MELD", "dia" + std::to_string(i / 12), i % 12, "test"};
    p.gold = space[pick(rng)];
    if (coin(rng) == 0) {
      p.predicted = erctk::kUnparsed;
      p.status = erctk::ParseStatus::unparsed;
    } else {
      p.predicted = space[pick(rng)];
      p.status = erctk::ParseStatus::exact;
    }
    p.generation = p.predicted;
    preds.push_back(std::move(p));
  }
  return preds;
}

void BM_Evaluate(benchmark::State& state) {
  std::vector<erctk::Prediction> preds = make_predictions(static_cast<int>(state.range(0)));
  std::vector<std::string> space = erctk::unified_label_space();
  for (auto _ : state) {
    erctk::EvalReport report = erctk::evaluate(preds, space, "MELD");
    benchmark::DoNotOptimize(report.weighted_f1);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * state.range(0));
}

void BM_ReportToJson(benchmark::State& state) {
  std::vector<erctk::Prediction> preds = make_predictions(static_cast<int>(state.range(0)));
  std::vector<std::string> space = erctk::unified_label_space();
  erctk::EvalReport report = erctk::evaluate(preds, space, "MELD");
  for (auto _ : state) {
    std::string doc = erctk::report_to_json(report);
    benchmark::DoNotOptimize(doc.size());
  }
}

void BM_ParseLabel(benchmark::State& state) {
  std::vector<std::string> space = erctk::unified_label_space();
  erctk::ParsePolicy policy;
  std::string generation =
      "The speaker sounds quite upset here; overall this reads as sadness to me.";
  for (auto _ : state) {
    erctk::ParseOutcome outcome = erctk::parse_label(generation, space, policy);
    benchmark::DoNotOptimize(outcome.status);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()));
}

BENCHMARK(BM_Evaluate)->Range(256, 65536);
BENCHMARK(BM_ReportToJson)->Arg(4096);
BENCHMARK(BM_ParseLabel);

}  // namespace
