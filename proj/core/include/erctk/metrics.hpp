#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "erctk/inference.hpp"

namespace erctk {

struct ClassScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  std::string dataset;
  std::vector<std::string> labels;  // gold rows; columns add <unparsed> last
  std::vector<std::vector<std::size_t>> confusion;
  std::size_t n = 0;
  double accuracy = 0.0;
  double weighted_f1 = 0.0;
  std::map<std::string, ClassScore> per_class;
  std::size_t unparsed = 0;
};

// Gold labels must lie in the label space; predicted labels must lie in
// the space or be <unparsed>. Per-class F1 uses a zero-division convention
// of 0; weighted F1 weights by gold support. Accuracy is the confusion
// trace over n.
EvalReport evaluate(const std::vector<Prediction>& preds,
                    const std::vector<std::string>& label_space, const std::string& dataset);

struct SeedRun {
  unsigned seed = 0;
  EvalReport report;
};

struct AggregateReport {
  std::string dataset;
  double mean_accuracy = 0.0;
  double mean_weighted_f1 = 0.0;
  std::vector<SeedRun> per_seed;
};

// All runs must share a dataset and label space.
AggregateReport aggregate_seeds(const std::vector<SeedRun>& runs);

std::string report_to_json(const EvalReport& report);
std::string report_to_text(const EvalReport& report);
std::string aggregate_to_json(const AggregateReport& report);
std::string aggregate_to_text(const AggregateReport& report);

// Gold-label sidecar: {"meta":{...},"label":"..."} per line.
void save_gold_jsonl(const std::vector<InstructionInstance>& instances, const std::string& path);

}  // namespace erctk
