#pragma once

#include <optional>
#include <string>
#include <vector>

#include "erctk/corpus.hpp"
#include "erctk/metrics.hpp"

namespace erctk {

enum class AblationVariant { full, no_context, add_video_description };
const char* ablation_variant_name(AblationVariant v);

struct AblationSpec {
  AblationVariant variant = AblationVariant::full;
  int context_window = 1;
  bool include_video_description = false;
};

// full uses the base window with descriptions off; no_context forces the
// window to 0; add_video_description keeps the base window and turns
// descriptions on.
std::vector<AblationSpec> default_ablation_specs(int base_context_window = 1);

struct AblationCell {
  std::string dataset;
  std::optional<EvalReport> report;
  std::string skip_reason;  // set when report is absent
};

struct AblationRow {
  AblationSpec spec;
  std::vector<AblationCell> cells;  // one per dataset, caller order
};

struct AblationTable {
  std::vector<AblationRow> rows;
};

class AblationPipeline {
 public:
  virtual ~AblationPipeline() = default;
  virtual AblationCell run(Dataset dataset, const AblationSpec& spec) = 0;
};

AblationTable run_ablation(const std::vector<Dataset>& datasets,
                           const std::vector<AblationSpec>& specs, AblationPipeline& pipeline);

std::string ablation_to_json(const AblationTable& table);
std::string ablation_to_text(const AblationTable& table);

}  // namespace erctk
