#include "erctk/ablation.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "nlohmann/json.hpp"

namespace erctk {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << v;
  return out.str();
}

}  // namespace

const char* ablation_variant_name(AblationVariant v) {
  switch (v) {
    case AblationVariant::full:
      return "full";
    case AblationVariant::no_context:
      return "no_context";
    case AblationVariant::add_video_description:
      return "add_video_description";
  }
  throw std::runtime_error("ablation_variant_name: invalid variant");
}

std::vector<AblationSpec> default_ablation_specs(int base_context_window) {
  if (base_context_window < 1) {
    throw std::runtime_error("default_ablation_specs: base context window must be >= 1");
  }
  AblationSpec full;
  full.variant = AblationVariant::full;
  full.context_window = base_context_window;
  full.include_video_description = false;

  AblationSpec no_context;
  no_context.variant = AblationVariant::no_context;
  no_context.context_window = 0;
  no_context.include_video_description = false;

  AblationSpec add_video;
  add_video.variant = AblationVariant::add_video_description;
  add_video.context_window = base_context_window;
  add_video.include_video_description = true;

  return {full, no_context, add_video};
}

AblationTable run_ablation(const std::vector<Dataset>& datasets,
                           const std::vector<AblationSpec>& specs, AblationPipeline& pipeline) {
  AblationTable table;
  for (const AblationSpec& spec : specs) {
    AblationRow row;
    row.spec = spec;
    for (Dataset dataset : datasets) {
      row.cells.push_back(pipeline.run(dataset, spec));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string ablation_to_json(const AblationTable& table) {
  ordered_json j;
  j["rows"] = ordered_json::array();
  for (const AblationRow& row : table.rows) {
    ordered_json r;
    r["variant"] = ablation_variant_name(row.spec.variant);
    r["context_window"] = row.spec.context_window;
    r["include_video_description"] = row.spec.include_video_description;
    r["cells"] = ordered_json::array();
    for (const AblationCell& cell : row.cells) {
      ordered_json c;
      c["dataset"] = cell.dataset;
      if (cell.report.has_value()) {
        c["accuracy"] = cell.report->accuracy;
        c["weighted_f1"] = cell.report->weighted_f1;
        c["n"] = cell.report->n;
      } else {
        c["skipped"] = cell.skip_reason;
      }
      r["cells"].push_back(std::move(c));
    }
    j["rows"].push_back(std::move(r));
  }
  return j.dump();
}

std::string ablation_to_text(const AblationTable& table) {
  std::ostringstream out;
  constexpr int kCell = 24;
  out << std::left << std::setw(kCell) << "variant";
  if (!table.rows.empty()) {
    for (const AblationCell& cell : table.rows.front().cells) {
      out << std::setw(kCell) << (cell.dataset + " (w-F1)");
    }
  }
  out << "\n";
  for (const AblationRow& row : table.rows) {
    out << std::left << std::setw(kCell) << ablation_variant_name(row.spec.variant);
    for (const AblationCell& cell : row.cells) {
      if (cell.report.has_value()) {
        out << std::setw(kCell) << fmt(cell.report->weighted_f1);
      } else {
        out << std::setw(kCell) << "-";
      }
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace erctk
