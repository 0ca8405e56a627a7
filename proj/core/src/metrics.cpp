#include "erctk/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "erctk/jsonl.hpp"
#include "nlohmann/json.hpp"

namespace erctk {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json report_json(const EvalReport& report) {
  ordered_json j;
  j["dataset"] = report.dataset;
  j["n"] = report.n;
  j["accuracy"] = report.accuracy;
  j["weighted_f1"] = report.weighted_f1;
  j["labels"] = report.labels;
  j["confusion"] = report.confusion;
  ordered_json per_class = ordered_json::object();
  for (const std::string& label : report.labels) {
    const ClassScore& score = report.per_class.at(label);
    ordered_json s;
    s["precision"] = score.precision;
    s["recall"] = score.recall;
    s["f1"] = score.f1;
    s["support"] = score.support;
    per_class[label] = std::move(s);
  }
  j["per_class"] = std::move(per_class);
  j["unparsed"] = report.unparsed;
  return j;
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << v;
  return out.str();
}

}  // namespace

EvalReport evaluate(const std::vector<Prediction>& preds,
                    const std::vector<std::string>& label_space, const std::string& dataset) {
  if (label_space.empty()) {
    throw std::runtime_error("evaluate: empty label space");
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < label_space.size(); ++i) {
    if (!index.emplace(label_space[i], i).second) {
      throw std::runtime_error("evaluate: duplicate label '" + label_space[i] + "'");
    }
  }

  EvalReport report;
  report.dataset = dataset;
  report.labels = label_space;
  report.n = preds.size();
  report.confusion.assign(label_space.size(),
                          std::vector<std::size_t>(label_space.size() + 1, 0));

  const std::size_t unparsed_col = label_space.size();
  for (const Prediction& pred : preds) {
    auto gold_it = index.find(pred.gold);
    if (gold_it == index.end()) {
      throw std::runtime_error("evaluate: gold label '" + pred.gold +
                               "' is outside the label space");
    }
    std::size_t col = unparsed_col;
    if (pred.predicted != kUnparsed) {
      auto pred_it = index.find(pred.predicted);
      if (pred_it == index.end()) {
        throw std::runtime_error("evaluate: predicted label '" + pred.predicted +
                                 "' is outside the label space");
      }
      col = pred_it->second;
    } else {
      ++report.unparsed;
    }
    ++report.confusion[gold_it->second][col];
  }

  std::size_t trace = 0;
  double weighted_sum = 0.0;
  std::size_t total_support = 0;
  for (std::size_t c = 0; c < label_space.size(); ++c) {
    const std::size_t tp = report.confusion[c][c];
    std::size_t support = 0;
    for (std::size_t col = 0; col <= unparsed_col; ++col) support += report.confusion[c][col];
    std::size_t predicted_as_c = 0;
    for (std::size_t row = 0; row < label_space.size(); ++row) {
      predicted_as_c += report.confusion[row][c];
    }
    const std::size_t fp = predicted_as_c - tp;
    const std::size_t fn = support - tp;

    ClassScore score;
    score.support = support;
    score.precision = (tp + fp) == 0 ? 0.0 : double(tp) / double(tp + fp);
    score.recall = (tp + fn) == 0 ? 0.0 : double(tp) / double(tp + fn);
    score.f1 = (score.precision + score.recall) == 0.0
                   ? 0.0
                   : 2.0 * score.precision * score.recall / (score.precision + score.recall);
    report.per_class[label_space[c]] = score;

    trace += tp;
    weighted_sum += double(support) * score.f1;
    total_support += support;
  }
  report.accuracy = report.n == 0 ? 0.0 : double(trace) / double(report.n);
  report.weighted_f1 = total_support == 0 ? 0.0 : weighted_sum / double(total_support);
  return report;
}

AggregateReport aggregate_seeds(const std::vector<SeedRun>& runs) {
  if (runs.empty()) {
    throw std::runtime_error("aggregate_seeds: no runs");
  }
  AggregateReport agg;
  agg.dataset = runs.front().report.dataset;
  for (const SeedRun& run : runs) {
    if (run.report.dataset != agg.dataset) {
      throw std::runtime_error("aggregate_seeds: mixed datasets '" + agg.dataset + "' and '" +
                               run.report.dataset + "'");
    }
    if (run.report.labels != runs.front().report.labels) {
      throw std::runtime_error("aggregate_seeds: label spaces differ between runs");
    }
    agg.mean_accuracy += run.report.accuracy;
    agg.mean_weighted_f1 += run.report.weighted_f1;
  }
  agg.mean_accuracy /= double(runs.size());
  agg.mean_weighted_f1 /= double(runs.size());
  agg.per_seed = runs;
  return agg;
}

std::string report_to_json(const EvalReport& report) { return report_json(report).dump(); }

std::string report_to_text(const EvalReport& report) {
  std::ostringstream out;
  out << "dataset: " << report.dataset << "  n=" << report.n
      << "  accuracy=" << fmt(report.accuracy) << "  weighted_f1=" << fmt(report.weighted_f1)
      << "  unparsed=" << report.unparsed << "\n";

  std::size_t width = std::string("<unparsed>").size();
  for (const std::string& label : report.labels) width = std::max(width, label.size());
  width += 2;

  out << std::setw(int(width)) << "gold\\pred";
  for (const std::string& label : report.labels) out << std::setw(int(width)) << label;
  out << std::setw(int(width)) << "<unparsed>" << "\n";
  for (std::size_t row = 0; row < report.labels.size(); ++row) {
    out << std::setw(int(width)) << report.labels[row];
    for (std::size_t col = 0; col < report.confusion[row].size(); ++col) {
      out << std::setw(int(width)) << report.confusion[row][col];
    }
    out << "\n";
  }
  out << "per-class:\n";
  for (const std::string& label : report.labels) {
    const ClassScore& s = report.per_class.at(label);
    out << "  " << label << ": precision=" << fmt(s.precision) << " recall=" << fmt(s.recall)
        << " f1=" << fmt(s.f1) << " support=" << s.support << "\n";
  }
  return out.str();
}

std::string aggregate_to_json(const AggregateReport& report) {
  ordered_json j;
  j["dataset"] = report.dataset;
  ordered_json seeds = ordered_json::array();
  for (const SeedRun& run : report.per_seed) seeds.push_back(run.seed);
  j["seeds"] = std::move(seeds);
  j["mean_accuracy"] = report.mean_accuracy;
  j["mean_weighted_f1"] = report.mean_weighted_f1;
  ordered_json per_seed = ordered_json::array();
  for (const SeedRun& run : report.per_seed) {
    ordered_json entry;
    entry["seed"] = run.seed;
    entry["report"] = report_json(run.report);
    per_seed.push_back(std::move(entry));
  }
  j["per_seed"] = std::move(per_seed);
  return j.dump();
}

std::string aggregate_to_text(const AggregateReport& report) {
  std::ostringstream out;
  out << "dataset: " << report.dataset << "  seeds=" << report.per_seed.size()
      << "  mean_accuracy=" << fmt(report.mean_accuracy)
      << "  mean_weighted_f1=" << fmt(report.mean_weighted_f1) << "\n";
  for (const SeedRun& run : report.per_seed) {
    out << "  seed " << run.seed << ": accuracy=" << fmt(run.report.accuracy)
        << " weighted_f1=" << fmt(run.report.weighted_f1) << "\n";
  }
  return out.str();
}

void save_gold_jsonl(const std::vector<InstructionInstance>& instances, const std::string& path) {
  std::vector<std::string> lines;
  lines.reserve(instances.size());
  for (const InstructionInstance& inst : instances) {
    ordered_json j;
    j["meta"]["source_dataset"] = inst.meta.source_dataset;
    j["meta"]["conversation_id"] = inst.meta.conversation_id;
    j["meta"]["turn_index"] = inst.meta.turn_index;
    j["meta"]["split"] = inst.meta.split;
    j["label"] = inst.output;
    lines.push_back(j.dump());
  }
  jsonl::write_atomic(path, lines);
}

}  // namespace erctk
