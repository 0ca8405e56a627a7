// erctk command-line front end: one subcommand per pipeline stage
// (ingest -> enrich -> build -> train -> predict -> eval, plus the stats
// and ablate reporting commands).

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <exception>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "erctk/ablation.hpp"
#include "erctk/corpus.hpp"
#include "erctk/describe.hpp"
#include "erctk/enrich.hpp"
#include "erctk/inference.hpp"
#include "erctk/instruction.hpp"
#include "erctk/jsonl.hpp"
#include "erctk/label_map.hpp"
#include "erctk/metrics.hpp"
#include "erctk/tiny_backend.hpp"
#include "erctk/train_config.hpp"
#include "erctk/trainer.hpp"
#include "json.hpp"

namespace {

using erctk::Dataset;

std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> items;
  std::string current;
  auto flush = [&] {
    std::size_t begin = current.find_first_not_of(" \t");
    if (begin != std::string::npos) {
      std::size_t end = current.find_last_not_of(" \t");
      items.push_back(current.substr(begin, end - begin + 1));
    }
    current.clear();
  };
  for (char c : csv) {
    if (c == ',') {
      flush();
    } else {
      current += c;
    }
  }
  flush();
  return items;
}

void print_doc(const std::string& doc) {
  std::cout << doc;
  if (doc.empty() || doc.back() != '\n') std::cout << "\n";
}

std::unique_ptr<erctk::GenerationBackend> make_generation_backend(const std::string& name,
                                                                  const std::string& fixed_text,
                                                                  const std::string& checkpoint) {
  if (name == "echo") return std::make_unique<erctk::EchoBackend>();
  if (name == "fixed") return std::make_unique<erctk::FixedBackend>(fixed_text);
  if (name == "tiny") return std::make_unique<erctk::TinyGenerationBackend>(checkpoint);
  throw std::runtime_error("unknown generation backend '" + name + "'");
}

// ---------------------------------------------------------------------------
// ingest

struct IngestOpts {
  std::string dataset;
  std::string root;
  std::string out;
  bool lax = false;
  double carve = 0.0;
  std::string carve_seed = "erctk";
};

void run_ingest(const IngestOpts& opts) {
  Dataset dataset = erctk::dataset_from_name(opts.dataset);
  erctk::ParseResult parsed = erctk::parse_corpus(dataset, opts.root);
  for (const std::string& note : parsed.notes) std::cout << "note: " << note << "\n";
  std::cout << "rows_parsed=" << parsed.counts.rows_parsed
            << " rows_rejected=" << parsed.counts.rows_rejected << "\n";
  for (const auto& [reason, count] : parsed.counts.rejected_reasons)
    std::cout << "rejected " << reason << "=" << count << "\n";

  std::vector<erctk::Violation> violations = erctk::validate_corpus(parsed.corpus);
  for (const erctk::Violation& v : violations) {
    std::cout << "violation: " << v.kind << " conversation=" << v.conversation_id;
    if (v.turn_index >= 0) std::cout << " turn=" << v.turn_index;
    if (!v.detail.empty()) std::cout << " (" << v.detail << ")";
    std::cout << "\n";
  }
  if (!violations.empty() && !opts.lax)
    throw std::runtime_error("corpus failed validation with " + std::to_string(violations.size()) +
                             " finding(s); pass --lax to write it anyway");

  if (opts.carve > 0.0) {
    std::size_t moved = erctk::carve_validation(parsed.corpus, opts.carve, opts.carve_seed);
    std::cout << "carved=" << moved << "\n";
  }
  erctk::save_corpus_jsonl(parsed.corpus, opts.out);
  std::cout << "wrote " << opts.out << "\n";
}

// ---------------------------------------------------------------------------
// stats

struct StatsOpts {
  std::string dataset;
  std::string root;
  bool json = false;
};

void run_stats(const StatsOpts& opts) {
  Dataset dataset = erctk::dataset_from_name(opts.dataset);
  erctk::ParseResult parsed = erctk::parse_corpus(dataset, opts.root);
  print_doc(opts.json ? erctk::stats_to_json(parsed.corpus)
                      : erctk::stats_to_text(parsed.corpus));
}

// ---------------------------------------------------------------------------
// enrich

struct EnrichOpts {
  std::string in;
  std::string label_map;
  std::string out;
  bool lax = false;
  bool describe = false;
  std::string video_root;
  std::string cache_path;
  std::string prompt_path;
  int frames = 3;
  std::string provider = "stub";
  std::string endpoint;
  double requests_per_sec = 4.0;
  int max_in_flight = 4;
  int max_attempts = 4;
  int base_delay_ms = 500;
};

void run_enrich(const EnrichOpts& opts) {
  erctk::Corpus corpus = erctk::load_corpus_jsonl(opts.in);
  erctk::LabelMap map = erctk::LabelMap::load(opts.label_map);
  erctk::NormalizeReport report = erctk::normalize_corpus(corpus, map, /*strict=*/!opts.lax);
  std::cout << "normalized=" << report.normalized << " failures=" << report.failures.size()
            << "\n";
  for (const erctk::NormalizeFailure& f : report.failures)
    std::cout << "unmapped: conversation=" << f.conversation_id << " turn=" << f.turn_index
              << " raw_label=" << f.raw_label << "\n";

  if (opts.describe) {
    erctk::DescriptionCache cache = erctk::DescriptionCache::load(opts.cache_path);
    erctk::PromptTemplate prompt = erctk::PromptTemplate::load(opts.prompt_path);
    std::unique_ptr<erctk::DescriptionClient> client;
    if (opts.provider == "stub") {
      client = std::make_unique<erctk::StubDescriptionClient>();
    } else if (opts.provider == "http") {
      erctk::HttpClientConfig config;
      config.endpoint = opts.endpoint;
      client = std::make_unique<erctk::HttpDescriptionClient>(config);
    } else {
      throw std::runtime_error("unknown description provider '" + opts.provider + "'");
    }
    erctk::RetryPolicy retry;
    retry.max_attempts = opts.max_attempts;
    retry.base_delay_ms = opts.base_delay_ms;
    erctk::RateLimit limit;
    limit.requests_per_sec = opts.requests_per_sec;
    limit.max_in_flight = opts.max_in_flight;
    erctk::DescribeRunReport described = erctk::describe_corpus(
        corpus, opts.video_root, opts.frames, *client, prompt, cache, retry, limit);
    std::cout << "described=" << described.described << " cache_hits=" << described.cache_hits
              << " skipped_no_video=" << described.skipped_no_video
              << " failed=" << described.failed << "\n";
    for (const std::string& err : described.errors) std::cout << "describe error: " << err << "\n";
    if (described.failed > 0)
      throw std::runtime_error(std::to_string(described.failed) + " clip(s) failed to describe");
  }

  erctk::save_corpus_jsonl(corpus, opts.out);
  std::cout << "wrote " << opts.out << "\n";
}

// ---------------------------------------------------------------------------
// build

struct BuildOpts {
  std::vector<std::string> inputs;
  std::string out;
  std::string config_path;
  int context_window = 1;
  bool include_video_description = false;
  std::string label_space_mode = "per_dataset";
  std::string splits = "train";
  int cutoff_len = 256;
  std::string cache_path;
  std::string gold_out;
};

struct BuildFlags {
  CLI::Option* context_window = nullptr;
  CLI::Option* include_video_description = nullptr;
  CLI::Option* label_space_mode = nullptr;
  CLI::Option* splits = nullptr;
  CLI::Option* cutoff_len = nullptr;
};

void run_build(const BuildOpts& opts, const BuildFlags& given) {
  erctk::BuildConfig cfg = opts.config_path.empty() ? erctk::BuildConfig{}
                                                    : erctk::load_build_config(opts.config_path);
  if (given.context_window->count() > 0) cfg.context_window = opts.context_window;
  if (given.include_video_description->count() > 0)
    cfg.include_video_description = opts.include_video_description;
  if (given.label_space_mode->count() > 0) cfg.label_space_mode = opts.label_space_mode;
  if (given.splits->count() > 0) cfg.splits = split_csv(opts.splits);
  if (given.cutoff_len->count() > 0) cfg.cutoff_len = opts.cutoff_len;

  std::vector<erctk::Corpus> corpora;
  corpora.reserve(opts.inputs.size());
  for (const std::string& path : opts.inputs) corpora.push_back(erctk::load_corpus_jsonl(path));
  std::vector<const erctk::Corpus*> pointers;
  pointers.reserve(corpora.size());
  for (const erctk::Corpus& corpus : corpora) pointers.push_back(&corpus);

  std::optional<erctk::DescriptionCache> cache;
  if (!opts.cache_path.empty()) cache.emplace(erctk::DescriptionCache::load(opts.cache_path));

  erctk::BuildResult result = erctk::build_dataset(pointers, cfg, cache ? &*cache : nullptr);
  erctk::EmitResult emitted = erctk::emit_jsonl(result.instances, opts.out);
  std::cout << "instances=" << emitted.count << " over_cutoff=" << result.over_cutoff
            << " sha256=" << emitted.sha256 << "\n";
  if (!opts.gold_out.empty()) {
    erctk::save_gold_jsonl(result.instances, opts.gold_out);
    std::cout << "gold=" << opts.gold_out << "\n";
  }
  std::cout << "wrote " << opts.out << "\n";
}

// ---------------------------------------------------------------------------
// train

struct TrainOpts {
  std::string data;
  std::string out;
  std::string config_path;
  std::string backend = "stub";
  int epochs = 0;
  int batch_size = 0;
  int micro_batch_size = 0;
  double learning_rate = 0.0;
  unsigned seed = 0;
};

struct TrainFlags {
  CLI::Option* epochs = nullptr;
  CLI::Option* batch_size = nullptr;
  CLI::Option* micro_batch_size = nullptr;
  CLI::Option* learning_rate = nullptr;
  CLI::Option* seed = nullptr;
};

void run_train(const TrainOpts& opts, const TrainFlags& given) {
  erctk::TrainConfig cfg = opts.config_path.empty() ? erctk::default_train_config()
                                                    : erctk::load_train_config(opts.config_path);
  if (given.epochs->count() > 0) cfg.epochs = opts.epochs;
  if (given.batch_size->count() > 0) cfg.batch_size = opts.batch_size;
  if (given.micro_batch_size->count() > 0) cfg.micro_batch_size = opts.micro_batch_size;
  if (given.learning_rate->count() > 0) cfg.learning_rate = opts.learning_rate;
  if (given.seed->count() > 0) cfg.seed = opts.seed;

  std::unique_ptr<erctk::TrainerBackend> backend;
  if (opts.backend == "stub") {
    backend = std::make_unique<erctk::RecordingStubBackend>();
  } else if (opts.backend == "tiny") {
    backend = std::make_unique<erctk::TinyAdapterBackend>();
  } else {
    throw std::runtime_error("unknown trainer backend '" + opts.backend + "'");
  }

  erctk::RunArtifacts artifacts = erctk::run_finetune(opts.data, cfg, opts.out, *backend);
  std::cout << "steps=" << artifacts.steps.size()
            << " final_loss=" << artifacts.checkpoint.final_loss
            << " adapter_params=" << artifacts.checkpoint.adapter_params_count << "\n";
  std::cout << "run_log=" << artifacts.run_log_path << "\n";
  std::cout << "manifest=" << artifacts.manifest_path << "\n";
}

// ---------------------------------------------------------------------------
// predict

struct PredictOpts {
  std::string data;
  std::string out;
  std::string backend = "echo";
  std::string fixed_text;
  std::string checkpoint;
  std::string strategy = "greedy";
  int max_new_tokens = 16;
  unsigned seed = 0;
  bool lenient = false;
  std::string fallback_label = "neutral";
};

void run_predict(const PredictOpts& opts) {
  std::vector<erctk::InstructionInstance> instances = erctk::load_instances_jsonl(opts.data);
  std::unique_ptr<erctk::GenerationBackend> backend =
      make_generation_backend(opts.backend, opts.fixed_text, opts.checkpoint);
  erctk::DecodeConfig decode;
  decode.strategy = opts.strategy;
  decode.max_new_tokens = opts.max_new_tokens;
  decode.seed = opts.seed;
  erctk::ParsePolicy policy;
  policy.lenient = opts.lenient;
  policy.fallback_label = opts.fallback_label;

  std::vector<erctk::Prediction> predictions =
      erctk::classify_instances(instances, *backend, decode, policy);
  erctk::save_predictions_jsonl(predictions, opts.out);
  std::size_t unparsed = 0;
  for (const erctk::Prediction& p : predictions)
    if (p.status == erctk::ParseStatus::unparsed) ++unparsed;
  std::cout << "predictions=" << predictions.size() << " unparsed=" << unparsed << "\n";
  std::cout << "wrote " << opts.out << "\n";
}

// ---------------------------------------------------------------------------
// eval

struct EvalOpts {
  std::vector<std::string> preds;
  std::string dataset;
  std::string seeds;
  std::string gold_path;
  bool json = false;
  bool unified = false;
};

using GoldKey = std::tuple<std::string, std::string, int>;

std::map<GoldKey, std::string> load_gold_sidecar(const std::string& path) {
  std::map<GoldKey, std::string> gold;
  for (const std::string& line : erctk::jsonl::read_lines(path)) {
    nlohmann::json j = nlohmann::json::parse(line);
    const nlohmann::json& meta = j.at("meta");
    GoldKey key{meta.at("source_dataset").get<std::string>(),
                meta.at("conversation_id").get<std::string>(), meta.at("turn_index").get<int>()};
    if (!gold.emplace(key, j.at("label").get<std::string>()).second)
      throw std::runtime_error("gold file has a duplicate entry for conversation " +
                               std::get<1>(key) + ", turn " + std::to_string(std::get<2>(key)));
  }
  return gold;
}

void run_eval(const EvalOpts& opts) {
  Dataset dataset = erctk::dataset_from_name(opts.dataset);
  std::vector<std::string> space =
      opts.unified ? erctk::unified_label_space() : erctk::default_label_space(dataset);

  std::map<GoldKey, std::string> gold;
  if (!opts.gold_path.empty()) gold = load_gold_sidecar(opts.gold_path);

  auto evaluate_file = [&](const std::string& path) {
    std::vector<erctk::Prediction> predictions = erctk::load_predictions_jsonl(path);
    if (!gold.empty()) {
      for (erctk::Prediction& p : predictions) {
        GoldKey key{p.meta.source_dataset, p.meta.conversation_id, p.meta.turn_index};
        auto it = gold.find(key);
        if (it == gold.end())
          throw std::runtime_error("no gold label for conversation " + p.meta.conversation_id +
                                   ", turn " + std::to_string(p.meta.turn_index));
        p.gold = it->second;
      }
    }
    return erctk::evaluate(predictions, space, erctk::dataset_name(dataset));
  };

  if (opts.preds.size() == 1 && opts.seeds.empty()) {
    erctk::EvalReport report = evaluate_file(opts.preds.front());
    print_doc(opts.json ? erctk::report_to_json(report) : erctk::report_to_text(report));
    return;
  }

  std::vector<unsigned> seeds;
  if (!opts.seeds.empty()) {
    for (const std::string& item : split_csv(opts.seeds))
      seeds.push_back(static_cast<unsigned>(std::stoul(item)));
  } else {
    for (std::size_t i = 0; i < opts.preds.size(); ++i)
      seeds.push_back(static_cast<unsigned>(i + 1));
  }
  if (seeds.size() != opts.preds.size())
    throw std::runtime_error("got " + std::to_string(opts.preds.size()) +
                             " prediction file(s) but " + std::to_string(seeds.size()) +
                             " seed(s)");

  std::vector<erctk::SeedRun> runs;
  runs.reserve(opts.preds.size());
  for (std::size_t i = 0; i < opts.preds.size(); ++i)
    runs.push_back({seeds[i], evaluate_file(opts.preds[i])});
  erctk::AggregateReport aggregate = erctk::aggregate_seeds(runs);
  print_doc(opts.json ? erctk::aggregate_to_json(aggregate)
                      : erctk::aggregate_to_text(aggregate));
}

// ---------------------------------------------------------------------------
// ablate

struct AblateOpts {
  std::string root;
  std::string datasets;
  std::string label_maps_dir;
  std::string backend = "echo";
  std::string fixed_text;
  std::string checkpoint;
  std::string split = "test";
  std::string cache_path;
  int context_window = 1;
  bool json = false;
  bool lenient = false;
};

// Re-ingests, normalizes, and re-builds the dataset for every variant, then
// classifies with the chosen backend and scores against the corpus labels.
class LocalPipeline : public erctk::AblationPipeline {
 public:
  explicit LocalPipeline(const AblateOpts& opts) : opts_(opts) {
    if (!opts.cache_path.empty()) cache_.emplace(erctk::DescriptionCache::load(opts.cache_path));
  }

  erctk::AblationCell run(Dataset dataset, const erctk::AblationSpec& spec) override {
    erctk::AblationCell cell;
    cell.dataset = erctk::dataset_name(dataset);
    try {
      std::string base_name = to_lower(cell.dataset);
      erctk::ParseResult parsed = erctk::parse_corpus(dataset, opts_.root + "/" + base_name);
      erctk::LabelMap map =
          erctk::LabelMap::load(opts_.label_maps_dir + "/" + base_name + ".labelmap");
      erctk::normalize_corpus(parsed.corpus, map, /*strict=*/true);

      erctk::BuildConfig cfg;
      cfg.context_window = spec.context_window;
      cfg.include_video_description = spec.include_video_description;
      cfg.splits = {opts_.split};
      std::vector<const erctk::Corpus*> pointers = {&parsed.corpus};
      erctk::BuildResult built =
          erctk::build_dataset(pointers, cfg, cache_ ? &*cache_ : nullptr);
      if (built.instances.empty()) {
        cell.skip_reason = "no instances in split '" + opts_.split + "'";
        return cell;
      }
      if (spec.include_video_description) {
        bool any_description =
            std::any_of(built.instances.begin(), built.instances.end(),
                        [](const erctk::InstructionInstance& inst) {
                          return !inst.video_description.empty();
                        });
        if (!any_description) {
          cell.skip_reason = "no usable video descriptions";
          return cell;
        }
      }

      std::unique_ptr<erctk::GenerationBackend> backend =
          make_generation_backend(opts_.backend, opts_.fixed_text, opts_.checkpoint);
      erctk::DecodeConfig decode;
      erctk::ParsePolicy policy;
      policy.lenient = opts_.lenient;
      std::vector<erctk::Prediction> predictions =
          erctk::classify_instances(built.instances, *backend, decode, policy);
      cell.report = erctk::evaluate(predictions, parsed.corpus.label_space, cell.dataset);
    } catch (const std::exception& e) {
      cell.report.reset();
      cell.skip_reason = e.what();
    }
    return cell;
  }

 private:
  const AblateOpts& opts_;
  std::optional<erctk::DescriptionCache> cache_;
};

void run_ablate(const AblateOpts& opts) {
  std::vector<Dataset> datasets;
  for (const std::string& name : split_csv(opts.datasets))
    datasets.push_back(erctk::dataset_from_name(name));
  if (datasets.empty()) throw std::runtime_error("--datasets named no datasets");

  LocalPipeline pipeline(opts);
  erctk::AblationTable table = erctk::run_ablation(
      datasets, erctk::default_ablation_specs(opts.context_window), pipeline);
  print_doc(opts.json ? erctk::ablation_to_json(table) : erctk::ablation_to_text(table));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"erctk: emotion-recognition conversation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "erctk 0.1.0");

  // ingest
  auto ingest = std::make_shared<IngestOpts>();
  CLI::App* ingest_cmd =
      app.add_subcommand("ingest", "Parse a source corpus into canonical JSONL");
  ingest_cmd->add_option("--dataset", ingest->dataset,
                         "Source dataset (meld, iemocap, emorynlp, dailydialog, meisd)")
      ->required();
  ingest_cmd->add_option("--root", ingest->root, "Corpus root directory")->required();
  ingest_cmd->add_option("--out", ingest->out, "Output corpus JSONL path")->required();
  ingest_cmd->add_flag("--lax", ingest->lax, "Write the corpus even when validation finds issues");
  ingest_cmd->add_option("--carve-validation", ingest->carve,
                         "Move this fraction of train conversations to validation");
  ingest_cmd->add_option("--carve-seed", ingest->carve_seed, "Seed string for the carve ranking");
  ingest_cmd->callback([ingest] { run_ingest(*ingest); });

  // stats
  auto stats = std::make_shared<StatsOpts>();
  CLI::App* stats_cmd = app.add_subcommand("stats", "Summarize a source corpus");
  stats_cmd->add_option("--dataset", stats->dataset, "Source dataset")->required();
  stats_cmd->add_option("--root", stats->root, "Corpus root directory")->required();
  stats_cmd->add_flag("--json", stats->json, "Emit JSON instead of text");
  stats_cmd->callback([stats] { run_stats(*stats); });

  // enrich
  auto enrich = std::make_shared<EnrichOpts>();
  CLI::App* enrich_cmd = app.add_subcommand(
      "enrich", "Normalize labels (and optionally describe video clips) in a corpus");
  enrich_cmd->add_option("--in", enrich->in, "Input corpus JSONL")->required();
  enrich_cmd->add_option("--label-map", enrich->label_map, "Label map file")->required();
  enrich_cmd->add_option("--out", enrich->out, "Output corpus JSONL")->required();
  enrich_cmd->add_flag("--lax", enrich->lax,
                       "Leave unmapped labels unset instead of failing");
  CLI::Option* describe_flag =
      enrich_cmd->add_flag("--describe", enrich->describe, "Describe video clips into the cache");
  CLI::Option* video_root_opt =
      enrich_cmd->add_option("--video-root", enrich->video_root, "Directory video refs resolve in");
  CLI::Option* cache_opt =
      enrich_cmd->add_option("--cache", enrich->cache_path, "Description cache JSONL");
  CLI::Option* prompt_opt =
      enrich_cmd->add_option("--prompt", enrich->prompt_path, "Prompt template file");
  describe_flag->needs(video_root_opt)->needs(cache_opt)->needs(prompt_opt);
  enrich_cmd->add_option("--frames", enrich->frames, "Frames sampled per clip");
  enrich_cmd->add_option("--provider", enrich->provider, "Description provider (stub, http)")
      ->check(CLI::IsMember({"stub", "http"}));
  enrich_cmd->add_option("--endpoint", enrich->endpoint, "HTTP provider endpoint URL");
  enrich_cmd->add_option("--rps", enrich->requests_per_sec, "Description request rate limit");
  enrich_cmd->add_option("--max-in-flight", enrich->max_in_flight, "Concurrent describe calls");
  enrich_cmd->add_option("--max-attempts", enrich->max_attempts, "Retry attempts per clip");
  enrich_cmd->add_option("--base-delay-ms", enrich->base_delay_ms, "First retry backoff delay");
  enrich_cmd->callback([enrich] { run_enrich(*enrich); });

  // build
  auto build = std::make_shared<BuildOpts>();
  auto build_flags = std::make_shared<BuildFlags>();
  CLI::App* build_cmd =
      app.add_subcommand("build", "Build instruction instances from enriched corpora");
  build_cmd->add_option("--in", build->inputs, "Enriched corpus JSONL (repeatable)")->required();
  build_cmd->add_option("--out", build->out, "Output instruction JSONL")->required();
  build_cmd->add_option("--config", build->config_path, "Build config JSON");
  build_flags->context_window =
      build_cmd->add_option("--context-window", build->context_window, "Preceding turns to keep");
  build_flags->include_video_description = build_cmd->add_flag(
      "--include-video-description", build->include_video_description,
      "Fill video_description from the cache");
  build_flags->label_space_mode =
      build_cmd->add_option("--label-space-mode", build->label_space_mode,
                            "per_dataset or unified")
          ->check(CLI::IsMember({"per_dataset", "unified"}));
  build_flags->splits =
      build_cmd->add_option("--splits", build->splits, "Comma-separated splits to include");
  build_flags->cutoff_len =
      build_cmd->add_option("--cutoff-len", build->cutoff_len, "Whitespace-token budget");
  build_cmd->add_option("--description-cache", build->cache_path, "Description cache JSONL");
  build_cmd->add_option("--gold-out", build->gold_out, "Also write a gold-label sidecar here");
  build_cmd->callback([build, build_flags] { run_build(*build, *build_flags); });

  // train
  auto train = std::make_shared<TrainOpts>();
  auto train_flags = std::make_shared<TrainFlags>();
  CLI::App* train_cmd = app.add_subcommand("train", "Fine-tune an adapter on an instruction set");
  train_cmd->add_option("--data", train->data, "Instruction JSONL")->required();
  train_cmd->add_option("--out", train->out, "Run output directory")->required();
  train_cmd->add_option("--config", train->config_path, "Train config JSON");
  train_cmd->add_option("--backend", train->backend, "Trainer backend (stub, tiny)")
      ->check(CLI::IsMember({"stub", "tiny"}));
  train_flags->epochs = train_cmd->add_option("--epochs", train->epochs, "Override epochs");
  train_flags->batch_size =
      train_cmd->add_option("--batch-size", train->batch_size, "Override batch size");
  train_flags->micro_batch_size = train_cmd->add_option(
      "--micro-batch-size", train->micro_batch_size, "Override micro batch size");
  train_flags->learning_rate =
      train_cmd->add_option("--lr", train->learning_rate, "Override peak learning rate");
  train_flags->seed = train_cmd->add_option("--seed", train->seed, "Override the run seed");
  train_cmd->callback([train, train_flags] { run_train(*train, *train_flags); });

  // predict
  auto predict = std::make_shared<PredictOpts>();
  CLI::App* predict_cmd =
      app.add_subcommand("predict", "Classify an instruction set with a generation backend");
  predict_cmd->add_option("--data", predict->data, "Instruction JSONL")->required();
  predict_cmd->add_option("--out", predict->out, "Predictions JSONL")->required();
  predict_cmd->add_option("--backend", predict->backend, "Generation backend (echo, fixed, tiny)")
      ->check(CLI::IsMember({"echo", "fixed", "tiny"}));
  predict_cmd->add_option("--fixed-text", predict->fixed_text,
                          "Generation text for the fixed backend");
  predict_cmd->add_option("--checkpoint", predict->checkpoint,
                          "Adapter checkpoint for the tiny backend");
  predict_cmd->add_option("--strategy", predict->strategy, "Decode strategy (greedy, sample)")
      ->check(CLI::IsMember({"greedy", "sample"}));
  predict_cmd->add_option("--max-new-tokens", predict->max_new_tokens, "Decode token budget");
  predict_cmd->add_option("--decode-seed", predict->seed, "Sampling seed");
  predict_cmd->add_flag("--lenient", predict->lenient,
                        "Fall back to a default label instead of <unparsed>");
  predict_cmd->add_option("--fallback-label", predict->fallback_label,
                          "Label used with --lenient");
  predict_cmd->callback([predict] {
    if (predict->backend == "fixed" && predict->fixed_text.empty())
      throw CLI::RequiredError("--fixed-text (required with --backend fixed)");
    if (predict->backend == "tiny" && predict->checkpoint.empty())
      throw CLI::RequiredError("--checkpoint (required with --backend tiny)");
    run_predict(*predict);
  });

  // eval
  auto eval = std::make_shared<EvalOpts>();
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score prediction files");
  eval_cmd->add_option("--pred", eval->preds, "Predictions JSONL (repeat for seed runs)")
      ->required();
  eval_cmd->add_option("--dataset", eval->dataset, "Dataset the label space comes from")
      ->required();
  eval_cmd->add_option("--seeds", eval->seeds, "Comma-separated seeds, one per --pred");
  eval_cmd->add_option("--gold", eval->gold_path, "Gold sidecar overriding recorded gold labels");
  eval_cmd->add_flag("--json", eval->json, "Emit JSON instead of text");
  eval_cmd->add_flag("--unified", eval->unified, "Score in the unified seven-label space");
  eval_cmd->callback([eval] { run_eval(*eval); });

  // ablate
  auto ablate = std::make_shared<AblateOpts>();
  CLI::App* ablate_cmd =
      app.add_subcommand("ablate", "Run the knowledge-source ablation grid over a data root");
  ablate_cmd->add_option("--root", ablate->root, "Directory holding one corpus per dataset")
      ->required();
  ablate_cmd->add_option("--datasets", ablate->datasets, "Comma-separated dataset names")
      ->required();
  ablate_cmd
      ->add_option("--label-maps", ablate->label_maps_dir,
                   "Directory with <dataset>.labelmap files")
      ->required();
  ablate_cmd->add_option("--backend", ablate->backend, "Generation backend (echo, fixed, tiny)")
      ->check(CLI::IsMember({"echo", "fixed", "tiny"}));
  ablate_cmd->add_option("--fixed-text", ablate->fixed_text,
                         "Generation text for the fixed backend");
  ablate_cmd->add_option("--checkpoint", ablate->checkpoint,
                         "Adapter checkpoint for the tiny backend");
  ablate_cmd->add_option("--split", ablate->split, "Split to evaluate");
  ablate_cmd->add_option("--description-cache", ablate->cache_path, "Description cache JSONL");
  ablate_cmd->add_option("--context-window", ablate->context_window,
                         "Base context window for the full variant");
  ablate_cmd->add_flag("--json", ablate->json, "Emit JSON instead of text");
  ablate_cmd->add_flag("--lenient", ablate->lenient,
                       "Fall back to a default label instead of <unparsed>");
  ablate_cmd->callback([ablate] { run_ablate(*ablate); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
