#include "erctk/train_config.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "erctk/hash.hpp"
#include "erctk/jsonl.hpp"
#include "nlohmann/json.hpp"

namespace erctk {

namespace {

using ordered_json = nlohmann::ordered_json;

void fail(const std::string& what) { throw std::runtime_error("train config: " + what); }

}  // namespace

TrainConfig default_train_config() { return TrainConfig{}; }

void validate_config(const TrainConfig& cfg) {
  if (cfg.base_model.empty()) fail("base_model must not be empty");
  if (cfg.batch_size < 1) fail("batch_size must be >= 1");
  if (cfg.micro_batch_size < 1) fail("micro_batch_size must be >= 1");
  if (cfg.micro_batch_size > cfg.batch_size) fail("micro_batch_size exceeds batch_size");
  if (cfg.batch_size % cfg.micro_batch_size != 0)
    fail("batch_size must be a multiple of micro_batch_size");
  if (cfg.epochs < 1) fail("epochs must be >= 1");
  if (!(cfg.learning_rate > 0.0)) fail("learning_rate must be positive");
  if (cfg.lora_r < 1) fail("lora_r must be >= 1");
  if (cfg.lora_alpha < 1) fail("lora_alpha must be >= 1");
  if (!(cfg.lora_dropout >= 0.0 && cfg.lora_dropout < 1.0))
    fail("lora_dropout must be in [0, 1)");
  if (cfg.cutoff_len < 1) fail("cutoff_len must be >= 1");
  if (cfg.cutoff_len > cfg.max_context_tokens) fail("cutoff_len exceeds max_context_tokens");
  if (!(cfg.weight_decay >= 0.0)) fail("weight_decay must be >= 0");
  if (!(cfg.grad_clip_norm > 0.0)) fail("grad_clip_norm must be positive");
  if (!(cfg.adam_beta1 > 0.0 && cfg.adam_beta1 < 1.0)) fail("adam_beta1 must be in (0, 1)");
  if (!(cfg.adam_beta2 > 0.0 && cfg.adam_beta2 < 1.0)) fail("adam_beta2 must be in (0, 1)");
  if (!(cfg.min_lr_fraction > 0.0 && cfg.min_lr_fraction <= 1.0))
    fail("min_lr_fraction must be in (0, 1]");
  if (cfg.warmup_steps < 0) fail("warmup_steps must be >= 0");
  if (cfg.adapter_targets.empty()) fail("adapter_targets must not be empty");
  if (cfg.hidden_size < 1) fail("hidden_size must be >= 1");
  if (cfg.num_layers < 1) fail("num_layers must be >= 1");
}

int grad_accumulation_steps(const TrainConfig& cfg) {
  if (cfg.micro_batch_size < 1 || cfg.batch_size % cfg.micro_batch_size != 0) {
    fail("grad accumulation undefined: batch_size is not a multiple of micro_batch_size");
  }
  return cfg.batch_size / cfg.micro_batch_size;
}

std::int64_t adapter_param_count(const TrainConfig& cfg) {
  const std::int64_t per_target =
      std::int64_t(cfg.hidden_size) * cfg.lora_r + std::int64_t(cfg.lora_r) * cfg.hidden_size;
  return std::int64_t(cfg.num_layers) * std::int64_t(cfg.adapter_targets.size()) * per_target;
}

RunPlan plan_run(const TrainConfig& cfg, std::size_t n_train_examples) {
  validate_config(cfg);
  if (n_train_examples == 0) fail("cannot plan a run over zero training examples");
  RunPlan plan;
  plan.examples = std::int64_t(n_train_examples);
  plan.steps_per_epoch =
      int((n_train_examples + std::size_t(cfg.batch_size) - 1) / std::size_t(cfg.batch_size));
  plan.total_steps = plan.steps_per_epoch * cfg.epochs;
  plan.grad_accum = grad_accumulation_steps(cfg);
  return plan;
}

double lr_at_step(const TrainConfig& cfg, int step, int total_steps) {
  if (total_steps < 1) fail("total_steps must be >= 1");
  if (step < 0 || step > total_steps) {
    fail("step " + std::to_string(step) + " outside [0, " + std::to_string(total_steps) + "]");
  }
  if (cfg.warmup_steps > 0 && step < cfg.warmup_steps) {
    return cfg.learning_rate * double(step + 1) / double(cfg.warmup_steps);
  }
  const double floor = cfg.learning_rate * cfg.min_lr_fraction;
  const int decay_steps = total_steps - cfg.warmup_steps;
  if (decay_steps <= 0) return cfg.learning_rate;
  const int s = step - cfg.warmup_steps;
  if (s == 0) return cfg.learning_rate;  // exact peak at the start of the decay
  if (s == decay_steps) return floor;    // exact floor at the end
  return floor + (cfg.learning_rate - floor) * 0.5 *
                     (1.0 + std::cos(std::numbers::pi * double(s) / double(decay_steps)));
}

std::vector<double> lr_schedule(const TrainConfig& cfg, int total_steps) {
  if (total_steps < 1) fail("total_steps must be >= 1");
  std::vector<double> schedule(static_cast<std::size_t>(total_steps));
  for (int i = 0; i < total_steps; ++i) schedule[std::size_t(i)] = lr_at_step(cfg, i, total_steps);
  return schedule;
}

std::string train_config_to_json(const TrainConfig& cfg) {
  ordered_json j;
  j["base_model"] = cfg.base_model;
  j["batch_size"] = cfg.batch_size;
  j["micro_batch_size"] = cfg.micro_batch_size;
  j["epochs"] = cfg.epochs;
  j["learning_rate"] = cfg.learning_rate;
  j["lora_r"] = cfg.lora_r;
  j["lora_alpha"] = cfg.lora_alpha;
  j["lora_dropout"] = cfg.lora_dropout;
  j["cutoff_len"] = cfg.cutoff_len;
  j["max_context_tokens"] = cfg.max_context_tokens;
  j["weight_decay"] = cfg.weight_decay;
  j["grad_clip_norm"] = cfg.grad_clip_norm;
  j["adam_beta1"] = cfg.adam_beta1;
  j["adam_beta2"] = cfg.adam_beta2;
  j["min_lr_fraction"] = cfg.min_lr_fraction;
  j["warmup_steps"] = cfg.warmup_steps;
  j["adapter_targets"] = cfg.adapter_targets;
  j["hidden_size"] = cfg.hidden_size;
  j["num_layers"] = cfg.num_layers;
  j["seed"] = cfg.seed;
  return j.dump();
}

TrainConfig load_train_config(const std::string& path) {
  ordered_json j = ordered_json::parse(jsonl::read_file(path));
  if (!j.is_object()) throw std::runtime_error("train config " + path + ": expected a JSON object");
  static const std::set<std::string> kKnown = {
      "base_model",     "batch_size",     "micro_batch_size", "epochs",
      "learning_rate",  "lora_r",         "lora_alpha",       "lora_dropout",
      "cutoff_len",     "max_context_tokens", "weight_decay", "grad_clip_norm",
      "adam_beta1",     "adam_beta2",     "min_lr_fraction",  "warmup_steps",
      "adapter_targets", "hidden_size",   "num_layers",       "seed"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!kKnown.count(key)) {
      throw std::runtime_error("train config " + path + ": unknown key '" + key + "'");
    }
  }
  TrainConfig cfg;
  if (j.contains("base_model")) cfg.base_model = j["base_model"].get<std::string>();
  if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<int>();
  if (j.contains("micro_batch_size")) cfg.micro_batch_size = j["micro_batch_size"].get<int>();
  if (j.contains("epochs")) cfg.epochs = j["epochs"].get<int>();
  if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
  if (j.contains("lora_r")) cfg.lora_r = j["lora_r"].get<int>();
  if (j.contains("lora_alpha")) cfg.lora_alpha = j["lora_alpha"].get<int>();
  if (j.contains("lora_dropout")) cfg.lora_dropout = j["lora_dropout"].get<double>();
  if (j.contains("cutoff_len")) cfg.cutoff_len = j["cutoff_len"].get<int>();
  if (j.contains("max_context_tokens"))
    cfg.max_context_tokens = j["max_context_tokens"].get<int>();
  if (j.contains("weight_decay")) cfg.weight_decay = j["weight_decay"].get<double>();
  if (j.contains("grad_clip_norm")) cfg.grad_clip_norm = j["grad_clip_norm"].get<double>();
  if (j.contains("adam_beta1")) cfg.adam_beta1 = j["adam_beta1"].get<double>();
  if (j.contains("adam_beta2")) cfg.adam_beta2 = j["adam_beta2"].get<double>();
  if (j.contains("min_lr_fraction")) cfg.min_lr_fraction = j["min_lr_fraction"].get<double>();
  if (j.contains("warmup_steps")) cfg.warmup_steps = j["warmup_steps"].get<int>();
  if (j.contains("adapter_targets"))
    cfg.adapter_targets = j["adapter_targets"].get<std::vector<std::string>>();
  if (j.contains("hidden_size")) cfg.hidden_size = j["hidden_size"].get<int>();
  if (j.contains("num_layers")) cfg.num_layers = j["num_layers"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<unsigned>();
  validate_config(cfg);
  return cfg;
}

void save_train_config(const TrainConfig& cfg, const std::string& path) {
  jsonl::write_file_atomic(path, ordered_json::parse(train_config_to_json(cfg)).dump(2) + "\n");
}

std::string config_hash(const TrainConfig& cfg) {
  return hash::sha256_hex(train_config_to_json(cfg));
}

}  // namespace erctk
