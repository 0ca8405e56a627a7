#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace erctk {

struct TrainConfig {
  std::string base_model = "llama-2-7b";
  int batch_size = 128;
  int micro_batch_size = 8;
  int epochs = 5;
  double learning_rate = 3e-4;
  int lora_r = 4;
  int lora_alpha = 16;
  double lora_dropout = 0.05;
  int cutoff_len = 256;
  int max_context_tokens = 4096;
  double weight_decay = 0.1;
  double grad_clip_norm = 1.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.95;
  double min_lr_fraction = 0.1;  // cosine floor as a fraction of peak
  int warmup_steps = 0;
  std::vector<std::string> adapter_targets = {"q_proj", "v_proj"};
  int hidden_size = 4096;
  int num_layers = 32;
  unsigned seed = 42;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

TrainConfig default_train_config();

// Throws on inconsistent values (micro > batch, batch % micro != 0,
// non-positive epochs/lr, dropout outside [0,1), fraction outside (0,1], ...).
void validate_config(const TrainConfig& cfg);

int grad_accumulation_steps(const TrainConfig& cfg);

// layers * |targets| * (hidden*r + r*hidden) trainable adapter weights.
std::int64_t adapter_param_count(const TrainConfig& cfg);

struct RunPlan {
  std::int64_t examples = 0;
  int steps_per_epoch = 0;
  int total_steps = 0;
  int grad_accum = 0;
  friend bool operator==(const RunPlan&, const RunPlan&) = default;
};

RunPlan plan_run(const TrainConfig& cfg, std::size_t n_train_examples);

// Cosine decay with a floor: for step s in [0, total_steps],
//   lr(s) = floor + (peak - floor) * (1 + cos(pi * s / total_steps)) / 2
// with floor = min_lr_fraction * peak. With warmup_steps > 0 the first
// warmup steps ramp linearly to peak and the cosine runs on the remainder.
double lr_at_step(const TrainConfig& cfg, int step, int total_steps);

// schedule[i] is the learning rate applied during optimizer step i+1,
// i.e. lr_at_step(cfg, i, total_steps).
std::vector<double> lr_schedule(const TrainConfig& cfg, int total_steps);

TrainConfig load_train_config(const std::string& path);  // strict-keys JSON
void save_train_config(const TrainConfig& cfg, const std::string& path);
std::string train_config_to_json(const TrainConfig& cfg);

// sha256 of the canonical JSON rendering.
std::string config_hash(const TrainConfig& cfg);

}  // namespace erctk
