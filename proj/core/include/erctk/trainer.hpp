#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "erctk/instruction.hpp"
#include "erctk/train_config.hpp"

namespace erctk {

struct StepRecord {
  int step = 0;  // 1-based, dense
  double lr = 0.0;
  double loss = 0.0;
};

using StepCallback = std::function<void(const StepRecord&)>;

struct TrainRequest {
  const std::vector<InstructionInstance>* instances = nullptr;
  TrainConfig config;
  RunPlan plan;
  std::vector<double> schedule;  // schedule[i] = lr for step i+1
  std::string output_dir;
};

struct BackendCheckpoint {
  std::string path;
  std::int64_t adapter_params = 0;
  double final_loss = 0.0;
};

class TrainerBackend {
 public:
  virtual ~TrainerBackend() = default;
  virtual std::string name() const = 0;
  // Must invoke the callback exactly plan.total_steps times with dense
  // 1-based steps, using schedule[i] as the recorded lr.
  virtual BackendCheckpoint train(const TrainRequest& request, const StepCallback& on_step) = 0;
};

// Captures the request for assertions and emits a deterministic synthetic
// loss curve. Writes a small placeholder checkpoint file.
class RecordingStubBackend : public TrainerBackend {
 public:
  std::string name() const override { return "stub"; }
  BackendCheckpoint train(const TrainRequest& request, const StepCallback& on_step) override;

  bool called() const { return called_; }
  const TrainConfig& seen_config() const { return config_; }
  const RunPlan& seen_plan() const { return plan_; }
  const std::vector<double>& seen_schedule() const { return schedule_; }
  std::size_t seen_instances() const { return n_instances_; }

 private:
  bool called_ = false;
  TrainConfig config_;
  RunPlan plan_;
  std::vector<double> schedule_;
  std::size_t n_instances_ = 0;
};

struct CheckpointRef {
  std::string checkpoint_path;
  std::string base_model;
  std::int64_t adapter_params_count = 0;
  std::string train_config_hash;
  double final_loss = 0.0;
};

struct RunArtifacts {
  std::string run_dir;
  std::string run_log_path;   // run_log.jsonl
  std::string manifest_path;  // checkpoint_manifest.json
  CheckpointRef checkpoint;
  std::vector<StepRecord> steps;
};

// Load + schema-check the dataset, validate the config, plan the run,
// build the schedule, drive the backend, and write the run artifacts.
RunArtifacts run_finetune(const std::string& dataset_jsonl, const TrainConfig& cfg,
                          const std::string& output_dir, TrainerBackend& backend);

CheckpointRef load_manifest(const std::string& path);
std::vector<StepRecord> load_run_log(const std::string& path);

}  // namespace erctk
