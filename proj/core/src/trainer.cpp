#include "erctk/trainer.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "erctk/hash.hpp"
#include "erctk/jsonl.hpp"
#include "nlohmann/json.hpp"

namespace erctk {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string step_to_json(const StepRecord& record) {
  ordered_json j;
  j["step"] = record.step;
  j["lr"] = record.lr;
  j["loss"] = record.loss;
  return j.dump();
}

}  // namespace

BackendCheckpoint RecordingStubBackend::train(const TrainRequest& request,
                                              const StepCallback& on_step) {
  called_ = true;
  config_ = request.config;
  plan_ = request.plan;
  schedule_ = request.schedule;
  n_instances_ = request.instances->size();

  double loss = std::log(double(std::max<std::size_t>(
      2, extract_label_space(request.instances->front().instruction).size())));
  for (int step = 1; step <= request.plan.total_steps; ++step) {
    loss *= 0.98;  // deterministic synthetic decay
    StepRecord record;
    record.step = step;
    record.lr = request.schedule[std::size_t(step - 1)];
    record.loss = loss;
    on_step(record);
  }

  BackendCheckpoint checkpoint;
  checkpoint.path = (std::filesystem::path(request.output_dir) / "adapter_stub.json").string();
  ordered_json payload;
  payload["backend"] = name();
  payload["steps"] = request.plan.total_steps;
  payload["final_loss"] = loss;
  jsonl::write_file_atomic(checkpoint.path, payload.dump(2) + "\n");
  checkpoint.adapter_params = adapter_param_count(request.config);
  checkpoint.final_loss = loss;
  return checkpoint;
}

RunArtifacts run_finetune(const std::string& dataset_jsonl, const TrainConfig& cfg,
                          const std::string& output_dir, TrainerBackend& backend) {
  validate_config(cfg);
  std::vector<InstructionInstance> instances = load_instances_jsonl(dataset_jsonl);
  if (instances.empty()) {
    throw std::runtime_error("run_finetune: dataset " + dataset_jsonl + " holds no instances");
  }
  RunPlan plan = plan_run(cfg, instances.size());
  std::vector<double> schedule = lr_schedule(cfg, plan.total_steps);

  std::filesystem::create_directories(output_dir);

  TrainRequest request;
  request.instances = &instances;
  request.config = cfg;
  request.plan = plan;
  request.schedule = schedule;
  request.output_dir = output_dir;

  std::vector<StepRecord> steps;
  steps.reserve(std::size_t(plan.total_steps));
  BackendCheckpoint checkpoint = backend.train(request, [&](const StepRecord& record) {
    const int expected = int(steps.size()) + 1;
    if (record.step != expected) {
      throw std::runtime_error("run_finetune: backend reported step " +
                               std::to_string(record.step) + ", expected " +
                               std::to_string(expected));
    }
    steps.push_back(record);
  });
  if (int(steps.size()) != plan.total_steps) {
    throw std::runtime_error("run_finetune: backend ran " + std::to_string(steps.size()) +
                             " steps, plan called for " + std::to_string(plan.total_steps));
  }

  RunArtifacts artifacts;
  artifacts.run_dir = output_dir;
  artifacts.run_log_path = (std::filesystem::path(output_dir) / "run_log.jsonl").string();
  artifacts.manifest_path =
      (std::filesystem::path(output_dir) / "checkpoint_manifest.json").string();
  artifacts.steps = steps;

  std::vector<std::string> lines;
  lines.reserve(steps.size());
  for (const StepRecord& record : steps) lines.push_back(step_to_json(record));
  jsonl::write_atomic(artifacts.run_log_path, lines);

  artifacts.checkpoint.checkpoint_path = checkpoint.path;
  artifacts.checkpoint.base_model = cfg.base_model;
  artifacts.checkpoint.adapter_params_count = checkpoint.adapter_params;
  artifacts.checkpoint.train_config_hash = config_hash(cfg);
  artifacts.checkpoint.final_loss = checkpoint.final_loss;

  ordered_json manifest;
  manifest["checkpoint_path"] = artifacts.checkpoint.checkpoint_path;
  manifest["base_model"] = artifacts.checkpoint.base_model;
  manifest["adapter_params_count"] = artifacts.checkpoint.adapter_params_count;
  manifest["train_config_hash"] = artifacts.checkpoint.train_config_hash;
  manifest["final_loss"] = artifacts.checkpoint.final_loss;
  jsonl::write_file_atomic(artifacts.manifest_path, manifest.dump(2) + "\n");

  return artifacts;
}

CheckpointRef load_manifest(const std::string& path) {
  ordered_json j = ordered_json::parse(jsonl::read_file(path));
  CheckpointRef ref;
  ref.checkpoint_path = j.at("checkpoint_path").get<std::string>();
  ref.base_model = j.at("base_model").get<std::string>();
  ref.adapter_params_count = j.at("adapter_params_count").get<std::int64_t>();
  ref.train_config_hash = j.at("train_config_hash").get<std::string>();
  ref.final_loss = j.at("final_loss").get<double>();
  return ref;
}

std::vector<StepRecord> load_run_log(const std::string& path) {
  std::vector<StepRecord> steps;
  for (const std::string& line : jsonl::read_lines(path)) {
    ordered_json j = ordered_json::parse(line);
    StepRecord record;
    record.step = j.at("step").get<int>();
    record.lr = j.at("lr").get<double>();
    record.loss = j.at("loss").get<double>();
    steps.push_back(record);
  }
  return steps;
}

}  // namespace erctk
