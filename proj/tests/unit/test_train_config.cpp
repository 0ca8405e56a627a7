#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "erctk/train_config.hpp"
#include "helpers.hpp"

using erctk::RunPlan;
using erctk::TrainConfig;

TEST_CASE("train config: defaults match the published recipe") {
  TrainConfig cfg = erctk::default_train_config();
  CHECK(cfg.base_model == "llama-2-7b");
  CHECK(cfg.batch_size == 128);
  CHECK(cfg.micro_batch_size == 8);
  CHECK(cfg.epochs == 5);
  CHECK(cfg.learning_rate == 3e-4);
  CHECK(cfg.lora_r == 4);
  CHECK(cfg.lora_alpha == 16);
  CHECK(cfg.lora_dropout == 0.05);
  CHECK(cfg.cutoff_len == 256);
  CHECK(cfg.max_context_tokens == 4096);
  CHECK(cfg.weight_decay == 0.1);
  CHECK(cfg.grad_clip_norm == 1.0);
  CHECK(cfg.adam_beta1 == 0.9);
  CHECK(cfg.adam_beta2 == 0.95);
  CHECK(cfg.min_lr_fraction == 0.1);
  CHECK(cfg.warmup_steps == 0);
  CHECK(cfg.adapter_targets == std::vector<std::string>{"q_proj", "v_proj"});
  CHECK(erctk::grad_accumulation_steps(cfg) == 16);
  // 32 layers * 2 targets * (4096*4 + 4*4096) = 2,097,152 trainable weights.
  CHECK(erctk::adapter_param_count(cfg) == 2097152);
  CHECK_NOTHROW(erctk::validate_config(cfg));
}

TEST_CASE("train config: validation rejects inconsistent values") {
  TrainConfig cfg = erctk::default_train_config();
  SUBCASE("micro batch exceeding batch") {
    cfg.micro_batch_size = 256;
    CHECK_THROWS(erctk::validate_config(cfg));
  }
  SUBCASE("batch not divisible by micro batch") {
    cfg.micro_batch_size = 7;
    CHECK_THROWS(erctk::validate_config(cfg));
  }
  SUBCASE("non-positive epochs") {
    cfg.epochs = 0;
    CHECK_THROWS(erctk::validate_config(cfg));
  }
  SUBCASE("non-positive learning rate") {
    cfg.learning_rate = 0.0;
    CHECK_THROWS(erctk::validate_config(cfg));
  }
  SUBCASE("dropout out of range") {
    cfg.lora_dropout = 1.0;
    CHECK_THROWS(erctk::validate_config(cfg));
  }
  SUBCASE("lr floor fraction out of range") {
    cfg.min_lr_fraction = 1.5;
    CHECK_THROWS(erctk::validate_config(cfg));
  }
  SUBCASE("negative warmup") {
    cfg.warmup_steps = -1;
    CHECK_THROWS(erctk::validate_config(cfg));
  }
  SUBCASE("lora_r non-positive") {
    cfg.lora_r = 0;
    CHECK_THROWS(erctk::validate_config(cfg));
  }
}

TEST_CASE("train config: run planning") {
  TrainConfig cfg = erctk::default_train_config();
  SUBCASE("exact multiple") {
    RunPlan plan = erctk::plan_run(cfg, 1280);
    CHECK(plan.examples == 1280);
    CHECK(plan.steps_per_epoch == 10);
    CHECK(plan.total_steps == 50);
    CHECK(plan.grad_accum == 16);
  }
  SUBCASE("remainder rounds the epoch up") {
    RunPlan plan = erctk::plan_run(cfg, 1281);
    CHECK(plan.steps_per_epoch == 11);
    CHECK(plan.total_steps == 55);
  }
  SUBCASE("tiny dataset still takes one step per epoch") {
    RunPlan plan = erctk::plan_run(cfg, 1);
    CHECK(plan.steps_per_epoch == 1);
    CHECK(plan.total_steps == 5);
  }
  SUBCASE("empty dataset is rejected") { CHECK_THROWS(erctk::plan_run(cfg, 0)); }
}

TEST_CASE("train config: cosine schedule anchors") {
  TrainConfig cfg = erctk::default_train_config();
  const int T = 1000;
  // Peak at step 0, 10% floor at step T, exact midpoint halfway.
  CHECK(std::abs(erctk::lr_at_step(cfg, 0, T) - 3e-4) < 1e-12);
  CHECK(std::abs(erctk::lr_at_step(cfg, T, T) - 3e-5) < 1e-12);
  CHECK(std::abs(erctk::lr_at_step(cfg, T / 2, T) - 1.65e-4) < 1e-12);

  // Monotone non-increasing with no warmup.
  double prev = erctk::lr_at_step(cfg, 0, T);
  for (int s = 1; s <= T; ++s) {
    double cur = erctk::lr_at_step(cfg, s, T);
    CHECK(cur <= prev + 1e-15);
    prev = cur;
  }
}

TEST_CASE("train config: closed-form agreement across step counts") {
  TrainConfig cfg = erctk::default_train_config();
  cfg.learning_rate = 2e-3;
  cfg.min_lr_fraction = 0.25;
  for (int T : {1, 2, 7, 64}) {
    for (int s = 0; s <= T; ++s) {
      double floor = cfg.learning_rate * cfg.min_lr_fraction;
      double expect =
          floor + (cfg.learning_rate - floor) * 0.5 *
                      (1.0 + std::cos(std::numbers::pi * double(s) / double(T)));
      CHECK(std::abs(erctk::lr_at_step(cfg, s, T) - expect) < 1e-15);
    }
  }
}

TEST_CASE("train config: warmup ramps linearly then decays") {
  TrainConfig cfg = erctk::default_train_config();
  cfg.warmup_steps = 10;
  const int T = 100;
  // Ramp: step s < warmup has lr = peak * (s+1)/warmup.
  CHECK(std::abs(erctk::lr_at_step(cfg, 0, T) - 3e-4 * 0.1) < 1e-15);
  CHECK(std::abs(erctk::lr_at_step(cfg, 9, T) - 3e-4) < 1e-15);
  // After warmup the cosine still lands on the floor.
  CHECK(std::abs(erctk::lr_at_step(cfg, T, T) - 3e-5) < 1e-12);
}

TEST_CASE("train config: schedule vector matches the pointwise function") {
  TrainConfig cfg = erctk::default_train_config();
  const int T = 37;
  std::vector<double> sched = erctk::lr_schedule(cfg, T);
  REQUIRE(sched.size() == std::size_t(T));
  for (int i = 0; i < T; ++i) CHECK(sched[i] == erctk::lr_at_step(cfg, i, T));
  CHECK(sched.front() == 3e-4);
}

TEST_CASE("train config: json round trip and strict keys") {
  testutil::TempDir dir;
  TrainConfig cfg = erctk::default_train_config();
  cfg.batch_size = 32;
  cfg.micro_batch_size = 4;
  cfg.seed = 7;
  std::string path = dir.file("cfg.json");
  erctk::save_train_config(cfg, path);

  TrainConfig back = erctk::load_train_config(path);
  CHECK(back == cfg);

  SUBCASE("unknown key is an error") {
    std::string body = testutil::slurp(path);
    body.insert(body.rfind('}'), ",\"tpyo_key\":1");
    testutil::spit(path, body);
    CHECK_THROWS(erctk::load_train_config(path));
  }
  SUBCASE("partial file keeps defaults for missing keys") {
    testutil::spit(path, "{\"batch_size\":64,\"micro_batch_size\":8}");
    TrainConfig partial = erctk::load_train_config(path);
    CHECK(partial.batch_size == 64);
    CHECK(partial.micro_batch_size == 8);
    CHECK(partial.epochs == 5);
    CHECK(partial.learning_rate == 3e-4);
  }
}

TEST_CASE("train config: hash is stable and key-order independent") {
  TrainConfig a = erctk::default_train_config();
  TrainConfig b = erctk::default_train_config();
  CHECK(erctk::config_hash(a) == erctk::config_hash(b));
  b.seed = 43;
  CHECK(erctk::config_hash(a) != erctk::config_hash(b));
  CHECK(erctk::config_hash(a).size() == 64);
}
