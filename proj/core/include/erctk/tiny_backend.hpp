#pragma once

#include <string>

#include "erctk/trainer.hpp"

namespace erctk {

struct TinyBackendOptions {
  int feature_dim = 512;  // hashed bag-of-words bins
};

// A real adapter trainer at desk scale: a frozen random linear scorer
// over hashed bag-of-words features plus a trainable low-rank update
// B*A scaled by alpha/r (B zero-initialized), optimized with AdamW,
// gradient accumulation, global-norm clipping, and the caller's lr
// schedule. The checkpoint it writes is consumed by TinyGenerationBackend.
class TinyAdapterBackend : public TrainerBackend {
 public:
  explicit TinyAdapterBackend(TinyBackendOptions options = {});
  std::string name() const override { return "tiny"; }
  BackendCheckpoint train(const TrainRequest& request, const StepCallback& on_step) override;

 private:
  TinyBackendOptions options_;
};

}  // namespace erctk
