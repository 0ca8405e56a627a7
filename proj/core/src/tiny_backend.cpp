#include "erctk/tiny_backend.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>

#include "erctk/inference.hpp"
#include "erctk/jsonl.hpp"
#include "nlohmann/json.hpp"

namespace erctk {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kCheckpointFormat = "tiny-adapter-v1";
constexpr double kW0Scale = 0.01;  // frozen scorer stays near-uniform at init
constexpr double kAScale = 5.2;    // projection large enough to move logits
constexpr double kAdamEps = 1e-8;

// FNV-1a, fixed across platforms so feature hashing is reproducible.
std::uint64_t fnv1a(std::string_view token) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : token) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Hashed bag-of-words counts over lowercase alphanumeric runs.
std::vector<double> featurize_counts(const std::string& text, int dim) {
  std::vector<double> x(std::size_t(dim), 0.0);
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    x[fnv1a(token) % std::uint64_t(dim)] += 1.0;
    token.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      token.push_back(char(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return x;
}

// Center each bin on its training mean, weight it by its training variance
// (constant prompt boilerplate drops to zero, one-off tokens are damped,
// mid-frequency tokens carry the signal), then L2-normalize.
std::vector<double> transform_counts(const std::vector<double>& counts,
                                     const std::vector<double>& mean,
                                     const std::vector<double>& weight) {
  std::vector<double> x(counts.size(), 0.0);
  double norm = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    x[j] = (counts[j] - mean[j]) * weight[j];
    norm += x[j] * x[j];
  }
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& v : x) v /= norm;
  }
  return x;
}

using Matrix = std::vector<std::vector<double>>;

Matrix zeros(std::size_t rows, std::size_t cols) {
  return Matrix(rows, std::vector<double>(cols, 0.0));
}

Matrix random_matrix(std::size_t rows, std::size_t cols, double scale, std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Matrix m = zeros(rows, cols);
  for (auto& row : m)
    for (double& v : row) v = scale * unit(rng);
  return m;
}

// The frozen scorer is regenerated from the seed, never serialized.
Matrix frozen_w0(std::size_t n_labels, std::size_t dim, unsigned seed) {
  std::mt19937 rng(seed);
  return random_matrix(n_labels, dim, kW0Scale, rng);
}

struct TinyModel {
  std::vector<std::string> labels;
  int feature_dim = 0;
  int lora_r = 0;
  int lora_alpha = 0;
  unsigned seed = 0;
  std::vector<double> feature_mean;    // per-bin centering, from training data
  std::vector<double> feature_weight;  // per-bin variance weighting
  Matrix w0;                           // |labels| x dim, frozen
  Matrix a;                            // r x dim
  Matrix b;                            // |labels| x r

  std::vector<double> featurize(const std::string& text) const {
    return transform_counts(featurize_counts(text, feature_dim), feature_mean, feature_weight);
  }

  double scaling() const { return double(lora_alpha) / double(lora_r); }

  std::vector<double> logits(const std::vector<double>& x) const {
    std::vector<double> ax(std::size_t(lora_r), 0.0);
    for (int k = 0; k < lora_r; ++k) {
      const std::vector<double>& row = a[std::size_t(k)];
      double acc = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) acc += row[j] * x[j];
      ax[std::size_t(k)] = acc;
    }
    std::vector<double> z(labels.size(), 0.0);
    for (std::size_t c = 0; c < labels.size(); ++c) {
      double acc = 0.0;
      const std::vector<double>& w_row = w0[c];
      for (std::size_t j = 0; j < x.size(); ++j) acc += w_row[j] * x[j];
      const std::vector<double>& b_row = b[c];
      double low_rank = 0.0;
      for (int k = 0; k < lora_r; ++k) low_rank += b_row[std::size_t(k)] * ax[std::size_t(k)];
      z[c] = acc + scaling() * low_rank;
    }
    return z;
  }
};

std::vector<double> softmax(const std::vector<double>& z) {
  std::vector<double> p(z.size());
  double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - zmax);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

struct AdamState {
  Matrix m, v;
};

void adamw_update(Matrix& theta, const Matrix& grad, AdamState& state, double lr, double beta1,
                  double beta2, double weight_decay, int t) {
  const double bc1 = 1.0 - std::pow(beta1, t);
  const double bc2 = 1.0 - std::pow(beta2, t);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    for (std::size_t j = 0; j < theta[i].size(); ++j) {
      double& m = state.m[i][j];
      double& v = state.v[i][j];
      const double g = grad[i][j];
      m = beta1 * m + (1.0 - beta1) * g;
      v = beta2 * v + (1.0 - beta2) * g * g;
      const double mhat = m / bc1;
      const double vhat = v / bc2;
      theta[i][j] -= lr * (mhat / (std::sqrt(vhat) + kAdamEps) + weight_decay * theta[i][j]);
    }
  }
}

ordered_json model_to_json(const TinyModel& model, double final_loss) {
  ordered_json j;
  j["format"] = kCheckpointFormat;
  j["feature_dim"] = model.feature_dim;
  j["lora_r"] = model.lora_r;
  j["lora_alpha"] = model.lora_alpha;
  j["seed"] = model.seed;
  j["labels"] = model.labels;
  j["feature_mean"] = model.feature_mean;
  j["feature_weight"] = model.feature_weight;
  j["a"] = model.a;
  j["b"] = model.b;
  j["final_loss"] = final_loss;
  return j;
}

TinyModel model_from_json(const ordered_json& j, const std::string& origin) {
  if (!j.is_object() || j.value("format", "") != kCheckpointFormat) {
    throw std::runtime_error("tiny checkpoint " + origin + ": not a " +
                             std::string(kCheckpointFormat) + " file");
  }
  TinyModel model;
  model.feature_dim = j.at("feature_dim").get<int>();
  model.lora_r = j.at("lora_r").get<int>();
  model.lora_alpha = j.at("lora_alpha").get<int>();
  model.seed = j.at("seed").get<unsigned>();
  model.labels = j.at("labels").get<std::vector<std::string>>();
  model.feature_mean = j.at("feature_mean").get<std::vector<double>>();
  model.feature_weight = j.at("feature_weight").get<std::vector<double>>();
  model.a = j.at("a").get<Matrix>();
  model.b = j.at("b").get<Matrix>();
  if (model.labels.empty() || model.a.size() != std::size_t(model.lora_r) ||
      model.b.size() != model.labels.size() ||
      model.feature_mean.size() != std::size_t(model.feature_dim) ||
      model.feature_weight.size() != std::size_t(model.feature_dim)) {
    throw std::runtime_error("tiny checkpoint " + origin + ": inconsistent shapes");
  }
  model.w0 = frozen_w0(model.labels.size(), std::size_t(model.feature_dim), model.seed);
  return model;
}

}  // namespace

TinyAdapterBackend::TinyAdapterBackend(TinyBackendOptions options) : options_(options) {}

BackendCheckpoint TinyAdapterBackend::train(const TrainRequest& request,
                                            const StepCallback& on_step) {
  const std::vector<InstructionInstance>& instances = *request.instances;
  const TrainConfig& cfg = request.config;
  const int dim = options_.feature_dim;
  if (dim < 1) throw std::runtime_error("tiny backend: feature_dim must be >= 1");

  // Label union in first-appearance order, so the head layout is stable.
  std::vector<std::string> labels;
  for (const InstructionInstance& inst : instances) {
    if (std::find(labels.begin(), labels.end(), inst.output) == labels.end()) {
      labels.push_back(inst.output);
    }
  }
  std::vector<std::size_t> gold(instances.size());
  std::vector<std::vector<double>> counts(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    gold[i] = std::size_t(std::find(labels.begin(), labels.end(), instances[i].output) -
                          labels.begin());
    counts[i] = featurize_counts(render_prompt(instances[i]), dim);
  }

  TinyModel model;
  model.labels = labels;
  model.feature_dim = dim;
  model.lora_r = cfg.lora_r;
  model.lora_alpha = cfg.lora_alpha;
  model.seed = cfg.seed;
  model.w0 = frozen_w0(labels.size(), std::size_t(dim), cfg.seed);

  // Per-bin mean and variance over the training set drive the feature
  // transform; without them the constant prompt scaffolding dominates the
  // low-rank projections and nothing separable is left to learn.
  model.feature_mean.assign(std::size_t(dim), 0.0);
  model.feature_weight.assign(std::size_t(dim), 0.0);
  const double n_total = double(counts.size());
  for (const std::vector<double>& c : counts)
    for (std::size_t j = 0; j < c.size(); ++j) model.feature_mean[j] += c[j];
  for (double& m : model.feature_mean) m /= n_total;
  for (const std::vector<double>& c : counts) {
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double centered = c[j] - model.feature_mean[j];
      model.feature_weight[j] += centered * centered;
    }
  }
  for (double& w : model.feature_weight) w /= n_total;

  std::vector<std::vector<double>> features(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i)
    features[i] = transform_counts(counts[i], model.feature_mean, model.feature_weight);

  std::mt19937 rng(cfg.seed + 1);  // training stream, separate from the frozen scorer
  model.a = random_matrix(std::size_t(cfg.lora_r), std::size_t(dim), kAScale, rng);
  model.b = zeros(labels.size(), std::size_t(cfg.lora_r));

  AdamState state_a{zeros(model.a.size(), std::size_t(dim)),
                    zeros(model.a.size(), std::size_t(dim))};
  AdamState state_b{zeros(labels.size(), std::size_t(cfg.lora_r)),
                    zeros(labels.size(), std::size_t(cfg.lora_r))};

  std::vector<std::size_t> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double keep = 1.0 - cfg.lora_dropout;

  double last_loss = 0.0;
  int global_step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int step = 0; step < request.plan.steps_per_epoch; ++step) {
      const std::size_t begin = std::size_t(step) * std::size_t(cfg.batch_size);
      const std::size_t end =
          std::min(order.size(), begin + std::size_t(cfg.batch_size));
      if (begin >= end) break;  // defensive; the plan never overshoots

      Matrix grad_a = zeros(model.a.size(), std::size_t(dim));
      Matrix grad_b = zeros(labels.size(), std::size_t(cfg.lora_r));
      double step_loss = 0.0;

      for (std::size_t i = begin; i < end; ++i) {
        const std::vector<double>& x = features[order[i]];
        // LoRA-style dropout on the low-rank path input only.
        std::vector<double> x_dropped = x;
        if (cfg.lora_dropout > 0.0) {
          for (double& v : x_dropped) {
            if (v != 0.0) v = unit(rng) < cfg.lora_dropout ? 0.0 : v / keep;
          }
        }
        std::vector<double> ax(std::size_t(cfg.lora_r), 0.0);
        for (int k = 0; k < cfg.lora_r; ++k) {
          double acc = 0.0;
          const std::vector<double>& a_row = model.a[std::size_t(k)];
          for (std::size_t j = 0; j < x_dropped.size(); ++j) acc += a_row[j] * x_dropped[j];
          ax[std::size_t(k)] = acc;
        }
        std::vector<double> z(labels.size(), 0.0);
        for (std::size_t c = 0; c < labels.size(); ++c) {
          double acc = 0.0;
          for (std::size_t j = 0; j < x.size(); ++j) acc += model.w0[c][j] * x[j];
          double low_rank = 0.0;
          for (int k = 0; k < cfg.lora_r; ++k)
            low_rank += model.b[c][std::size_t(k)] * ax[std::size_t(k)];
          z[c] = acc + model.scaling() * low_rank;
        }
        std::vector<double> p = softmax(z);
        step_loss += -std::log(std::max(p[gold[order[i]]], 1e-12));

        // delta = p - onehot(gold); accumulate grads for B then A.
        for (std::size_t c = 0; c < labels.size(); ++c) {
          const double delta = p[c] - (c == gold[order[i]] ? 1.0 : 0.0);
          for (int k = 0; k < cfg.lora_r; ++k) {
            grad_b[c][std::size_t(k)] += model.scaling() * delta * ax[std::size_t(k)];
          }
        }
        for (int k = 0; k < cfg.lora_r; ++k) {
          double bd = 0.0;
          for (std::size_t c = 0; c < labels.size(); ++c) {
            bd += model.b[c][std::size_t(k)] * (p[c] - (c == gold[order[i]] ? 1.0 : 0.0));
          }
          if (bd == 0.0) continue;
          const double coef = model.scaling() * bd;
          std::vector<double>& ga_row = grad_a[std::size_t(k)];
          for (std::size_t j = 0; j < x_dropped.size(); ++j) {
            if (x_dropped[j] != 0.0) ga_row[j] += coef * x_dropped[j];
          }
        }
      }

      const double n_examples = double(end - begin);
      step_loss /= n_examples;
      double norm_sq = 0.0;
      for (auto& row : grad_a)
        for (double& g : row) {
          g /= n_examples;
          norm_sq += g * g;
        }
      for (auto& row : grad_b)
        for (double& g : row) {
          g /= n_examples;
          norm_sq += g * g;
        }
      const double norm = std::sqrt(norm_sq);
      if (norm > cfg.grad_clip_norm && norm > 0.0) {
        const double scale = cfg.grad_clip_norm / norm;
        for (auto& row : grad_a)
          for (double& g : row) g *= scale;
        for (auto& row : grad_b)
          for (double& g : row) g *= scale;
      }

      ++global_step;
      const double lr = request.schedule[std::size_t(global_step - 1)];
      adamw_update(model.a, grad_a, state_a, lr, cfg.adam_beta1, cfg.adam_beta2, cfg.weight_decay,
                   global_step);
      adamw_update(model.b, grad_b, state_b, lr, cfg.adam_beta1, cfg.adam_beta2, cfg.weight_decay,
                   global_step);

      last_loss = step_loss;
      StepRecord record;
      record.step = global_step;
      record.lr = lr;
      record.loss = step_loss;
      on_step(record);
    }
  }

  BackendCheckpoint checkpoint;
  checkpoint.path = (std::filesystem::path(request.output_dir) / "adapter_tiny.json").string();
  jsonl::write_file_atomic(checkpoint.path, model_to_json(model, last_loss).dump() + "\n");
  checkpoint.adapter_params = std::int64_t(cfg.lora_r) * dim +
                              std::int64_t(labels.size()) * cfg.lora_r;
  checkpoint.final_loss = last_loss;
  return checkpoint;
}

// ---------------------------------------------------------------------------
// Generation side (declared in inference.hpp, lives here so the feature
// hashing stays private to this file).

struct TinyGenerationBackend::Impl {
  TinyModel model;
};

TinyGenerationBackend::TinyGenerationBackend(const std::string& checkpoint_path) {
  ordered_json j = ordered_json::parse(jsonl::read_file(checkpoint_path));
  impl_ = new Impl{model_from_json(j, checkpoint_path)};
}

TinyGenerationBackend::~TinyGenerationBackend() { delete impl_; }

TinyGenerationBackend::TinyGenerationBackend(TinyGenerationBackend&& other) noexcept
    : impl_(other.impl_) {
  other.impl_ = nullptr;
}

TinyGenerationBackend& TinyGenerationBackend::operator=(TinyGenerationBackend&& other) noexcept {
  if (this != &other) {
    delete impl_;
    impl_ = other.impl_;
    other.impl_ = nullptr;
  }
  return *this;
}

std::string TinyGenerationBackend::generate(const InstructionInstance& instance,
                                            const DecodeConfig& decode) {
  const TinyModel& model = impl_->model;
  std::vector<double> x = model.featurize(render_prompt(instance));
  std::vector<double> z = model.logits(x);

  // Restrict to the instance's own label space when it intersects the head.
  std::vector<std::size_t> candidates;
  try {
    std::vector<std::string> space = extract_label_space(instance.instruction);
    for (std::size_t c = 0; c < model.labels.size(); ++c) {
      if (std::find(space.begin(), space.end(), model.labels[c]) != space.end()) {
        candidates.push_back(c);
      }
    }
  } catch (const std::exception&) {
    // No parsable label list: score every label the head knows.
  }
  if (candidates.empty()) {
    for (std::size_t c = 0; c < model.labels.size(); ++c) candidates.push_back(c);
  }

  if (decode.strategy == "greedy") {
    std::size_t best = candidates.front();
    for (std::size_t c : candidates) {
      if (z[c] > z[best]) best = c;
    }
    return model.labels[best];
  }
  if (decode.strategy == "sample") {
    std::vector<double> zc;
    zc.reserve(candidates.size());
    for (std::size_t c : candidates) zc.push_back(z[c]);
    std::vector<double> p = softmax(zc);
    std::mt19937 rng(decode.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u = unit(rng);
    double cumulative = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      cumulative += p[i];
      if (u <= cumulative) return model.labels[candidates[i]];
    }
    return model.labels[candidates.back()];
  }
  throw std::runtime_error("tiny generation: unknown decode strategy '" + decode.strategy + "'");
}

}  // namespace erctk
