#include "erctk/describe.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "erctk/jsonl.hpp"
#include "erctk/text.hpp"
#include "nlohmann/json.hpp"

#include "httplib.h"

namespace erctk {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string key_string(const DescriptionKey& key) {
  return key.dataset + "/" + key.conversation_id + "/" + std::to_string(key.turn_index);
}

std::string base64(const std::vector<unsigned char>& bytes) {
  if (bytes.empty()) return {};
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  int written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                int(bytes.size()));
  out.resize(std::size_t(written));
  return out;
}

std::int64_t now_unix() { return std::int64_t(std::time(nullptr)); }

ordered_json entry_to_json(const CachedDescription& entry) {
  ordered_json j;
  j["dataset"] = entry.key.dataset;
  j["conversation_id"] = entry.key.conversation_id;
  j["turn_index"] = entry.key.turn_index;
  j["description"] = entry.description;
  j["provider"] = entry.provider;
  j["prompt_version"] = entry.prompt_version;
  j["created_unix"] = entry.created_unix;
  return j;
}

CachedDescription entry_from_json(const ordered_json& j) {
  CachedDescription entry;
  entry.key.dataset = j.at("dataset").get<std::string>();
  entry.key.conversation_id = j.at("conversation_id").get<std::string>();
  entry.key.turn_index = j.at("turn_index").get<int>();
  entry.description = j.at("description").get<std::string>();
  entry.provider = j.at("provider").get<std::string>();
  entry.prompt_version = j.at("prompt_version").get<std::string>();
  entry.created_unix = j.at("created_unix").get<std::int64_t>();
  return entry;
}

// Shared token bucket: refill at requests_per_sec, burst up to one second.
class TokenBucket {
 public:
  explicit TokenBucket(double requests_per_sec)
      : rate_(requests_per_sec),
        capacity_(std::max(1.0, requests_per_sec)),
        tokens_(capacity_),
        last_(Clock::now()) {}

  void acquire() {
    if (rate_ <= 0.0) return;  // unlimited
    for (;;) {
      std::unique_lock<std::mutex> lock(mutex_);
      refill();
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      const double wait_sec = (1.0 - tokens_) / rate_;
      lock.unlock();
      std::this_thread::sleep_for(std::chrono::duration<double>(wait_sec));
    }
  }

 private:
  using Clock = std::chrono::steady_clock;

  void refill() {
    const Clock::time_point now = Clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_);
  }

  double rate_;
  double capacity_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mutex_;
};

// One service call under the retry policy; the bucket (when given) gates
// every attempt.
std::string call_with_retry(DescriptionClient& client, const std::vector<Frame>& frames,
                            const std::string& prompt_text, const RetryPolicy& retry,
                            TokenBucket* bucket) {
  const int attempts = std::max(1, retry.max_attempts);
  double delay_ms = double(retry.base_delay_ms);
  for (int attempt = 1;; ++attempt) {
    if (bucket != nullptr) bucket->acquire();
    try {
      return client.describe(frames, prompt_text);
    } catch (const std::exception& e) {
      if (attempt >= attempts) {
        throw std::runtime_error("describe: gave up after " + std::to_string(attempt) +
                                 " attempt(s): " + e.what());
      }
      std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay_ms));
      delay_ms *= retry.multiplier;
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// DescriptionCache

DescriptionCache::DescriptionCache(std::string path) : path_(std::move(path)) {}

DescriptionCache DescriptionCache::load(const std::string& path) {
  DescriptionCache cache(path);
  if (!std::filesystem::exists(path)) return cache;
  for (const std::string& line : jsonl::read_lines(path)) {
    CachedDescription entry = entry_from_json(ordered_json::parse(line));
    auto [it, inserted] = cache.entries_.emplace(entry.key, entry);
    (void)it;
    if (!inserted) {
      throw std::runtime_error("description cache " + path + ": duplicate key " +
                               key_string(entry.key));
    }
  }
  return cache;
}

std::optional<std::string> DescriptionCache::lookup(const DescriptionKey& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second.description;
}

void DescriptionCache::insert(const CachedDescription& entry) {
  auto [it, inserted] = entries_.emplace(entry.key, entry);
  (void)it;
  if (!inserted) {
    throw std::runtime_error("description cache: key already present: " + key_string(entry.key));
  }
  std::ofstream file(path_, std::ios::binary | std::ios::app);
  if (!file) {
    entries_.erase(entry.key);
    throw std::runtime_error("description cache: cannot open " + path_ + " for append");
  }
  file << entry_to_json(entry).dump() << '\n';
  file.flush();
  if (!file) {
    entries_.erase(entry.key);
    throw std::runtime_error("description cache: write to " + path_ + " failed");
  }
}

// ---------------------------------------------------------------------------
// Clients

std::string StubDescriptionClient::describe(const std::vector<Frame>& frames,
                                            const std::string& prompt) {
  calls_.fetch_add(1);
  int pending = fail_next_.load();
  while (pending > 0 && !fail_next_.compare_exchange_weak(pending, pending - 1)) {
  }
  if (pending > 0) {
    throw std::runtime_error("stub description client: injected failure");
  }
  int width = 0;
  int height = 0;
  if (!frames.empty()) {
    width = frames.back().width;
    height = frames.back().height;
  }
  return "frames=" + std::to_string(frames.size()) + " last=" + std::to_string(width) + "x" +
         std::to_string(height) + " prompt_bytes=" + std::to_string(prompt.size());
}

HttpDescriptionClient::HttpDescriptionClient(HttpClientConfig config)
    : config_(std::move(config)) {}

std::string HttpDescriptionClient::describe(const std::vector<Frame>& frames,
                                            const std::string& prompt) {
  const std::string& endpoint = config_.endpoint;
  std::size_t scheme = endpoint.find("://");
  if (scheme == std::string::npos) {
    throw std::runtime_error("http description client: endpoint '" + endpoint +
                             "' lacks a scheme");
  }
  std::size_t slash = endpoint.find('/', scheme + 3);
  const std::string base = slash == std::string::npos ? endpoint : endpoint.substr(0, slash);
  const std::string path = slash == std::string::npos ? "/" : endpoint.substr(slash);

  ordered_json body;
  body["prompt"] = prompt;
  body["frames"] = ordered_json::array();
  for (const Frame& frame : frames) {
    ordered_json f;
    f["index"] = frame.index;
    f["png_b64"] = base64(frame.png);
    body["frames"].push_back(std::move(f));
  }

  httplib::Client client(base);
  client.set_connection_timeout(config_.timeout_sec, 0);
  client.set_read_timeout(config_.timeout_sec, 0);
  client.set_write_timeout(config_.timeout_sec, 0);

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  httplib::Result result = client.Post(path, headers, body.dump(), "application/json");
  if (!result) {
    throw std::runtime_error("http description client: request to " + endpoint +
                             " failed: " + httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw std::runtime_error("http description client: " + endpoint + " returned status " +
                             std::to_string(result->status) + ": " + result->body);
  }
  ordered_json reply = ordered_json::parse(result->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("description") ||
      !reply["description"].is_string()) {
    throw std::runtime_error("http description client: " + endpoint +
                             " replied without a description field");
  }
  return reply["description"].get<std::string>();
}

// ---------------------------------------------------------------------------
// Prompt template

PromptTemplate PromptTemplate::parse(std::string_view contents, const std::string& origin) {
  constexpr std::string_view kHeader = "# version:";
  if (contents.substr(0, kHeader.size()) != kHeader) {
    throw std::runtime_error("prompt template " + origin + ": first line must be '# version: <v>'");
  }
  std::size_t eol = contents.find('\n');
  std::string_view header =
      contents.substr(kHeader.size(),
                      (eol == std::string_view::npos ? contents.size() : eol) - kHeader.size());
  PromptTemplate tmpl;
  tmpl.version = text::trim(header);
  if (tmpl.version.empty()) {
    throw std::runtime_error("prompt template " + origin + ": empty version");
  }
  tmpl.text = eol == std::string_view::npos ? std::string() : std::string(contents.substr(eol + 1));
  return tmpl;
}

PromptTemplate PromptTemplate::load(const std::string& path) {
  return parse(jsonl::read_file(path), path);
}

// ---------------------------------------------------------------------------
// Driving the pipeline

std::string describe_video(const DescriptionKey& key, const std::string& video_path, int n_frames,
                           DescriptionClient& client, const PromptTemplate& prompt,
                           DescriptionCache& cache, const RetryPolicy& retry) {
  if (auto hit = cache.lookup(key)) return *hit;
  FrameExtraction extraction = extract_frames(video_path, n_frames);
  std::string description =
      call_with_retry(client, extraction.frames, prompt.text, retry, nullptr);
  CachedDescription entry;
  entry.key = key;
  entry.description = description;
  entry.provider = client.provider_name();
  entry.prompt_version = prompt.version;
  entry.created_unix = now_unix();
  cache.insert(entry);
  return description;
}

DescribeRunReport describe_corpus(const Corpus& corpus, const std::string& video_root,
                                  int n_frames, DescriptionClient& client,
                                  const PromptTemplate& prompt, DescriptionCache& cache,
                                  const RetryPolicy& retry, const RateLimit& limit) {
  struct Item {
    DescriptionKey key;
    std::string path;
  };
  DescribeRunReport report;
  std::vector<Item> items;
  const std::string dataset = dataset_name(corpus.dataset);
  for (const Conversation& conversation : corpus.conversations) {
    for (const Utterance& utterance : conversation.utterances) {
      if (!utterance.video_ref.has_value() || utterance.video_ref->empty()) {
        ++report.skipped_no_video;
        continue;
      }
      Item item;
      item.key = DescriptionKey{dataset, conversation.conversation_id, utterance.turn_index};
      item.path = (std::filesystem::path(video_root) / *utterance.video_ref).string();
      items.push_back(std::move(item));
    }
  }

  TokenBucket bucket(limit.requests_per_sec);
  std::mutex mutex;         // guards cache and report
  std::mutex decode_mutex;  // video capture backends are not thread-safe
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= items.size()) return;
      const Item& item = items[i];
      {
        std::lock_guard<std::mutex> lock(mutex);
        if (cache.lookup(item.key).has_value()) {
          ++report.cache_hits;
          continue;
        }
      }
      try {
        FrameExtraction extraction;
        {
          std::lock_guard<std::mutex> lock(decode_mutex);
          extraction = extract_frames(item.path, n_frames);
        }
        std::string description =
            call_with_retry(client, extraction.frames, prompt.text, retry, &bucket);
        CachedDescription entry;
        entry.key = item.key;
        entry.description = std::move(description);
        entry.provider = client.provider_name();
        entry.prompt_version = prompt.version;
        entry.created_unix = now_unix();
        std::lock_guard<std::mutex> lock(mutex);
        cache.insert(entry);
        ++report.described;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mutex);
        ++report.failed;
        report.errors.push_back(key_string(item.key) + ": " + e.what());
      }
    }
  };

  const std::size_t n_workers =
      std::min<std::size_t>(std::max(1, limit.max_in_flight), std::max<std::size_t>(1, items.size()));
  std::vector<std::thread> threads;
  threads.reserve(n_workers);
  for (std::size_t i = 0; i < n_workers; ++i) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  return report;
}

}  // namespace erctk
