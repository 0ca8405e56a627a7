#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "erctk/corpus.hpp"
#include "erctk/frames.hpp"

namespace erctk {

struct DescriptionKey {
  std::string dataset;
  std::string conversation_id;
  int turn_index = 0;

  friend bool operator<(const DescriptionKey& a, const DescriptionKey& b) {
    return std::tie(a.dataset, a.conversation_id, a.turn_index) <
           std::tie(b.dataset, b.conversation_id, b.turn_index);
  }
  friend bool operator==(const DescriptionKey& a, const DescriptionKey& b) {
    return std::tie(a.dataset, a.conversation_id, a.turn_index) ==
           std::tie(b.dataset, b.conversation_id, b.turn_index);
  }
};

struct CachedDescription {
  DescriptionKey key;
  std::string description;
  std::string provider;
  std::string prompt_version;
  std::int64_t created_unix = 0;
};

// Append-only JSONL cache. Loading a file with a duplicate key is an
// error; insert() appends to the file and the in-memory index.
class DescriptionCache {
 public:
  explicit DescriptionCache(std::string path);
  static DescriptionCache load(const std::string& path);  // missing file -> empty cache

  std::optional<std::string> lookup(const DescriptionKey& key) const;
  void insert(const CachedDescription& entry);
  std::size_t size() const { return entries_.size(); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::map<DescriptionKey, CachedDescription> entries_;
};

class DescriptionClient {
 public:
  virtual ~DescriptionClient() = default;
  virtual std::string provider_name() const = 0;
  // Throws on transport or service failure.
  virtual std::string describe(const std::vector<Frame>& frames, const std::string& prompt) = 0;
};

// Deterministic offline client. Yields
// "frames=<n> last=<w>x<h> prompt_bytes=<len>" style text so tests can
// assert exactly. fail_next(n) makes the next n calls throw.
class StubDescriptionClient : public DescriptionClient {
 public:
  std::string provider_name() const override { return "stub"; }
  std::string describe(const std::vector<Frame>& frames, const std::string& prompt) override;

  void fail_next(int n) { fail_next_.store(n); }
  int calls() const { return calls_.load(); }

 private:
  std::atomic<int> calls_{0};
  std::atomic<int> fail_next_{0};
};

struct HttpClientConfig {
  std::string endpoint;  // e.g. http://127.0.0.1:8080/describe
  std::string api_key_env = "ERCTK_DESCRIBE_API_KEY";
  int timeout_sec = 30;
};

// POSTs {"prompt":..., "frames":[{"index":...,"png_b64":...}]} and expects
// {"description": "..."} back. The API key, when the env var is set, is
// sent as a bearer token.
class HttpDescriptionClient : public DescriptionClient {
 public:
  explicit HttpDescriptionClient(HttpClientConfig config);
  std::string provider_name() const override { return "http"; }
  std::string describe(const std::vector<Frame>& frames, const std::string& prompt) override;

 private:
  HttpClientConfig config_;
};

struct RetryPolicy {
  int max_attempts = 4;
  int base_delay_ms = 500;  // doubles after each failure
  double multiplier = 2.0;
};

struct RateLimit {
  double requests_per_sec = 4.0;
  int max_in_flight = 4;
};

struct PromptTemplate {
  std::string version;  // from a leading "# version: <v>" line
  std::string text;

  static PromptTemplate load(const std::string& path);
  static PromptTemplate parse(std::string_view contents, const std::string& origin);
};

// Cache-first description of one clip. On a miss: extract frames, call the
// client under the retry policy, store the result. Returns the description.
std::string describe_video(const DescriptionKey& key, const std::string& video_path, int n_frames,
                           DescriptionClient& client, const PromptTemplate& prompt,
                           DescriptionCache& cache, const RetryPolicy& retry);

struct DescribeRunReport {
  std::size_t described = 0;  // fresh service calls that succeeded
  std::size_t cache_hits = 0;
  std::size_t skipped_no_video = 0;
  std::size_t failed = 0;
  std::vector<std::string> errors;
};

// Describe every utterance of the corpus that has a video_ref, resolving
// refs against video_root. Bounded concurrency (max_in_flight) plus a
// token-bucket rate limit across workers.
DescribeRunReport describe_corpus(const Corpus& corpus, const std::string& video_root, int n_frames,
                                  DescriptionClient& client, const PromptTemplate& prompt,
                                  DescriptionCache& cache, const RetryPolicy& retry,
                                  const RateLimit& limit);

}  // namespace erctk
