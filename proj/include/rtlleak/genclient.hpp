// Copyright 2026 The rtlleak Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Chat-completions client with a content-addressed on-disk cache, plus
// deterministic mock generators.
//
// Endpoints starting with "mock:" (mock:replay, mock:perturb, mock:unrelated)
// never touch the network. Every other endpoint is an HTTP(S) URL that
// accepts chat-completions requests.

#ifndef RTLLEAK_GENCLIENT_HPP
#define RTLLEAK_GENCLIENT_HPP

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtlleak::gen {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EndpointError : public std::runtime_error {
 public:
  EndpointError(int status, std::string body_excerpt, const std::string& msg)
      : std::runtime_error(msg), status_(status), body_excerpt_(std::move(body_excerpt)) {}
  int status() const { return status_; }
  const std::string& body_excerpt() const { return body_excerpt_; }

 private:
  int status_;
  std::string body_excerpt_;
};

class Timeout : public EndpointError {
 public:
  explicit Timeout(const std::string& msg) : EndpointError(0, "", msg) {}
};

// Offline mode and the batch is not cached.
class CacheMiss : public EndpointError {
 public:
  explicit CacheMiss(const std::string& msg) : EndpointError(0, "", msg) {}
};

class CacheCorrupt : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownModule : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GenerationConfig {
  std::string endpoint = "mock:replay";
  std::string model = "mock";
  double temperature = 0.8;
  double top_p = 0.95;
  int n_samples = 10;
  int max_tokens = 2048;
  std::optional<uint64_t> seed;

  // Throws ConfigError unless t > 0, 0 < top_p <= 1 and n_samples >= 1.
  void validate() const;
  // Canonical JSON of every field.
  std::string canonical_json() const;
  // SHA-256 of canonical_json().
  std::string hash() const;
};

struct Provenance {
  std::string endpoint;
  std::string model;
  std::string config_hash;
  std::string timestamp;  // UTC, ISO 8601
};

struct GenerationBatch {
  std::string prompt_id;
  std::vector<std::string> completions;
  Provenance provenance;
};

// The cache key: SHA-256 over the prompt and the canonical config.
std::string cache_key(const std::string& prompt, const GenerationConfig& cfg);

// One JSON file per batch at <dir>/<key[0:2]>/<key>.json, written with
// write-temp-then-rename.
class Cache {
 public:
  explicit Cache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::filesystem::path path_for(const std::string& key) const;
  // Throws CacheCorrupt when the file exists but does not hold a valid batch
  // for this key.
  std::optional<GenerationBatch> load(const std::string& key, const std::string& prompt_id) const;
  void store(const std::string& key, const std::string& prompt, const GenerationConfig& cfg,
             const GenerationBatch& batch) const;

 private:
  std::filesystem::path dir_;
};

enum class MockBehavior { Replay, Perturb, Unrelated };

// Golden sources keyed by module name.
using MockCorpus = std::map<std::string, std::string>;

// Replay returns the golden code, Perturb the golden code with every
// identifier consistently renamed, Unrelated a fixed stock module. Each
// completion is wrapped in a fenced code block.
GenerationBatch mock_generate(const std::string& module, MockBehavior behavior, int n_samples,
                              const MockCorpus& corpus);

// Consistent renaming of every identifier in a module. Throws ParseError.
std::string rename_identifiers(const std::string& source);

// The stock module returned by the unrelated mock.
const std::string& stock_module();

struct ClientOptions {
  std::filesystem::path cache_dir = ".rtlleak-cache";
  bool use_cache = true;
  bool offline = false;   // forbid network; cache misses fail
  int max_retries = 3;    // retries after the first attempt
  int backoff_ms = 250;   // base delay, doubled per retry
  int max_in_flight = 4;  // concurrent network requests
  int timeout_s = 120;
  std::string api_key_env = "RTLLEAK_API_KEY";
};

struct PromptRef {
  std::string id;      // e.g. "inv/I+K"
  std::string text;
  std::string module;  // consulted only by mock endpoints
};

struct Outcome {
  std::optional<GenerationBatch> batch;
  std::string error;      // empty on success
  std::string error_kind; // "endpoint" | "timeout" | "offline_miss" | "cache_corrupt" | "unknown_module" | "other"
  bool cache_hit = false;
};

class Client {
 public:
  explicit Client(ClientOptions opt = {});

  void set_mock_corpus(MockCorpus corpus) { mock_corpus_ = std::move(corpus); }

  // Cache hit returns the stored batch. Otherwise generates, stores and
  // returns it.
  GenerationBatch generate(const PromptRef& prompt, const GenerationConfig& cfg, bool* cache_hit = nullptr);

  // Bounded-parallel generation. Duplicate prompt texts are generated once.
  // Results keep input order; failures are reported per prompt.
  std::vector<Outcome> generate_many(const std::vector<PromptRef>& prompts, const GenerationConfig& cfg);

  // Network requests issued so far.
  uint64_t network_calls() const;

 private:
  std::string keyed_text(const PromptRef& p, const GenerationConfig& cfg) const;
  std::vector<std::string> request_remote(const std::string& prompt, const GenerationConfig& cfg);
  std::string post_once(const std::string& url, const std::string& body, int* status);

  ClientOptions opt_;
  MockCorpus mock_corpus_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  uint64_t network_calls_ = 0;
};

}  // namespace rtlleak::gen

#endif  // RTLLEAK_GENCLIENT_HPP
