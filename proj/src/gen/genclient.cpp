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

#include "rtlleak/genclient.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <ctime>
#include <thread>
#include <type_traits>

#include "rtlleak/hdl/front.hpp"
#include "rtlleak/util/hash.hpp"
#include "rtlleak/util/io.hpp"

namespace rtlleak::gen {

using ojson = nlohmann::ordered_json;

void GenerationConfig::validate() const {
  if (!(temperature > 0)) throw ConfigError("temperature must be > 0");
  if (!(top_p > 0 && top_p <= 1)) throw ConfigError("top_p must be in (0, 1]");
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
  if (max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
  if (endpoint.empty()) throw ConfigError("endpoint is empty");
}

std::string GenerationConfig::canonical_json() const {
  ojson j;
  j["endpoint"] = endpoint;
  j["model"] = model;
  j["temperature"] = temperature;
  j["top_p"] = top_p;
  j["n_samples"] = n_samples;
  j["max_tokens"] = max_tokens;
  j["seed"] = seed ? ojson(*seed) : ojson(nullptr);
  return j.dump();
}

std::string GenerationConfig::hash() const { return sha256_hex(canonical_json()); }

std::string cache_key(const std::string& prompt, const GenerationConfig& cfg) {
  // The canonical JSON has no newline, so the split point is unambiguous.
  return sha256_hex(cfg.canonical_json() + "\n" + prompt);
}

namespace {

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool is_mock(const GenerationConfig& cfg) { return cfg.endpoint.rfind("mock:", 0) == 0; }

std::string excerpt(const std::string& body) { return body.size() <= 200 ? body : body.substr(0, 200) + "..."; }

}  // namespace

// Cache

std::filesystem::path Cache::path_for(const std::string& key) const {
  return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<GenerationBatch> Cache::load(const std::string& key, const std::string& prompt_id) const {
  auto path = path_for(key);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  std::string text = read_text_file(path);
  try {
    auto j = nlohmann::json::parse(text);
    if (j.at("schema") != "rtlleak.cache/1") throw CacheCorrupt("unknown cache schema in " + path.string());
    if (j.at("key") != key) throw CacheCorrupt("key mismatch in " + path.string());
    GenerationBatch b;
    b.prompt_id = prompt_id;
    for (const auto& c : j.at("completions")) b.completions.push_back(c.get<std::string>());
    if (static_cast<int>(b.completions.size()) != j.at("config").at("n_samples").get<int>())
      throw CacheCorrupt("completion count mismatch in " + path.string());
    const auto& p = j.at("provenance");
    b.provenance = {p.at("endpoint"), p.at("model"), p.at("config_hash"), p.at("timestamp")};
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw CacheCorrupt("unreadable cache entry " + path.string() + ": " + e.what());
  }
}

void Cache::store(const std::string& key, const std::string& prompt, const GenerationConfig& cfg,
                  const GenerationBatch& batch) const {
  ojson j;
  j["schema"] = "rtlleak.cache/1";
  j["key"] = key;
  j["prompt_id"] = batch.prompt_id;
  j["prompt"] = prompt;
  j["config"] = ojson::parse(cfg.canonical_json());
  j["provenance"] = {{"endpoint", batch.provenance.endpoint},
                     {"model", batch.provenance.model},
                     {"config_hash", batch.provenance.config_hash},
                     {"timestamp", batch.provenance.timestamp}};
  j["completions"] = batch.completions;
  write_file_atomic(path_for(key), j.dump(2) + "\n");
}

// Mocks

namespace {

struct Renamer {
  std::string prefix = "rn_";

  std::string name(const std::string& n) const { return prefix + n; }

  void expr(hdl::Expr& e) const {
    if (e.kind == hdl::ExprKind::Ref || e.kind == hdl::ExprKind::Index || e.kind == hdl::ExprKind::Slice)
      e.name = name(e.name);
    for (auto& a : e.args) expr(a);
  }

  void range(std::optional<hdl::Range>& r) const {
    if (!r) return;
    expr(r->msb);
    expr(r->lsb);
  }

  void stmt(hdl::Stmt& s) const {
    expr(s.lhs);
    expr(s.rhs);
    expr(s.cond);
    for (auto& b : s.body) stmt(b);
    for (auto& a : s.arms) {
      for (auto& l : a.labels) expr(l);
      for (auto& b : a.body) stmt(b);
    }
  }

  void module(hdl::AstModule& m) const {
    m.name = name(m.name);
    for (auto& p : m.params) {
      p.name = name(p.name);
      range(p.range);
      expr(p.value);
    }
    for (auto& p : m.ports) {
      p.name = name(p.name);
      range(p.range);
    }
    for (auto& item : m.items) {
      std::visit(
          [&](auto& it) {
            using T = std::decay_t<decltype(it)>;
            if constexpr (std::is_same_v<T, hdl::NetDecl>) {
              it.name = name(it.name);
              range(it.range);
            } else if constexpr (std::is_same_v<T, hdl::ContAssign>) {
              expr(it.lhs);
              expr(it.rhs);
            } else if constexpr (std::is_same_v<T, hdl::AlwaysBlock>) {
              for (auto& s : it.sens) s.name = name(s.name);
              stmt(it.body);
            } else {
              // Child port and parameter names belong to the child module.
              it.inst_name = name(it.inst_name);
              for (auto& c : it.params)
                if (c.expr) expr(*c.expr);
              for (auto& c : it.ports)
                if (c.expr) expr(*c.expr);
            }
          },
          item);
    }
  }
};

}  // namespace

std::string rename_identifiers(const std::string& source) {
  hdl::AstModule m = hdl::parse_module(source);
  Renamer{}.module(m);
  return hdl::print_module(m);
}

const std::string& stock_module() {
  static const std::string text =
      "// Stock lookup table returned for every prompt.\n"
      "module stock_lut (\n"
      "  input clk,\n"
      "  input [2:0] stock_sel,\n"
      "  output reg [11:0] stock_word\n"
      ");\n"
      "  always @(posedge clk) begin\n"
      "    case (stock_sel)\n"
      "      3'd0: stock_word <= 12'h9c1;\n"
      "      3'd1: stock_word <= 12'h3e7;\n"
      "      3'd2: stock_word <= 12'h5a2;\n"
      "      3'd3: stock_word <= 12'h0f8;\n"
      "      3'd4: stock_word <= 12'hb64;\n"
      "      3'd5: stock_word <= 12'h71d;\n"
      "      3'd6: stock_word <= 12'hc3a;\n"
      "      default: stock_word <= 12'h2b5;\n"
      "    endcase\n"
      "  end\n"
      "endmodule\n";
  return text;
}

GenerationBatch mock_generate(const std::string& module, MockBehavior behavior, int n_samples,
                              const MockCorpus& corpus) {
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
  std::string code;
  if (behavior == MockBehavior::Unrelated) {
    code = stock_module();
  } else {
    auto it = corpus.find(module);
    if (it == corpus.end()) throw UnknownModule("mock corpus has no module " + module);
    code = behavior == MockBehavior::Replay ? it->second : rename_identifiers(it->second);
  }
  GenerationBatch b;
  b.completions.assign(static_cast<size_t>(n_samples), "```verilog\n" + code + "```\n");
  return b;
}

// Client

std::string Client::keyed_text(const PromptRef& p, const GenerationConfig& cfg) const {
  if (!is_mock(cfg)) return p.text;
  // Mock output depends on the module and its golden source.
  std::string out = p.text + "\n\x1fmodule=" + p.module;
  if (auto it = mock_corpus_.find(p.module); it != mock_corpus_.end()) out += "\x1fgold=" + sha256_hex(it->second);
  return out;
}

Client::Client(ClientOptions opt) : opt_(std::move(opt)) {
  if (opt_.max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  if (opt_.max_retries < 0) throw ConfigError("max_retries must be >= 0");
}

uint64_t Client::network_calls() const {
  std::lock_guard<std::mutex> lk(mu_);
  return network_calls_;
}

std::string Client::post_once(const std::string& url, const std::string& body, int* status) {
  // Split "scheme://host[:port]" from the request path.
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint is not a URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/v1/chat/completions" : url.substr(path_start);

  {
    std::unique_lock<std::mutex> lk(mu_);
    cv_.wait(lk, [&] { return in_flight_ < opt_.max_in_flight; });
    ++in_flight_;
    ++network_calls_;
  }
  struct Release {
    Client* c;
    ~Release() {
      {
        std::lock_guard<std::mutex> lk(c->mu_);
        --c->in_flight_;
      }
      c->cv_.notify_one();
    }
  } release{this};

  httplib::Client cli(base);
  cli.set_connection_timeout(opt_.timeout_s, 0);
  cli.set_read_timeout(opt_.timeout_s, 0);
  cli.set_write_timeout(opt_.timeout_s, 0);
  httplib::Headers headers;
  if (const char* key = std::getenv(opt_.api_key_env.c_str()); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);
  auto res = cli.Post(path, headers, body, "application/json");
  if (!res) {
    *status = -static_cast<int>(res.error());
    return httplib::to_string(res.error());
  }
  *status = res->status;
  return res->body;
}

std::vector<std::string> Client::request_remote(const std::string& prompt, const GenerationConfig& cfg) {
  std::vector<std::string> out;
  // Some servers ignore n, so keep asking for the remainder.
  for (int round = 0; round < cfg.n_samples && static_cast<int>(out.size()) < cfg.n_samples; ++round) {
    ojson req;
    req["model"] = cfg.model;
    req["messages"] = ojson::array({{{"role", "user"}, {"content", prompt}}});
    req["temperature"] = cfg.temperature;
    req["top_p"] = cfg.top_p;
    req["n"] = cfg.n_samples - static_cast<int>(out.size());
    req["max_tokens"] = cfg.max_tokens;
    if (cfg.seed) req["seed"] = *cfg.seed;
    std::string body = req.dump();

    std::string resp;
    int status = 0;
    for (int attempt = 0;; ++attempt) {
      resp = post_once(cfg.endpoint, body, &status);
      bool transient = status <= 0 || status == 408 || status == 429 || status >= 500;
      if (status >= 200 && status < 300) break;
      if (!transient || attempt >= opt_.max_retries) {
        if (status <= 0) throw Timeout("no response from " + cfg.endpoint + " after " + std::to_string(attempt + 1) +
                                       " attempts: " + resp);
        throw EndpointError(status, excerpt(resp),
                            "endpoint " + cfg.endpoint + " returned HTTP " + std::to_string(status));
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<int64_t>(opt_.backoff_ms) << attempt));
    }
    size_t before = out.size();
    try {
      auto j = nlohmann::json::parse(resp);
      for (const auto& ch : j.at("choices")) {
        if (static_cast<int>(out.size()) >= cfg.n_samples) break;
        const auto& content = ch.at("message").at("content");
        out.push_back(content.is_string() ? content.get<std::string>() : std::string());
      }
    } catch (const nlohmann::json::exception& e) {
      throw EndpointError(status, excerpt(resp), std::string("malformed completion response: ") + e.what());
    }
    if (out.size() == before) throw EndpointError(status, excerpt(resp), "completion response has no choices");
  }
  return out;
}

GenerationBatch Client::generate(const PromptRef& prompt, const GenerationConfig& cfg, bool* cache_hit) {
  cfg.validate();
  const std::string text = keyed_text(prompt, cfg);
  const std::string key = cache_key(text, cfg);
  Cache cache(opt_.cache_dir);
  if (cache_hit) *cache_hit = false;
  if (opt_.use_cache) {
    if (auto b = cache.load(key, prompt.id)) {
      if (cache_hit) *cache_hit = true;
      return *b;
    }
  }
  GenerationBatch b;
  const std::string& ep = cfg.endpoint;
  if (is_mock(cfg)) {
    MockBehavior behavior;
    if (ep == "mock:replay") behavior = MockBehavior::Replay;
    else if (ep == "mock:perturb") behavior = MockBehavior::Perturb;
    else if (ep == "mock:unrelated") behavior = MockBehavior::Unrelated;
    else throw ConfigError("unknown mock endpoint: " + ep);
    b = mock_generate(prompt.module, behavior, cfg.n_samples, mock_corpus_);
  } else {
    if (opt_.offline) throw CacheMiss("offline and not cached: " + prompt.id);
    b.completions = request_remote(prompt.text, cfg);
  }
  b.prompt_id = prompt.id;
  b.provenance = {cfg.endpoint, cfg.model, cfg.hash(), utc_now()};
  if (opt_.use_cache) cache.store(key, text, cfg, b);
  return b;
}

std::vector<Outcome> Client::generate_many(const std::vector<PromptRef>& prompts, const GenerationConfig& cfg) {
  cfg.validate();
  // Generate each distinct prompt text once.
  std::map<std::string, size_t> first_of;
  std::vector<size_t> unique;
  std::vector<size_t> rep(prompts.size());
  for (size_t i = 0; i < prompts.size(); ++i) {
    auto [it, fresh] = first_of.emplace(keyed_text(prompts[i], cfg), i);
    if (fresh) unique.push_back(i);
    rep[i] = it->second;
  }
  std::vector<Outcome> out(prompts.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t u; (u = next.fetch_add(1)) < unique.size();) {
      size_t i = unique[u];
      Outcome& o = out[i];
      try {
        o.batch = generate(prompts[i], cfg, &o.cache_hit);
      } catch (const CacheMiss& e) {
        o.error = e.what(), o.error_kind = "offline_miss";
      } catch (const Timeout& e) {
        o.error = e.what(), o.error_kind = "timeout";
      } catch (const EndpointError& e) {
        o.error = e.what(), o.error_kind = "endpoint";
      } catch (const CacheCorrupt& e) {
        o.error = e.what(), o.error_kind = "cache_corrupt";
      } catch (const UnknownModule& e) {
        o.error = e.what(), o.error_kind = "unknown_module";
      } catch (const std::exception& e) {
        o.error = e.what(), o.error_kind = "other";
      }
    }
  };
  size_t n_threads = std::min<size_t>(static_cast<size_t>(opt_.max_in_flight), unique.size());
  std::vector<std::thread> threads;
  for (size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (size_t i = 0; i < prompts.size(); ++i) {
    if (rep[i] == i) continue;
    out[i] = out[rep[i]];
    if (out[i].batch) out[i].batch->prompt_id = prompts[i].id;
  }
  return out;
}

}  // namespace rtlleak::gen
