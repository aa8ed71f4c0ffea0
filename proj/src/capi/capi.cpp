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

#include "rtlleak/rtlleak.h"

#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include "rtlleak/campaign.hpp"
#include "rtlleak/corpus.hpp"
#include "rtlleak/equiv.hpp"
#include "rtlleak/evalkit.hpp"
#include "rtlleak/genclient.hpp"
#include "rtlleak/hdl/front.hpp"
#include "rtlleak/lock.hpp"
#include "rtlleak/similarity.hpp"
#include "rtlleak/util/io.hpp"

using namespace rtlleak;
using ojson = nlohmann::ordered_json;

struct rl_module {
  hdl::AstModule m;
};

struct rl_lock_result {
  lock::LockResult r;
};

struct rl_campaign {
  campaign::CampaignSpec spec;
  campaign::RunOptions opt;
};

namespace {

thread_local std::string g_last_error;

rl_status fail(rl_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs f and maps exceptions onto status codes.
template <typename F>
rl_status guard(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const hdl::ParseError& e) {
    return fail(RL_ERR_PARSE, std::string(hdl::to_string(e.kind())) + " error at " + std::to_string(e.line()) + ":" +
                                  std::to_string(e.col()) + ": " + e.what());
  } catch (const hdl::ExtractError& e) {
    return fail(RL_ERR_PARSE, e.what());
  } catch (const IoError& e) {
    return fail(RL_ERR_IO, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(RL_ERR_IO, e.what());
  } catch (const gen::EndpointError& e) {
    return fail(RL_ERR_ENDPOINT, e.what());
  } catch (const gen::ConfigError& e) {
    return fail(RL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const corpus::SchemaError& e) {
    return fail(RL_ERR_DATA, e.what());
  } catch (const eval::DomainError& e) {
    return fail(RL_ERR_DATA, e.what());
  } catch (const eval::RaggedCorpus& e) {
    return fail(RL_ERR_DATA, e.what());
  } catch (const eval::EmptyCorpus& e) {
    return fail(RL_ERR_DATA, e.what());
  } catch (const sim::ParamMismatch& e) {
    return fail(RL_ERR_DATA, e.what());
  } catch (const sim::EmptyCorpus& e) {
    return fail(RL_ERR_DATA, e.what());
  } catch (const equiv::ElaborationError& e) {
    return fail(RL_ERR_DATA, e.what());
  } catch (const equiv::EmptyCorpus& e) {
    return fail(RL_ERR_DATA, e.what());
  } catch (const lock::WidthMismatch& e) {
    return fail(RL_ERR_DATA, e.what());
  } catch (const corpus::MissingKeyMeta& e) {
    return fail(RL_ERR_DATA, e.what());
  } catch (const gen::CacheCorrupt& e) {
    return fail(RL_ERR_DATA, e.what());
  } catch (const gen::UnknownModule& e) {
    return fail(RL_ERR_DATA, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(RL_ERR_DATA, std::string("malformed JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return fail(RL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(RL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RL_ERR_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

#define RL_REQUIRE(cond)                                                        \
  do {                                                                          \
    if (!(cond)) return fail(RL_ERR_INVALID_ARGUMENT, "null argument: " #cond); \
  } while (0)

std::string str_or(const char* s, const char* fallback) { return s ? s : fallback; }

ojson summary_json(const campaign::RunSummary& s) {
  ojson j;
  j["output_dir"] = s.output_dir.string();
  j["units"] = s.units;
  j["samples"] = s.samples;
  ojson f = ojson::array();
  for (const auto& x : s.failures)
    f.push_back({{"prompt_id", x.prompt_id}, {"module", x.module}, {"kind", x.kind}, {"message", x.message}});
  j["failures"] = f;
  j["files"] = s.files;
  return j;
}

rl_status run_campaign(rl_campaign* c, char** summary, bool leakage) {
  RL_REQUIRE(c && summary);
  *summary = nullptr;
  return guard([&] {
    auto s = leakage ? campaign::run_leakage(c->spec, c->opt) : campaign::run_quality(c->spec, c->opt);
    *summary = dup(summary_json(s).dump(2) + "\n");
    if (!s.failures.empty()) {
      // Endpoint failures dominate; other kinds are data errors.
      bool endpoint = false;
      for (const auto& f : s.failures)
        endpoint = endpoint || f.kind == "endpoint" || f.kind == "timeout" || f.kind == "offline_miss";
      return fail(endpoint ? RL_ERR_ENDPOINT : RL_ERR_DATA,
                  std::to_string(s.failures.size()) + " unit(s) failed; see failures.json in " +
                      s.output_dir.string());
    }
    return RL_OK;
  });
}

}  // namespace

extern "C" {

const char* rl_version(void) { return "0.1.0"; }

const char* rl_status_string(rl_status s) {
  switch (s) {
    case RL_OK: return "ok";
    case RL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RL_ERR_PARSE: return "parse error";
    case RL_ERR_IO: return "I/O error";
    case RL_ERR_DATA: return "data error";
    case RL_ERR_ENDPOINT: return "endpoint error";
    case RL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* rl_last_error(void) { return g_last_error.c_str(); }

void rl_string_free(char* s) { std::free(s); }

rl_status rl_module_parse(const char* source, rl_module** out) {
  RL_REQUIRE(source && out);
  *out = nullptr;
  return guard([&] {
    *out = new rl_module{hdl::parse_module(source)};
    return RL_OK;
  });
}

rl_status rl_module_extract(const char* completion, rl_module** out) {
  RL_REQUIRE(completion && out);
  *out = nullptr;
  return guard([&] {
    *out = new rl_module{hdl::extract_module_from_completion(completion)};
    return RL_OK;
  });
}

rl_status rl_module_print(const rl_module* m, char** out) {
  RL_REQUIRE(m && out);
  return guard([&] {
    *out = dup(hdl::print_module(m->m));
    return RL_OK;
  });
}

rl_status rl_module_name(const rl_module* m, char** out) {
  RL_REQUIRE(m && out);
  return guard([&] {
    *out = dup(m->m.name);
    return RL_OK;
  });
}

void rl_module_free(rl_module* m) { delete m; }

rl_status rl_lock(const rl_module* m, const char* strategy, uint64_t seed, const char* key_port_name,
                  rl_lock_result** out) {
  RL_REQUIRE(m && strategy && out);
  *out = nullptr;
  return guard([&] {
    auto s = corpus::parse_strategy(strategy, seed, str_or(key_port_name, "lock_key"));
    *out = new rl_lock_result{lock::lock_module(m->m, s)};
    return RL_OK;
  });
}

rl_status rl_lock_result_is_locked(const rl_lock_result* r, int* locked) {
  RL_REQUIRE(r && locked);
  *locked = r->r.report.locked ? 1 : 0;
  return RL_OK;
}

rl_status rl_lock_result_module(const rl_lock_result* r, rl_module** out) {
  RL_REQUIRE(r && out);
  return guard([&] {
    *out = new rl_module{r->r.locked};
    return RL_OK;
  });
}

rl_status rl_lock_result_key_json(const rl_lock_result* r, char** out) {
  RL_REQUIRE(r && out);
  return guard([&] {
    *out = dup(lock::key_file_json(r->r));
    return RL_OK;
  });
}

void rl_lock_result_free(rl_lock_result* r) { delete r; }

rl_status rl_apply_key(const rl_module* locked, const char* key_json, const char* value_hex, rl_module** out) {
  RL_REQUIRE(locked && key_json && value_hex && out);
  *out = nullptr;
  return guard([&] {
    auto key = lock::parse_key_file(key_json);
    std::string hex = value_hex;
    if (hex.rfind("0x", 0) == 0 || hex.rfind("0X", 0) == 0) hex = hex.substr(2);
    BitVec v = key.width ? BitVec::from_hex(key.width, hex) : BitVec();
    *out = new rl_module{lock::apply_key(locked->m, key, v)};
    return RL_OK;
  });
}

rl_status rl_fingerprint_json(const rl_module* m, const char* normalization, uint32_t k, uint32_t w, char** out) {
  RL_REQUIRE(m && out);
  return guard([&] {
    auto n = sim::normalization_from(str_or(normalization, "ident"));
    auto fp = sim::fingerprint(sim::tokenize(m->m, n), k, w);
    ojson j;
    j["module"] = m->m.name;
    j["normalization"] = sim::to_string(n);
    j["k"] = fp.k;
    j["w"] = fp.w;
    ojson prints = ojson::array();
    for (const auto& p : fp.prints) {
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(p.hash));
      prints.push_back({{"hash", buf}, {"pos", p.pos}});
    }
    j["prints"] = prints;
    *out = dup(j.dump(2) + "\n");
    return RL_OK;
  });
}

rl_status rl_similarity(const rl_module* gen, const rl_module* ref, const char* normalization, const char* mode,
                        uint32_t k, uint32_t w, double* ss) {
  RL_REQUIRE(gen && ref && ss);
  return guard([&] {
    auto n = sim::normalization_from(str_or(normalization, "ident"));
    std::string md = str_or(mode, "coverage");
    if (md != "coverage" && md != "jaccard") throw std::invalid_argument("mode must be coverage or jaccard");
    auto a = sim::fingerprint(sim::tokenize(gen->m, n), k, w);
    auto b = sim::fingerprint(sim::tokenize(ref->m, n), k, w);
    *ss = sim::score(a, b, md == "jaccard" ? sim::ScoreMode::Jaccard : sim::ScoreMode::Coverage).ss;
    return RL_OK;
  });
}

int rl_classify_leak(double ss, double threshold) { return sim::classify_leak(ss, threshold) ? 1 : 0; }

rl_status rl_equiv(const rl_module* gen, const rl_module* gold, uint32_t budget_bits, uint64_t n_vectors,
                   uint64_t seed, double* eq, char** report_json) {
  RL_REQUIRE(gen && gold && eq);
  return guard([&] {
    equiv::EquivOptions o;
    o.budget_bits = budget_bits;
    o.n_vectors = n_vectors;
    o.seed = seed;
    auto r = equiv::check_equivalence(gen->m, gold->m, o);
    *eq = r.eq;
    if (report_json) *report_json = dup(equiv::report_json(r));
    return RL_OK;
  });
}

rl_status rl_pass_at_k(int64_t n, int64_t c, int64_t k, double* out) {
  RL_REQUIRE(out);
  return guard([&] {
    *out = eval::pass_at_k(n, c, k);
    return RL_OK;
  });
}

int rl_classify_pass(double eq, double threshold) { return eval::classify_pass(eq, threshold) ? 1 : 0; }

double rl_delta_pp(double a, double b) { return eval::delta_pp(a, b); }

rl_status rl_lock_corpus(const char* input, const char* const* strategies, size_t n_strategies, uint64_t seed,
                         const char* key_port_name, const char* out_dir, char** compat_json) {
  RL_REQUIRE(input && (strategies || n_strategies == 0) && out_dir && compat_json);
  return guard([&] {
    std::vector<std::string> s(strategies, strategies + n_strategies);
    if (s.empty()) throw std::invalid_argument("no lock strategy given");
    auto r = campaign::lock_corpus(input, s, seed, str_or(key_port_name, "lock_key"), out_dir);
    *compat_json = dup(corpus::compat_report_json(r.reports));
    return RL_OK;
  });
}

rl_status rl_compat_table(const char* compat_json, char** table) {
  RL_REQUIRE(compat_json && table);
  return guard([&] {
    auto j = nlohmann::json::parse(compat_json);
    std::vector<corpus::CompatReport> reports;
    for (const auto& s : j.at("strategies")) {
      corpus::CompatReport r;
      r.strategy = s.at("strategy");
      r.locked_count = s.at("locked");
      r.original_count = s.at("original");
      for (const auto& m : s.at("modules"))
        r.modules.push_back({m.at("id"), m.at("module"), m.at("status") == "Locked", m.at("reason"),
                             m.at("key_width"), m.at("sites_considered"), m.at("sites_locked")});
      reports.push_back(std::move(r));
    }
    *table = dup(corpus::compat_table_text(reports));
    return RL_OK;
  });
}

rl_status rl_build_dataset(const char* ip, const char* base, const char* strategy, const char* mode, uint64_t seed,
                           const char* key_port_name, const char* out_file, char** summary) {
  RL_REQUIRE(ip && strategy && mode && out_file && summary);
  return guard([&] {
    std::string md = mode;
    if (md != "w/k" && md != "w/o-k") throw std::invalid_argument("mode must be w/k or w/o-k");
    std::optional<std::filesystem::path> b;
    if (base) b = base;
    auto r = campaign::build_dataset(ip, b, strategy, md == "w/k" ? corpus::FtMode::WithKey : corpus::FtMode::WithoutKey,
                                     seed, str_or(key_port_name, "lock_key"), out_file);
    ojson j;
    j["out_file"] = out_file;
    j["strategy"] = strategy;
    j["mode"] = md;
    j["base"] = r.base;
    j["locked"] = r.locked;
    j["original"] = r.original;
    j["total"] = r.base + r.locked + r.original;
    *summary = dup(j.dump(2) + "\n");
    return RL_OK;
  });
}

rl_status rl_generate(const char* config_json, const char* prompt, const char* prompt_id, const char* module,
                      const char* mock_corpus, const char* cache_dir, int offline, char** batch_json) {
  RL_REQUIRE(config_json && prompt && batch_json);
  return guard([&] {
    auto j = nlohmann::json::parse(config_json);
    gen::GenerationConfig cfg;
    cfg.endpoint = j.value("endpoint", cfg.endpoint);
    cfg.model = j.value("model", cfg.model);
    cfg.temperature = j.value("temperature", cfg.temperature);
    cfg.top_p = j.value("top_p", cfg.top_p);
    cfg.n_samples = j.value("n_samples", cfg.n_samples);
    cfg.max_tokens = j.value("max_tokens", cfg.max_tokens);
    if (j.contains("seed") && !j["seed"].is_null()) cfg.seed = j["seed"].get<uint64_t>();
    gen::ClientOptions o;
    if (cache_dir) o.cache_dir = cache_dir;
    o.offline = offline != 0;
    gen::Client client(o);
    if (mock_corpus) {
      gen::MockCorpus mc;
      for (const auto& p : campaign::load_pairs(mock_corpus))
        if (p.parse_ok) mc[p.module] = p.code;
      client.set_mock_corpus(std::move(mc));
    }
    bool hit = false;
    auto b = client.generate({str_or(prompt_id, "prompt"), prompt, str_or(module, "")}, cfg, &hit);
    ojson out;
    out["prompt_id"] = b.prompt_id;
    out["cache_hit"] = hit;
    out["provenance"] = {{"endpoint", b.provenance.endpoint},
                         {"model", b.provenance.model},
                         {"config_hash", b.provenance.config_hash},
                         {"timestamp", b.provenance.timestamp}};
    out["completions"] = b.completions;
    *batch_json = dup(out.dump(2) + "\n");
    return RL_OK;
  });
}

rl_status rl_campaign_load(const char* spec_path, rl_campaign** out) {
  RL_REQUIRE(spec_path && out);
  *out = nullptr;
  return guard([&] {
    *out = new rl_campaign{campaign::load_campaign_spec(spec_path), {}};
    return RL_OK;
  });
}

rl_status rl_campaign_set_offline(rl_campaign* c, int offline) {
  RL_REQUIRE(c);
  c->opt.offline = offline != 0;
  return RL_OK;
}

rl_status rl_campaign_set_dirs(rl_campaign* c, const char* output_dir, const char* cache_dir) {
  RL_REQUIRE(c);
  if (output_dir) c->opt.output_dir = output_dir;
  if (cache_dir) c->opt.cache_dir = cache_dir;
  return RL_OK;
}

rl_status rl_campaign_run_leakage(rl_campaign* c, char** summary) { return run_campaign(c, summary, true); }

rl_status rl_campaign_run_quality(rl_campaign* c, char** summary) { return run_campaign(c, summary, false); }

void rl_campaign_free(rl_campaign* c) { delete c; }

rl_status rl_report(const char* const* result_dirs, size_t n_dirs, const char* out_dir, char** summary) {
  RL_REQUIRE((result_dirs || n_dirs == 0) && out_dir && summary);
  return guard([&] {
    std::vector<std::filesystem::path> dirs(result_dirs, result_dirs + n_dirs);
    auto r = campaign::report(dirs, out_dir);
    ojson j;
    j["campaigns"] = r.campaigns;
    j["delta_rows"] = r.delta_rows;
    j["files"] = r.files;
    *summary = dup(j.dump(2) + "\n");
    return RL_OK;
  });
}

}  // extern "C"
