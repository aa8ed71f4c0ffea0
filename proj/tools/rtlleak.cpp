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

// Command-line front end. Uses only the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "rtlleak/rtlleak.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kEndpoint = 3 };

int exit_code(rl_status s) {
  switch (s) {
    case RL_OK: return kOk;
    case RL_ERR_INVALID_ARGUMENT: return kUsage;
    case RL_ERR_ENDPOINT: return kEndpoint;
    default: return kData;
  }
}

// Thrown to unwind with an exit code after reporting.
struct Abort {
  int code;
};

void check(rl_status s, const std::string& context) {
  if (s == RL_OK) return;
  std::cerr << "rtlleak: " << context << ": " << rl_last_error() << "\n";
  throw Abort{exit_code(s)};
}

std::string read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  if (in) ss << in.rdbuf();
  if (!in || in.bad()) {
    std::cerr << "rtlleak: cannot read " << path << "\n";
    throw Abort{kData};
  }
  return ss.str();
}

void write_output(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-") {
    std::cout << data;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << data;
  if (!out) {
    std::cerr << "rtlleak: cannot write " << path << "\n";
    throw Abort{kData};
  }
}

struct Str {
  char* p = nullptr;
  ~Str() { rl_string_free(p); }
  std::string get() const { return p ? p : ""; }
};

struct Module {
  rl_module* m = nullptr;
  ~Module() { rl_module_free(m); }
};

// Parses a file as a module; completions (fenced or with prose) are accepted.
void load_module(const std::string& path, Module& out) {
  std::string text = read_input(path);
  if (rl_module_parse(text.c_str(), &out.m) == RL_OK) return;
  std::string parse_error = rl_last_error();
  if (rl_module_extract(text.c_str(), &out.m) == RL_OK) return;
  std::cerr << "rtlleak: " << path << ": " << parse_error << "\n";
  throw Abort{kData};
}

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logic locking and training-data leakage evaluation for RTL code generators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rl_version());

  // lock
  std::string lock_input, lock_out = "locked", key_name = "lock_key";
  std::vector<std::string> lock_strategies;
  uint64_t lock_seed = 0;
  auto* lock = app.add_subcommand("lock", "Lock a corpus and write locked files, key files and a Locked/Original table");
  lock->add_option("input", lock_input, "Directory of .v files, a .v file, or a JSONL dataset")->required();
  lock->add_option("-s,--strategy", lock_strategies, "all-50, all-100, const-50 or const-100 (repeatable; default all four)");
  lock->add_option("--seed", lock_seed, "Selection seed");
  lock->add_option("--key-name", key_name, "Key port name");
  lock->add_option("-o,--out", lock_out, "Output directory");

  // fingerprint
  std::string fp_file, normalization = "ident";
  uint32_t fp_k = 17, fp_w = 13;
  auto* fingerprint = app.add_subcommand("fingerprint", "Print the winnowed fingerprint set of a module as JSON");
  fingerprint->add_option("file", fp_file, "Verilog file or model completion")->required();
  fingerprint->add_option("--normalization", normalization, "ident or raw");
  fingerprint->add_option("-k", fp_k, "k-gram length");
  fingerprint->add_option("-w", fp_w, "Winnowing window");

  // score
  std::string score_gen, score_ref, score_mode = "coverage";
  double leak_threshold = 0.6;
  auto* score = app.add_subcommand("score", "Structural similarity of a generated module against a reference");
  score->add_option("generated", score_gen, "Generated module or completion")->required();
  score->add_option("reference", score_ref, "Reference module")->required();
  score->add_option("--normalization", normalization, "ident or raw");
  score->add_option("--mode", score_mode, "coverage or jaccard");
  score->add_option("-k", fp_k, "k-gram length");
  score->add_option("-w", fp_w, "Winnowing window");
  score->add_option("--threshold", leak_threshold, "Leak threshold on ss");

  // equiv
  std::string eq_gen, eq_gold, eq_json;
  uint32_t budget_bits = 20;
  uint64_t n_vectors = 10000, eq_seed = 0;
  auto* equiv = app.add_subcommand("equiv", "Functional equivalence ratio of a generated module against a golden one");
  equiv->add_option("generated", eq_gen, "Generated module or completion")->required();
  equiv->add_option("golden", eq_gold, "Golden module")->required();
  equiv->add_option("--budget-bits", budget_bits, "Exhaustive simulation up to this many support bits");
  equiv->add_option("--vectors", n_vectors, "Random vectors beyond the budget");
  equiv->add_option("--seed", eq_seed, "Random vector seed");
  equiv->add_option("--json", eq_json, "Write the full report to this file (- for stdout)");

  // dataset
  std::string ds_ip, ds_base, ds_strategy = "all-50", ds_mode = "w/k", ds_out;
  uint64_t ds_seed = 0;
  auto* dataset = app.add_subcommand("dataset", "Assemble a fine-tuning dataset (D_base plus locked or original IP)");
  dataset->add_option("--ip", ds_ip, "IP corpus")->required();
  dataset->add_option("--base", ds_base, "Base dataset (JSONL or .v directory)");
  dataset->add_option("-s,--strategy", ds_strategy, "none or a lock strategy");
  dataset->add_option("--mode", ds_mode, "w/k or w/o-k");
  dataset->add_option("--seed", ds_seed, "Selection seed");
  dataset->add_option("--key-name", key_name, "Key port name");
  dataset->add_option("-o,--out", ds_out, "Output JSONL file")->required();

  // gen
  std::string g_endpoint = "mock:replay", g_model = "mock", g_prompt, g_prompt_file, g_id = "prompt", g_module,
              g_mock_corpus, g_cache = ".rtlleak-cache", g_out;
  double g_temperature = 0.8, g_top_p = 0.95;
  int g_n = 10, g_max_tokens = 2048;
  int64_t g_seed = -1;
  bool offline = false;
  auto* gen = app.add_subcommand("gen", "Generate completions for one prompt through the cache");
  gen->add_option("--endpoint", g_endpoint, "Chat-completions URL or mock:replay|mock:perturb|mock:unrelated");
  gen->add_option("--model", g_model, "Model name");
  gen->add_option("-t,--temperature", g_temperature, "Sampling temperature");
  gen->add_option("--top-p", g_top_p, "Nucleus sampling mass");
  gen->add_option("-n,--samples", g_n, "Completions per prompt");
  gen->add_option("--max-tokens", g_max_tokens, "Completion token limit");
  gen->add_option("--seed", g_seed, "Sampling seed passed to the endpoint");
  auto* prompt_opt = gen->add_option("-p,--prompt", g_prompt, "Prompt text");
  gen->add_option("--prompt-file", g_prompt_file, "Read the prompt from a file")->excludes(prompt_opt);
  gen->add_option("--id", g_id, "Prompt id");
  gen->add_option("--module", g_module, "Module name for mock endpoints");
  gen->add_option("--mock-corpus", g_mock_corpus, "Golden corpus for mock endpoints");
  gen->add_option("--cache-dir", g_cache, "Cache directory");
  gen->add_flag("--offline", offline, "Forbid network access; require cache hits");
  gen->add_option("-o,--out", g_out, "Output file (default stdout)");

  // eval-leakage / eval-quality
  std::string spec_path, out_dir, cache_dir;
  auto add_eval = [&](const char* name, const char* help) {
    auto* c = app.add_subcommand(name, help);
    c->add_option("spec", spec_path, "Campaign spec JSON")->required();
    c->add_flag("--offline", offline, "Forbid network access; require cache hits");
    c->add_option("-o,--out", out_dir, "Override the output directory");
    c->add_option("--cache-dir", cache_dir, "Override the cache directory");
    return c;
  };
  auto* leak = add_eval("eval-leakage", "Run a leakage campaign");
  auto* quality = add_eval("eval-quality", "Run a quality (pass@k) campaign");

  // report
  std::vector<std::string> report_dirs;
  std::string report_out = "report";
  auto* report = app.add_subcommand("report", "Percentage-point deltas between campaign results");
  report->add_option("results", report_dirs, "Result directories (two or more)")->required();
  report->add_option("-o,--out", report_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (lock->parsed()) {
      if (lock_strategies.empty()) lock_strategies = {"all-50", "all-100", "const-50", "const-100"};
      auto cs = c_strings(lock_strategies);
      Str compat, table;
      check(rl_lock_corpus(lock_input.c_str(), cs.data(), cs.size(), lock_seed, key_name.c_str(), lock_out.c_str(),
                           &compat.p),
            lock_input);
      check(rl_compat_table(compat.p, &table.p), "compat table");
      std::cout << table.get();
    } else if (fingerprint->parsed()) {
      Module m;
      load_module(fp_file, m);
      Str json;
      check(rl_fingerprint_json(m.m, normalization.c_str(), fp_k, fp_w, &json.p), fp_file);
      std::cout << json.get();
    } else if (score->parsed()) {
      Module g, r;
      load_module(score_gen, g);
      load_module(score_ref, r);
      double ss = 0;
      check(rl_similarity(g.m, r.m, normalization.c_str(), score_mode.c_str(), fp_k, fp_w, &ss), "score");
      std::cout << "ss=" << fmt(ss, 4) << " leaky=" << rl_classify_leak(ss, leak_threshold) << "\n";
    } else if (equiv->parsed()) {
      Module g, r;
      load_module(eq_gen, g);
      load_module(eq_gold, r);
      double eq = 0;
      Str report_json;
      check(rl_equiv(g.m, r.m, budget_bits, n_vectors, eq_seed, &eq, eq_json.empty() ? nullptr : &report_json.p),
            "equiv");
      std::cout << "eq=" << fmt(eq, 2) << " pass=" << rl_classify_pass(eq, 80.0) << "\n";
      if (!eq_json.empty()) write_output(eq_json, report_json.get());
    } else if (dataset->parsed()) {
      Str summary;
      check(rl_build_dataset(ds_ip.c_str(), ds_base.empty() ? nullptr : ds_base.c_str(), ds_strategy.c_str(),
                             ds_mode.c_str(), ds_seed, key_name.c_str(), ds_out.c_str(), &summary.p),
            "dataset");
      std::cout << summary.get();
    } else if (gen->parsed()) {
      if (g_prompt.empty() && g_prompt_file.empty()) {
        std::cerr << "rtlleak: gen needs --prompt or --prompt-file\n";
        return kUsage;
      }
      if (!g_prompt_file.empty()) g_prompt = read_input(g_prompt_file);
      std::ostringstream cfg;
      auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
          if (c == '"' || c == '\\') out += '\\';
          out += c;
        }
        return out + "\"";
      };
      cfg << "{\"endpoint\":" << quote(g_endpoint) << ",\"model\":" << quote(g_model)
          << ",\"temperature\":" << fmt(g_temperature, 6) << ",\"top_p\":" << fmt(g_top_p, 6)
          << ",\"n_samples\":" << g_n << ",\"max_tokens\":" << g_max_tokens;
      if (g_seed >= 0) cfg << ",\"seed\":" << g_seed;
      cfg << "}";
      Str batch;
      check(rl_generate(cfg.str().c_str(), g_prompt.c_str(), g_id.c_str(), g_module.c_str(),
                        g_mock_corpus.empty() ? nullptr : g_mock_corpus.c_str(), g_cache.c_str(), offline ? 1 : 0,
                        &batch.p),
            "gen");
      write_output(g_out, batch.get());
    } else if (leak->parsed() || quality->parsed()) {
      rl_campaign* c = nullptr;
      check(rl_campaign_load(spec_path.c_str(), &c), spec_path);
      std::unique_ptr<rl_campaign, void (*)(rl_campaign*)> guard(c, rl_campaign_free);
      check(rl_campaign_set_offline(c, offline ? 1 : 0), "campaign");
      check(rl_campaign_set_dirs(c, out_dir.empty() ? nullptr : out_dir.c_str(),
                                 cache_dir.empty() ? nullptr : cache_dir.c_str()),
            "campaign");
      Str summary;
      rl_status s = leak->parsed() ? rl_campaign_run_leakage(c, &summary.p) : rl_campaign_run_quality(c, &summary.p);
      std::cout << summary.get();
      check(s, spec_path);
    } else if (report->parsed()) {
      auto cs = c_strings(report_dirs);
      Str summary;
      check(rl_report(cs.data(), cs.size(), report_out.c_str(), &summary.p), "report");
      std::cout << summary.get();
    }
  } catch (const Abort& a) {
    return a.code;
  }
  return kOk;
}
