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

#include "rtlleak/campaign.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <map>
#include <set>

#include "rtlleak/equiv.hpp"
#include "rtlleak/evalkit.hpp"
#include "rtlleak/hdl/front.hpp"
#include "rtlleak/similarity.hpp"
#include "rtlleak/util/hash.hpp"
#include "rtlleak/util/io.hpp"

namespace rtlleak::campaign {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using eval::csv_row;
using eval::fmt_fixed;

std::vector<corpus::TrainPair> load_pairs(const fs::path& path, corpus::Origin origin) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) return corpus::ingest_verilog_dir(path, origin);
  if (path.extension() == ".v") return {corpus::ingest_verilog_file(path, origin)};
  return corpus::ingest_jsonl(path, origin);
}

namespace {

// Keeps ids usable as file names.
std::string file_stem(const std::string& id) {
  std::string out;
  for (char c : id) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.') ? c : '_';
  return out.empty() ? "unnamed" : out;
}

}  // namespace

LockCorpusResult lock_corpus(const fs::path& input, const std::vector<std::string>& strategies, uint64_t seed,
                             const std::string& key_port_name, const fs::path& out_dir) {
  auto pairs = load_pairs(input);
  LockCorpusResult res;
  std::vector<lock::LockStrategy> parsed;
  for (const auto& s : strategies) parsed.push_back(corpus::parse_strategy(s, seed, key_port_name));
  for (const auto& strategy : parsed) {
    auto ds = corpus::build_locked_dataset(pairs, strategy);
    fs::path dir = out_dir / ds.report.strategy;
    for (size_t i = 0; i < ds.pairs.size(); ++i) {
      std::string stem = file_stem(ds.pairs[i].id);
      write_file_atomic(dir / (stem + ".v"), ds.pairs[i].code);
      res.files.push_back(dir / (stem + ".v"));
      if (!ds.key_files[i].empty()) {
        write_file_atomic(dir / (stem + ".key.json"), ds.key_files[i]);
        res.files.push_back(dir / (stem + ".key.json"));
      }
    }
    res.reports.push_back(std::move(ds.report));
  }
  write_file_atomic(out_dir / "compat.json", corpus::compat_report_json(res.reports));
  write_file_atomic(out_dir / "compat.txt", corpus::compat_table_text(res.reports));
  res.files.push_back(out_dir / "compat.json");
  res.files.push_back(out_dir / "compat.txt");
  std::sort(res.files.begin(), res.files.end());
  return res;
}

DatasetResult build_dataset(const fs::path& ip, const std::optional<fs::path>& base, const std::string& strategy,
                            corpus::FtMode mode, uint64_t seed, const std::string& key_port_name,
                            const fs::path& out_file) {
  DatasetResult res;
  std::vector<corpus::TrainPair> out;
  if (base) {
    out = load_pairs(*base, corpus::Origin::Base);
    res.base = out.size();
  }
  auto ip_pairs = load_pairs(ip, corpus::Origin::Ip);
  if (strategy == "none") {
    res.original = ip_pairs.size();
    res.report.strategy = "none";
    res.report.original_count = ip_pairs.size();
    out.insert(out.end(), ip_pairs.begin(), ip_pairs.end());
  } else {
    auto ds = corpus::build_locked_dataset(ip_pairs, corpus::parse_strategy(strategy, seed, key_port_name));
    res.locked = ds.report.locked_count;
    res.original = ds.report.original_count;
    res.report = ds.report;
    for (auto& p : ds.pairs) {
      // Only the instruction differs between modes; key metadata stays in the record.
      if (p.key_meta) p.instruction = corpus::emit_ft_instruction(p, mode);
      out.push_back(std::move(p));
    }
  }
  write_file_atomic(out_file, corpus::to_jsonl(out));
  return res;
}

// Campaign spec

namespace {

template <typename T>
T field(const nlohmann::json& j, const char* name, const T& fallback) {
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(1, std::string("campaign field \"") + name + "\" has the wrong type");
  }
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

gen::GenerationConfig gen_config(const nlohmann::json& g, gen::GenerationConfig c) {
  c.endpoint = field(g, "endpoint", c.endpoint);
  c.model = field(g, "model", c.model);
  c.top_p = field(g, "top_p", c.top_p);
  c.n_samples = field(g, "n_samples", c.n_samples);
  c.max_tokens = field(g, "max_tokens", c.max_tokens);
  c.temperature = field(g, "temperature", c.temperature);
  if (g.contains("seed") && !g["seed"].is_null()) c.seed = field<uint64_t>(g, "seed", 0);
  return c;
}

}  // namespace

CampaignSpec parse_campaign_spec(const std::string& text, const fs::path& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(1, std::string("campaign spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError(1, "campaign spec must be an object");
  std::string schema = field<std::string>(j, "schema", kCampaignSchema);
  if (schema != kCampaignSchema) throw SchemaError(1, "unsupported campaign schema " + schema);
  CampaignSpec s;
  s.name = field(j, "name", s.name);
  const auto corpus_j = field<nlohmann::json>(j, "corpus", nlohmann::json::object());
  if (!corpus_j.contains("ip")) throw SchemaError(1, "corpus.ip is required");
  s.ip_corpus = resolve(base_dir, field<std::string>(corpus_j, "ip", ""));
  if (corpus_j.contains("base")) s.base_corpus = resolve(base_dir, field<std::string>(corpus_j, "base", ""));
  if (corpus_j.contains("human_prompts"))
    s.human_prompts = resolve(base_dir, field<std::string>(corpus_j, "human_prompts", ""));
  s.lock_strategies = field(j, "lock_strategies", s.lock_strategies);
  s.prompt_strategies = field(j, "prompt_strategies", s.prompt_strategies);
  const auto g = field<nlohmann::json>(j, "generation", nlohmann::json::object());
  s.generation = gen_config(g, s.generation);
  s.temperatures = field(g, "temperatures", s.temperatures);
  s.max_in_flight = field(g, "max_in_flight", s.max_in_flight);
  s.max_retries = field(g, "max_retries", s.max_retries);
  s.timeout_s = field(g, "timeout_s", s.timeout_s);
  if (j.contains("summarizer") && !j["summarizer"].is_null()) {
    gen::GenerationConfig sc;
    sc.n_samples = 1;
    s.summarizer = gen_config(j["summarizer"], sc);
  }
  const auto t = field<nlohmann::json>(j, "thresholds", nlohmann::json::object());
  s.leak_threshold = field(t, "leak_ss", s.leak_threshold);
  s.pass_threshold = field(t, "pass_eq", s.pass_threshold);
  s.k_list = field(j, "k_list", s.k_list);
  const auto sim_j = field<nlohmann::json>(j, "similarity", nlohmann::json::object());
  s.normalization = field(sim_j, "normalization", s.normalization);
  s.score_mode = field(sim_j, "mode", s.score_mode);
  s.fp_k = field(sim_j, "k", s.fp_k);
  s.fp_w = field(sim_j, "w", s.fp_w);
  const auto eq_j = field<nlohmann::json>(j, "equiv", nlohmann::json::object());
  s.equiv_budget_bits = field(eq_j, "budget_bits", s.equiv_budget_bits);
  s.equiv_vectors = field(eq_j, "n_vectors", s.equiv_vectors);
  s.seed = field(j, "seed", s.seed);
  s.key_port_name = field(j, "key_port_name", s.key_port_name);
  s.output_dir = resolve(base_dir, field<std::string>(j, "output_dir", s.output_dir.string()));
  s.cache_dir = resolve(base_dir, field<std::string>(j, "cache_dir", s.cache_dir.string()));

  // Validation.
  auto fail = [](const std::string& m) { throw SchemaError(1, m); };
  if (s.lock_strategies.empty()) fail("lock_strategies is empty");
  for (const auto& l : s.lock_strategies) {
    if (l == "none") continue;
    try {
      corpus::parse_strategy(l);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  if (s.prompt_strategies.empty()) fail("prompt_strategies is empty");
  for (const auto& p : s.prompt_strategies) {
    try {
      corpus::prompt_strategy_from(p);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  if (s.temperatures.empty()) fail("generation.temperatures is empty");
  for (double temp : s.temperatures) {
    gen::GenerationConfig c = s.generation;
    c.temperature = temp;
    try {
      c.validate();
    } catch (const gen::ConfigError& e) {
      fail(e.what());
    }
  }
  if (s.normalization != "ident" && s.normalization != "raw") fail("similarity.normalization must be ident or raw");
  if (s.score_mode != "coverage" && s.score_mode != "jaccard") fail("similarity.mode must be coverage or jaccard");
  if (s.fp_k < 1 || s.fp_w < 1) fail("similarity.k and similarity.w must be >= 1");
  if (s.k_list.empty()) fail("k_list is empty");
  if (s.max_in_flight < 1) fail("generation.max_in_flight must be >= 1");
  std::error_code ec;
  if (!fs::exists(s.ip_corpus, ec)) throw IoError("corpus.ip does not exist: " + s.ip_corpus.string());
  if (s.base_corpus && !fs::exists(*s.base_corpus, ec))
    throw IoError("corpus.base does not exist: " + s.base_corpus->string());
  if (s.human_prompts && !fs::exists(*s.human_prompts, ec))
    throw IoError("corpus.human_prompts does not exist: " + s.human_prompts->string());
  return s;
}

CampaignSpec load_campaign_spec(const fs::path& path) {
  return parse_campaign_spec(read_text_file(path), fs::absolute(path).parent_path());
}

std::string campaign_spec_json(const CampaignSpec& s) {
  auto gen_j = [](const gen::GenerationConfig& c) {
    ojson g;
    g["endpoint"] = c.endpoint;
    g["model"] = c.model;
    g["top_p"] = c.top_p;
    g["n_samples"] = c.n_samples;
    g["max_tokens"] = c.max_tokens;
    g["seed"] = c.seed ? ojson(*c.seed) : ojson(nullptr);
    return g;
  };
  ojson j;
  j["schema"] = kCampaignSchema;
  j["name"] = s.name;
  j["corpus"]["ip"] = s.ip_corpus.string();
  if (s.base_corpus) j["corpus"]["base"] = s.base_corpus->string();
  if (s.human_prompts) j["corpus"]["human_prompts"] = s.human_prompts->string();
  j["lock_strategies"] = s.lock_strategies;
  j["prompt_strategies"] = s.prompt_strategies;
  j["generation"] = gen_j(s.generation);
  j["generation"]["temperatures"] = s.temperatures;
  j["generation"]["max_in_flight"] = s.max_in_flight;
  j["generation"]["max_retries"] = s.max_retries;
  j["generation"]["timeout_s"] = s.timeout_s;
  j["summarizer"] = s.summarizer ? gen_j(*s.summarizer) : ojson(nullptr);
  j["thresholds"] = {{"leak_ss", s.leak_threshold}, {"pass_eq", s.pass_threshold}};
  j["k_list"] = s.k_list;
  j["similarity"] = {{"normalization", s.normalization}, {"mode", s.score_mode}, {"k", s.fp_k}, {"w", s.fp_w}};
  j["equiv"] = {{"budget_bits", s.equiv_budget_bits}, {"n_vectors", s.equiv_vectors}};
  j["seed"] = s.seed;
  j["key_port_name"] = s.key_port_name;
  j["output_dir"] = s.output_dir.string();
  j["cache_dir"] = s.cache_dir.string();
  return j.dump(2) + "\n";
}

// Campaign runs

namespace {

struct Golden {
  corpus::TrainPair pair;
  hdl::AstModule module;
  sim::FingerprintSet fp_ident;
  sim::FingerprintSet fp_raw;
};

struct SampleEval {
  bool extract_ok = false;
  double ss_ident = 0;
  double ss_raw = 0;
  double eq = 0;
};

std::string temp_label(double t) { return fmt_fixed(t, 2); }

class Runner {
 public:
  Runner(const CampaignSpec& spec, const RunOptions& opt, const std::string& kind)
      : spec_(spec), kind_(kind), out_dir_(opt.output_dir ? *opt.output_dir : spec.output_dir) {
    gen::ClientOptions co;
    co.cache_dir = opt.cache_dir ? *opt.cache_dir : spec.cache_dir;
    co.offline = opt.offline;
    co.max_in_flight = spec.max_in_flight;
    co.max_retries = spec.max_retries;
    co.timeout_s = spec.timeout_s;
    client_ = std::make_unique<gen::Client>(co);
    norm_ = sim::normalization_from(spec.normalization);
    mode_ = spec.score_mode == "jaccard" ? sim::ScoreMode::Jaccard : sim::ScoreMode::Coverage;
    pairs_ = load_pairs(spec.ip_corpus);
    for (const auto& p : pairs_)
      if (!p.parse_ok) skipped_.push_back(p);
    if (spec.human_prompts) human_ = corpus::load_human_prompts(*spec.human_prompts);
  }

  // Parseable goldens for a lock strategy, in corpus order.
  std::vector<Golden> goldens(const std::string& lock_label) {
    std::vector<corpus::TrainPair> src;
    if (lock_label == "none") {
      src = pairs_;
    } else {
      auto ds = corpus::build_locked_dataset(pairs_, corpus::parse_strategy(lock_label, spec_.seed, spec_.key_port_name));
      compat_.push_back(ds.report);
      src = std::move(ds.pairs);
    }
    std::vector<Golden> out;
    for (auto& p : src) {
      if (!p.parse_ok) continue;
      Golden g;
      g.module = hdl::parse_module(p.code);
      g.fp_ident = sim::fingerprint(sim::tokenize(g.module, sim::Normalization::IdentNormalized), spec_.fp_k, spec_.fp_w);
      g.fp_raw = sim::fingerprint(sim::tokenize(g.module, sim::Normalization::Raw), spec_.fp_k, spec_.fp_w);
      g.pair = std::move(p);
      out.push_back(std::move(g));
    }
    return out;
  }

  void set_mock_corpus(const std::vector<Golden>& gs) {
    gen::MockCorpus mc;
    for (const auto& g : gs) mc[g.module.name] = g.pair.code;
    client_->set_mock_corpus(std::move(mc));
  }

  gen::GenerationConfig config_at(double t) const {
    gen::GenerationConfig c = spec_.generation;
    c.temperature = t;
    return c;
  }

  std::vector<gen::Outcome> generate(const std::vector<gen::PromptRef>& prompts, const gen::GenerationConfig& cfg) {
    units_ += prompts.size();
    return client_->generate_many(prompts, cfg);
  }

  // Memoized on (completion, golden).
  const SampleEval& evaluate(const std::string& completion, const Golden& g) {
    std::string key = sha256_hex(completion) + "|" + sha256_hex(g.pair.code);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    SampleEval e;
    try {
      hdl::AstModule gen = hdl::extract_module_from_completion(completion);
      e.extract_ok = true;
      auto fi = sim::fingerprint(sim::tokenize(gen, sim::Normalization::IdentNormalized), spec_.fp_k, spec_.fp_w);
      auto fr = sim::fingerprint(sim::tokenize(gen, sim::Normalization::Raw), spec_.fp_k, spec_.fp_w);
      e.ss_ident = sim::score(fi, g.fp_ident, mode_).ss;
      e.ss_raw = sim::score(fr, g.fp_raw, mode_).ss;
      equiv::EquivOptions eo;
      eo.budget_bits = spec_.equiv_budget_bits;
      eo.n_vectors = spec_.equiv_vectors;
      eo.seed = spec_.seed;
      e.eq = equiv::check_equivalence(gen, g.module, eo).eq;
    } catch (const hdl::ExtractError&) {
      e = SampleEval{};
    }
    return memo_.emplace(key, e).first->second;
  }

  double primary_ss(const SampleEval& e) const {
    return norm_ == sim::Normalization::Raw ? e.ss_raw : e.ss_ident;
  }

  void fail(Failure f) { failures_.push_back(std::move(f)); }

  void write(const std::string& name, const std::string& data) {
    write_file_atomic(out_dir_ / name, data);
    files_.push_back(name);
  }

  RunSummary finish(size_t samples, const ojson& extra) {
    for (const auto& p : skipped_)
      failures_.push_back({"*", "*", "*", p.id, p.id, "parse_error", p.parse_error});
    ojson fails = ojson::array();
    for (const auto& f : failures_)
      fails.push_back({{"lock_strategy", f.lock_strategy},
                       {"prompt_strategy", f.prompt_strategy},
                       {"temperature", f.temperature},
                       {"module", f.module},
                       {"prompt_id", f.prompt_id},
                       {"kind", f.kind},
                       {"message", f.message}});
    write("failures.json", fails.dump(2) + "\n");
    if (!compat_.empty()) write("compat.json", corpus::compat_report_json(compat_));
    ojson m;
    m["schema"] = kResultsSchema;
    m["kind"] = kind_;
    m["name"] = spec_.name;
    m["spec_sha256"] = sha256_hex(campaign_spec_json(spec_));
    ojson hashes = ojson::object();
    for (double t : spec_.temperatures) hashes[temp_label(t)] = config_at(t).hash();
    m["config_hashes"] = hashes;
    m["lock_strategies"] = spec_.lock_strategies;
    m["temperatures"] = spec_.temperatures;
    m["n_samples"] = spec_.generation.n_samples;
    m["thresholds"] = {{"leak_ss", spec_.leak_threshold}, {"pass_eq", spec_.pass_threshold}};
    m["normalization"] = spec_.normalization;
    m["modules"] = pairs_.size() - skipped_.size();
    m["units"] = units_;
    m["samples"] = samples;
    m["failures"] = failures_.size();
    for (const auto& [k, v] : extra.items()) m[k] = v;
    std::vector<std::string> files = files_;
    files.push_back("manifest.json");
    std::sort(files.begin(), files.end());
    m["files"] = files;
    write("manifest.json", m.dump(2) + "\n");
    RunSummary s;
    s.output_dir = out_dir_;
    s.units = units_;
    s.samples = samples;
    s.failures = failures_;
    s.files = files;
    return s;
  }

  const CampaignSpec& spec_;
  std::string kind_;
  fs::path out_dir_;
  std::unique_ptr<gen::Client> client_;
  sim::Normalization norm_;
  sim::ScoreMode mode_;
  std::vector<corpus::TrainPair> pairs_;
  std::vector<corpus::TrainPair> skipped_;
  std::map<std::string, std::string> human_;
  std::vector<corpus::CompatReport> compat_;
  std::map<std::string, SampleEval> memo_;
  std::vector<Failure> failures_;
  std::vector<std::string> files_;
  size_t units_ = 0;
};

void check_k(const CampaignSpec& spec) {
  for (int64_t k : spec.k_list)
    if (k < 1 || k > spec.generation.n_samples)
      throw eval::DomainError("k=" + std::to_string(k) + " is outside 1.." + std::to_string(spec.generation.n_samples));
}

}  // namespace

RunSummary run_leakage(const CampaignSpec& spec, const RunOptions& opt) {
  Runner r(spec, opt, "leakage");
  std::string records = csv_row({"lock_strategy", "prompt_strategy", "temperature", "module", "sample_id",
                                 "extract_ok", "ss", "ss_ident", "ss_raw", "eq", "leaky", "pass"});
  std::string table = csv_row({"lock_strategy", "prompt_strategy", "temperature", "modules", "samples", "ss_mean",
                               "ast_pass_rate", "eq_mean", "eq_max"});
  std::vector<std::string> metric_names = {"ast_pass_rate", "eq_mean", "eq_max"};
  std::vector<std::string> header = {"lock_strategy", "temperature", "metric"};
  header.insert(header.end(), spec.prompt_strategies.begin(), spec.prompt_strategies.end());
  std::string matrix = csv_row(header);
  std::vector<eval::Bar> bars;
  size_t samples = 0;

  for (const auto& lock_label : spec.lock_strategies) {
    auto gs = r.goldens(lock_label);
    r.set_mock_corpus(gs);
    for (double t : spec.temperatures) {
      const std::string tl = temp_label(t);
      std::vector<gen::PromptRef> prompts;
      for (const auto& ps : spec.prompt_strategies)
        for (const auto& g : gs)
          prompts.push_back({lock_label + "/" + ps + "/" + g.module.name,
                             corpus::build_leak_prompt(g.pair, corpus::prompt_strategy_from(ps)), g.module.name});
      auto outcomes = r.generate(prompts, r.config_at(t));
      std::map<std::string, std::vector<std::string>> cells;  // metric -> per prompt strategy values
      for (size_t pi = 0; pi < spec.prompt_strategies.size(); ++pi) {
        const std::string& ps = spec.prompt_strategies[pi];
        std::vector<eval::EvalRecord> recs;
        std::map<std::string, std::vector<double>> ss_by_module;
        for (size_t gi = 0; gi < gs.size(); ++gi) {
          size_t idx = pi * gs.size() + gi;
          const auto& o = outcomes[idx];
          const auto& g = gs[gi];
          if (!o.batch) {
            r.fail({lock_label, ps, tl, g.module.name, prompts[idx].id, o.error_kind, o.error});
            continue;
          }
          for (size_t si = 0; si < o.batch->completions.size(); ++si) {
            const SampleEval& e = r.evaluate(o.batch->completions[si], g);
            eval::EvalRecord rec;
            rec.module = g.module.name;
            rec.strategy = ps;
            rec.sample_id = static_cast<int>(si);
            rec.ss = r.primary_ss(e);
            rec.eq = e.eq;
            rec.leaky = sim::classify_leak(rec.ss, spec.leak_threshold);
            rec.pass = eval::classify_pass(rec.eq, spec.pass_threshold);
            ss_by_module[rec.module].push_back(rec.ss);
            records += csv_row({lock_label, ps, tl, rec.module, std::to_string(si), e.extract_ok ? "1" : "0",
                                fmt_fixed(rec.ss, 4), fmt_fixed(e.ss_ident, 4), fmt_fixed(e.ss_raw, 4),
                                fmt_fixed(rec.eq, 2), rec.leaky ? "1" : "0", rec.pass ? "1" : "0"});
            recs.push_back(std::move(rec));
            ++samples;
          }
        }
        if (recs.empty()) {
          for (const auto& mn : metric_names) cells[mn].push_back("");
          continue;
        }
        auto row = eval::leakage_table(recs).at(0);
        double ss_mean = equiv::eq_aggregate(ss_by_module, equiv::Reduction::Mean);
        table += csv_row({lock_label, ps, tl, std::to_string(row.modules), std::to_string(row.samples),
                          fmt_fixed(ss_mean, 4), fmt_fixed(row.ast_pass_rate, 2), fmt_fixed(row.eq_mean, 2),
                          fmt_fixed(row.eq_max, 2)});
        cells["ast_pass_rate"].push_back(fmt_fixed(row.ast_pass_rate, 2));
        cells["eq_mean"].push_back(fmt_fixed(row.eq_mean, 2));
        cells["eq_max"].push_back(fmt_fixed(row.eq_max, 2));
        bars.push_back({lock_label + " " + ps + " t=" + tl, row.eq_mean});
      }
      for (const auto& mn : metric_names) {
        std::vector<std::string> line = {lock_label, tl, mn};
        line.insert(line.end(), cells[mn].begin(), cells[mn].end());
        matrix += csv_row(line);
      }
    }
  }
  r.write("records.csv", records);
  r.write("leakage.csv", table);
  r.write("leakage_matrix.csv", matrix);
  r.write("leakage.svg", eval::render_bar_chart(spec.name + ": eq_mean [%]", bars));
  return r.finish(samples, ojson::object({{"prompt_strategies", spec.prompt_strategies}}));
}

RunSummary run_quality(const CampaignSpec& spec, const RunOptions& opt) {
  check_k(spec);
  Runner r(spec, opt, "quality");
  std::string records =
      csv_row({"lock_strategy", "temperature", "module", "sample_id", "extract_ok", "eq", "pass"});
  std::string table = csv_row({"lock_strategy", "temperature", "k", "pass_at_k"});
  std::vector<eval::Bar> bars;
  size_t samples = 0;

  corpus::Summarizer summarizer;
  if (spec.summarizer) {
    summarizer = [&](const std::string& request) {
      return r.client_->generate({"summary", request, ""}, *spec.summarizer).completions.at(0);
    };
  }

  for (const auto& lock_label : spec.lock_strategies) {
    auto gs = r.goldens(lock_label);
    r.set_mock_corpus(gs);
    std::vector<std::string> prompt_text(gs.size());
    std::vector<std::string> prompt_error(gs.size());
    for (size_t gi = 0; gi < gs.size(); ++gi) {
      try {
        prompt_text[gi] = corpus::build_quality_prompt(gs[gi].pair, r.human_, summarizer);
      } catch (const std::exception& e) {
        prompt_error[gi] = e.what();
      }
    }
    for (double t : spec.temperatures) {
      const std::string tl = temp_label(t);
      std::vector<gen::PromptRef> prompts;
      std::vector<size_t> owner;
      for (size_t gi = 0; gi < gs.size(); ++gi) {
        if (!prompt_error[gi].empty()) {
          r.fail({lock_label, "Q", tl, gs[gi].module.name, lock_label + "/Q/" + gs[gi].module.name, "summarizer",
                  prompt_error[gi]});
          continue;
        }
        prompts.push_back({lock_label + "/Q/" + gs[gi].module.name, prompt_text[gi], gs[gi].module.name});
        owner.push_back(gi);
      }
      auto outcomes = r.generate(prompts, r.config_at(t));
      std::vector<eval::EvalRecord> recs;
      for (size_t i = 0; i < outcomes.size(); ++i) {
        const auto& g = gs[owner[i]];
        const auto& o = outcomes[i];
        if (!o.batch) {
          r.fail({lock_label, "Q", tl, g.module.name, prompts[i].id, o.error_kind, o.error});
          continue;
        }
        for (size_t si = 0; si < o.batch->completions.size(); ++si) {
          const SampleEval& e = r.evaluate(o.batch->completions[si], g);
          eval::EvalRecord rec;
          rec.module = g.module.name;
          rec.strategy = lock_label;
          rec.sample_id = static_cast<int>(si);
          rec.eq = e.eq;
          rec.pass = eval::classify_pass(rec.eq, spec.pass_threshold);
          records += csv_row({lock_label, tl, rec.module, std::to_string(si), e.extract_ok ? "1" : "0",
                              fmt_fixed(rec.eq, 2), rec.pass ? "1" : "0"});
          recs.push_back(std::move(rec));
          ++samples;
        }
      }
      if (recs.empty()) continue;
      for (const auto& row : eval::quality_table(recs, spec.k_list)) {
        table += csv_row({lock_label, tl, std::to_string(row.k), fmt_fixed(row.pass_at_k_pct, 2)});
        bars.push_back({lock_label + " t=" + tl + " pass@" + std::to_string(row.k), row.pass_at_k_pct});
      }
    }
  }
  r.write("records.csv", records);
  r.write("quality.csv", table);
  r.write("quality.svg", eval::render_bar_chart(spec.name + ": pass@(k, eq) [%]", bars));
  return r.finish(samples, ojson::object({{"k_list", spec.k_list}}));
}

// Reports

namespace {

struct Loaded {
  std::string name;
  std::string kind;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Loaded load_results(const fs::path& dir) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(1, (dir / "manifest.json").string() + ": " + e.what());
  }
  std::string schema = m.value("schema", "");
  if (schema != kResultsSchema)
    throw SchemaError(1, dir.string() + " has results schema \"" + schema + "\", expected " + kResultsSchema);
  Loaded l;
  l.kind = m.value("kind", "");
  l.name = m.value("name", dir.filename().string());
  if (l.kind != "leakage" && l.kind != "quality") throw SchemaError(1, dir.string() + " has unknown kind " + l.kind);
  auto rows = eval::csv_parse(read_text_file(dir / (l.kind + ".csv")));
  if (rows.empty()) throw SchemaError(1, dir.string() + ": empty " + l.kind + ".csv");
  l.header = rows.front();
  l.rows.assign(rows.begin() + 1, rows.end());
  for (const auto& r : l.rows)
    if (r.size() != l.header.size()) throw SchemaError(1, dir.string() + ": ragged " + l.kind + ".csv");
  return l;
}

size_t col(const Loaded& l, const std::string& name) {
  auto it = std::find(l.header.begin(), l.header.end(), name);
  if (it == l.header.end()) throw SchemaError(1, "column " + name + " missing in results of " + l.name);
  return static_cast<size_t>(it - l.header.begin());
}

double num(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw SchemaError(1, "not a number: \"" + s + "\"");
  }
}

}  // namespace

ReportSummary report(const std::vector<fs::path>& dirs, const fs::path& out_dir) {
  if (dirs.size() < 2) throw SchemaError(1, "report needs at least two result directories");
  std::vector<Loaded> all;
  for (const auto& d : dirs) all.push_back(load_results(d));
  for (const auto& l : all)
    if (l.kind != all.front().kind)
      throw SchemaError(1, "cannot compare " + all.front().kind + " results with " + l.kind + " results");
  const bool leak = all.front().kind == "leakage";
  std::vector<std::string> keys = leak ? std::vector<std::string>{"prompt_strategy", "temperature"}
                                       : std::vector<std::string>{"temperature", "k"};
  std::vector<std::string> metrics =
      leak ? std::vector<std::string>{"ast_pass_rate", "eq_mean", "eq_max"} : std::vector<std::string>{"pass_at_k"};

  std::vector<std::string> dh = {"campaign_a", "campaign_b", "lock_a", "lock_b"};
  dh.insert(dh.end(), keys.begin(), keys.end());
  dh.insert(dh.end(), {"metric", "value_a", "value_b", "delta_pp"});
  std::string deltas = csv_row(dh);
  std::vector<eval::Bar> bars;
  ReportSummary s;
  for (const auto& l : all) s.campaigns.push_back(l.name);

  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = i + 1; j < all.size(); ++j) {
      const Loaded &a = all[i], &b = all[j];
      for (const auto& ra : a.rows)
        for (const auto& rb : b.rows) {
          bool same = true;
          for (const auto& k : keys) same = same && ra[col(a, k)] == rb[col(b, k)];
          if (!same) continue;
          for (const auto& m : metrics) {
            const std::string &va = ra[col(a, m)], &vb = rb[col(b, m)];
            if (va.empty() || vb.empty()) continue;
            double d = eval::delta_pp(num(va), num(vb));
            std::vector<std::string> line = {a.name, b.name, ra[col(a, "lock_strategy")], rb[col(b, "lock_strategy")]};
            for (const auto& k : keys) line.push_back(ra[col(a, k)]);
            line.insert(line.end(), {m, va, vb, fmt_fixed(d, 2)});
            deltas += csv_row(line);
            ++s.delta_rows;
            std::string label = line[2] + " vs " + line[3];
            for (const auto& k : keys) label += " " + ra[col(a, k)];
            bars.push_back({label + " " + m, std::abs(d)});
          }
        }
    }

  std::vector<std::string> ch = {"campaign"};
  ch.insert(ch.end(), all.front().header.begin(), all.front().header.end());
  std::string consolidated = csv_row(ch);
  for (const auto& l : all) {
    if (l.header != all.front().header) throw SchemaError(1, "column layout differs in results of " + l.name);
    for (const auto& r : l.rows) {
      std::vector<std::string> line = {l.name};
      line.insert(line.end(), r.begin(), r.end());
      consolidated += csv_row(line);
    }
  }
  write_file_atomic(out_dir / "deltas.csv", deltas);
  write_file_atomic(out_dir / "consolidated.csv", consolidated);
  write_file_atomic(out_dir / "deltas.svg", eval::render_bar_chart("|delta| [%pt]", bars));
  s.files = {"consolidated.csv", "deltas.csv", "deltas.svg"};
  return s;
}

}  // namespace rtlleak::campaign
