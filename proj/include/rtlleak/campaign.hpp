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

// Pipeline orchestration: corpus locking, fine-tuning dataset assembly,
// leakage and quality campaigns, and cross-campaign reports.

#ifndef RTLLEAK_CAMPAIGN_HPP
#define RTLLEAK_CAMPAIGN_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rtlleak/corpus.hpp"
#include "rtlleak/genclient.hpp"

namespace rtlleak::campaign {

using corpus::SchemaError;

constexpr const char* kResultsSchema = "rtlleak.results/1";
constexpr const char* kCampaignSchema = "rtlleak.campaign/1";

// A directory of *.v files, a single .v file, or a JSONL file of
// instruction/code records.
std::vector<corpus::TrainPair> load_pairs(const std::filesystem::path& path,
                                          corpus::Origin origin = corpus::Origin::Ip);

struct LockCorpusResult {
  std::vector<corpus::CompatReport> reports;
  std::vector<std::filesystem::path> files;  // written, sorted
};

// For each strategy writes <out>/<strategy>/<id>.v (locked or original) and
// <id>.key.json for parseable modules, then <out>/compat.json and
// <out>/compat.txt.
LockCorpusResult lock_corpus(const std::filesystem::path& input, const std::vector<std::string>& strategies,
                             uint64_t seed, const std::string& key_port_name, const std::filesystem::path& out_dir);

struct DatasetResult {
  size_t base = 0;
  size_t locked = 0;
  size_t original = 0;
  corpus::CompatReport report;
};

// Writes D_base followed by the IP pairs as JSONL. strategy "none" keeps the
// IP pairs unlocked; otherwise they are locked and their instructions emitted
// in the given mode.
DatasetResult build_dataset(const std::filesystem::path& ip, const std::optional<std::filesystem::path>& base,
                            const std::string& strategy, corpus::FtMode mode, uint64_t seed,
                            const std::string& key_port_name, const std::filesystem::path& out_file);

struct CampaignSpec {
  std::string name = "campaign";
  std::filesystem::path ip_corpus;
  std::optional<std::filesystem::path> base_corpus;
  std::optional<std::filesystem::path> human_prompts;
  std::vector<std::string> lock_strategies = {"none"};  // "none" or a strategy label
  std::vector<std::string> prompt_strategies = {"I", "I+K", "I+K+L", "I+K+V"};
  gen::GenerationConfig generation;                  // temperature is overridden per grid point
  std::vector<double> temperatures = {0.6, 0.8, 1.0};
  std::optional<gen::GenerationConfig> summarizer;   // quality prompts via an endpoint
  double leak_threshold = 0.6;
  double pass_threshold = 80.0;
  std::vector<int64_t> k_list = {1, 2, 5, 10};
  std::string normalization = "ident";
  std::string score_mode = "coverage";
  uint32_t fp_k = 17;
  uint32_t fp_w = 13;
  uint32_t equiv_budget_bits = 20;
  uint64_t equiv_vectors = 10000;
  uint64_t seed = 0;
  std::string key_port_name = "lock_key";
  std::filesystem::path output_dir = "results";
  std::filesystem::path cache_dir = ".rtlleak-cache";
  int max_in_flight = 4;
  int max_retries = 3;
  int timeout_s = 120;
};

// Relative paths resolve against the spec file's directory. Throws
// SchemaError for invalid content and IoError for missing paths.
CampaignSpec load_campaign_spec(const std::filesystem::path& path);
CampaignSpec parse_campaign_spec(const std::string& json, const std::filesystem::path& base_dir);
std::string campaign_spec_json(const CampaignSpec& spec);

struct RunOptions {
  bool offline = false;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::filesystem::path> cache_dir;
};

struct Failure {
  std::string lock_strategy;
  std::string prompt_strategy;
  std::string temperature;
  std::string module;
  std::string prompt_id;
  std::string kind;
  std::string message;
};

struct RunSummary {
  std::filesystem::path output_dir;
  size_t units = 0;     // prompts attempted
  size_t samples = 0;   // completions evaluated
  std::vector<Failure> failures;
  std::vector<std::string> files;  // relative to output_dir
};

// Both write manifest.json, records.csv, failures.json and the tables, even
// when some prompts fail. k outside 1..n raises DomainError before any
// generation.
RunSummary run_leakage(const CampaignSpec& spec, const RunOptions& opt = {});
RunSummary run_quality(const CampaignSpec& spec, const RunOptions& opt = {});

struct ReportSummary {
  std::vector<std::string> campaigns;
  size_t delta_rows = 0;
  std::vector<std::string> files;
};

// Pairwise %pt deltas between at least two result directories of the same
// kind and schema. Throws SchemaError otherwise.
ReportSummary report(const std::vector<std::filesystem::path>& result_dirs, const std::filesystem::path& out_dir);

}  // namespace rtlleak::campaign

#endif  // RTLLEAK_CAMPAIGN_HPP
