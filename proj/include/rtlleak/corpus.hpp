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

// Instruction/code datasets: ingestion, locked dataset assembly, fine-tuning
// instruction variants, and leakage and quality prompt templates.

#ifndef RTLLEAK_CORPUS_HPP
#define RTLLEAK_CORPUS_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rtlleak/lock.hpp"
#include "rtlleak/util/io.hpp"

namespace rtlleak::corpus {

class SchemaError : public std::invalid_argument {
 public:
  SchemaError(size_t line, const std::string& msg)
      : std::invalid_argument("line " + std::to_string(line) + ": " + msg), line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

class MissingKeyMeta : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Origin { Base, Ip, LockedIp };

const char* to_string(Origin o);
Origin origin_from(const std::string& s);  // "base" | "ip" | "locked_ip"

struct KeyMeta {
  std::string key_name;
  uint32_t key_length = 0;
  std::string key_value_hex;  // "0x" + uppercase, zero-padded to the key width

  bool operator==(const KeyMeta&) const = default;
};

// "0x" + uppercase hex with ceil(width / 4) digits.
std::string render_key_value(const BitVec& v);
KeyMeta key_meta_of(const lock::KeySpec& key);

struct TrainPair {
  std::string id;
  std::string instruction;
  std::string code;
  Origin origin = Origin::Ip;
  std::optional<KeyMeta> key_meta;  // present iff origin == LockedIp
  bool parse_ok = false;
  std::string module;       // parsed module name, empty when parse fails
  std::string parse_error;  // reason when parse fails
  // Unrecognized record fields, kept as (name, serialized JSON value).
  std::vector<std::pair<std::string, std::string>> extra;

  bool operator==(const TrainPair&) const = default;
};

// One record per line with required string fields instruction and code.
// Optional: id, origin, key_name, key_length, key_value. Blank lines are
// skipped. Records without origin take default_origin; without id they get
// "<source>:<line>".
std::vector<TrainPair> parse_jsonl(const std::string& text, const std::string& source = "input",
                                   Origin default_origin = Origin::Ip);
std::vector<TrainPair> ingest_jsonl(const std::filesystem::path& path, Origin default_origin = Origin::Ip);

// Wraps every *.v file of a directory (sorted by name) as a pair whose
// instruction is describe_module() of the parsed code.
std::vector<TrainPair> ingest_verilog_dir(const std::filesystem::path& dir, Origin origin = Origin::Ip);
// One .v file as a pair with id equal to the file stem.
TrainPair ingest_verilog_file(const std::filesystem::path& file, Origin origin = Origin::Ip);

std::string to_jsonl(const std::vector<TrainPair>& pairs);

// Parses the code and fills parse_ok, module and parse_error.
void parse_check(TrainPair& p);

// "all-50", "const-100".
std::string strategy_label(const lock::LockStrategy& s);
// Inverse of strategy_label. Throws std::invalid_argument.
lock::LockStrategy parse_strategy(const std::string& label, uint64_t seed = 0,
                                  const std::string& key_port_name = "lock_key");

struct ModuleOutcome {
  std::string id;
  std::string module;
  bool locked = false;
  std::string reason;  // "none" | "no_sites" | "empty_selection" | "key_name_collision" | "parse_error"
  uint32_t key_width = 0;
  uint32_t sites_considered = 0;
  uint32_t sites_locked = 0;
};

struct CompatReport {
  std::string strategy;
  size_t locked_count = 0;
  size_t original_count = 0;
  std::vector<ModuleOutcome> modules;  // input order
};

struct LockedDataset {
  std::vector<TrainPair> pairs;       // same order and size as the input
  std::vector<std::string> key_files; // key file JSON per pair, empty for parse failures
  CompatReport report;
};

// Parseable pairs are locked; fallbacks and parse failures are kept in their
// original form with origin ip.
LockedDataset build_locked_dataset(const std::vector<TrainPair>& ip_pairs, const lock::LockStrategy& strategy);

std::string compat_report_json(const std::vector<CompatReport>& reports);
// Fixed-width "Locked / Original" table, one row per strategy.
std::string compat_table_text(const std::vector<CompatReport>& reports);

// "module names, ports, and high-level comments".
std::string describe_module(const hdl::AstModule& m);

enum class FtMode { WithKey, WithoutKey };

// WithKey appends the key port name and correct value and requires key
// metadata. WithoutKey removes every line that mentions the key name or value.
std::string emit_ft_instruction(const TrainPair& pair, FtMode mode);

enum class PromptStrategy { I, IK, IKL, IKV };

const char* to_string(PromptStrategy s);  // "I", "I+K", "I+K+L", "I+K+V"
PromptStrategy prompt_strategy_from(const std::string& tag);
const std::vector<PromptStrategy>& all_prompt_strategies();

// Append-only variants of the fine-tuning instruction. Pairs without key
// metadata collapse to I unless strict is set, in which case K/L/V throw
// MissingKeyMeta.
std::string build_leak_prompt(const TrainPair& pair, PromptStrategy s, bool strict = false);

// Optional summarizer: receives the fixed summarization request and returns
// the prompt text.
using Summarizer = std::function<std::string(const std::string& request)>;

// Precedence: sidecar human prompt for the module, then the summarizer, then
// the local template. A locked pair's key input is named without width or
// value.
std::string build_quality_prompt(const TrainPair& pair, const std::map<std::string, std::string>& human_prompts = {},
                                 const Summarizer& summarizer = nullptr);

// The request sent to a summarizer for a module.
std::string summarization_request(const TrainPair& pair);

// Local template: "Implement module `inv` with input a, output y. <comments>".
std::string local_quality_prompt(const hdl::AstModule& m, const std::string& key_port_name = "");

// JSON object mapping module name to prompt text.
std::map<std::string, std::string> load_human_prompts(const std::filesystem::path& path);

}  // namespace rtlleak::corpus

#endif  // RTLLEAK_CORPUS_HPP
