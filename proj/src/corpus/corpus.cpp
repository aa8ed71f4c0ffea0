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

#include "rtlleak/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <sstream>

#include "rtlleak/hdl/front.hpp"

namespace rtlleak::corpus {

using ojson = nlohmann::ordered_json;

const char* to_string(Origin o) {
  switch (o) {
    case Origin::Base: return "base";
    case Origin::Ip: return "ip";
    case Origin::LockedIp: return "locked_ip";
  }
  return "?";
}

Origin origin_from(const std::string& s) {
  if (s == "base") return Origin::Base;
  if (s == "ip") return Origin::Ip;
  if (s == "locked_ip") return Origin::LockedIp;
  throw std::invalid_argument("unknown origin: " + s);
}

std::string render_key_value(const BitVec& v) {
  std::string hex = v.to_hex();
  for (char& c : hex) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return "0x" + hex;
}

KeyMeta key_meta_of(const lock::KeySpec& key) {
  return KeyMeta{key.key_port_name, key.width, render_key_value(key.correct_value)};
}

void parse_check(TrainPair& p) {
  try {
    p.module = hdl::parse_module(p.code).name;
    p.parse_ok = true;
    p.parse_error.clear();
  } catch (const hdl::ParseError& e) {
    p.parse_ok = false;
    p.module.clear();
    p.parse_error = std::string(hdl::to_string(e.kind())) + ": " + e.what();
  }
}

namespace {

const char* const kKnownFields[] = {"id", "instruction", "code", "origin", "key_name", "key_length", "key_value", "parse_ok"};

bool is_known(const std::string& k) {
  return std::find(std::begin(kKnownFields), std::end(kKnownFields), k) != std::end(kKnownFields);
}

std::string require_string(const ojson& j, const char* field, size_t line) {
  auto it = j.find(field);
  if (it == j.end()) throw SchemaError(line, std::string("missing field \"") + field + "\"");
  if (!it->is_string()) throw SchemaError(line, std::string("field \"") + field + "\" must be a string");
  return it->get<std::string>();
}

}  // namespace

std::vector<TrainPair> parse_jsonl(const std::string& text, const std::string& source, Origin default_origin) {
  std::vector<TrainPair> out;
  std::istringstream in(text);
  std::string raw;
  size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.find_first_not_of(" \t") == std::string::npos) continue;
    ojson j;
    try {
      j = ojson::parse(raw);
    } catch (const ojson::parse_error& e) {
      throw SchemaError(line, std::string("malformed record: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError(line, "record is not an object");
    TrainPair p;
    p.instruction = require_string(j, "instruction", line);
    p.code = require_string(j, "code", line);
    p.id = j.contains("id") ? require_string(j, "id", line) : source + ":" + std::to_string(line);
    bool has_name = j.contains("key_name"), has_len = j.contains("key_length"), has_val = j.contains("key_value");
    if (has_name || has_len || has_val) {
      if (!(has_name && has_len && has_val))
        throw SchemaError(line, "key_name, key_length and key_value must appear together");
      KeyMeta k;
      k.key_name = require_string(j, "key_name", line);
      k.key_value_hex = require_string(j, "key_value", line);
      const auto& len = j["key_length"];
      if (!len.is_number_unsigned()) throw SchemaError(line, "key_length must be a non-negative integer");
      k.key_length = len.get<uint32_t>();
      p.key_meta = std::move(k);
    }
    if (j.contains("origin")) {
      try {
        p.origin = origin_from(require_string(j, "origin", line));
      } catch (const std::invalid_argument& e) {
        if (dynamic_cast<const SchemaError*>(&e)) throw;
        throw SchemaError(line, e.what());
      }
    } else {
      p.origin = p.key_meta ? Origin::LockedIp : default_origin;
    }
    if ((p.origin == Origin::LockedIp) != p.key_meta.has_value())
      throw SchemaError(line, "origin locked_ip requires key metadata and other origins forbid it");
    for (const auto& [k, v] : j.items())
      if (!is_known(k)) p.extra.emplace_back(k, v.dump());
    parse_check(p);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<TrainPair> ingest_jsonl(const std::filesystem::path& path, Origin default_origin) {
  return parse_jsonl(read_text_file(path), path.filename().string(), default_origin);
}

std::vector<TrainPair> ingest_verilog_dir(const std::filesystem::path& dir, Origin origin) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".v") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<TrainPair> out;
  for (const auto& f : files) out.push_back(ingest_verilog_file(f, origin));
  return out;
}

TrainPair ingest_verilog_file(const std::filesystem::path& file, Origin origin) {
  TrainPair p;
  p.id = file.stem().string();
  p.code = read_text_file(file);
  p.origin = origin;
  parse_check(p);
  p.instruction = p.parse_ok ? describe_module(hdl::parse_module(p.code))
                             : "Write the Verilog module stored in " + file.filename().string() + ".";
  return p;
}

std::string to_jsonl(const std::vector<TrainPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    ojson j;
    j["id"] = p.id;
    j["instruction"] = p.instruction;
    j["code"] = p.code;
    j["origin"] = to_string(p.origin);
    if (p.key_meta) {
      j["key_name"] = p.key_meta->key_name;
      j["key_length"] = p.key_meta->key_length;
      j["key_value"] = p.key_meta->key_value_hex;
    }
    j["parse_ok"] = p.parse_ok;
    for (const auto& [k, v] : p.extra) j[k] = ojson::parse(v);
    out += j.dump() + "\n";
  }
  return out;
}

std::string strategy_label(const lock::LockStrategy& s) {
  return std::string(s.scope == lock::Scope::All ? "all" : "const") + "-" + std::to_string(s.budget_pct);
}

lock::LockStrategy parse_strategy(const std::string& label, uint64_t seed, const std::string& key_port_name) {
  auto dash = label.find('-');
  if (dash == std::string::npos) throw std::invalid_argument("strategy must look like all-50 or const-100: " + label);
  std::string scope = label.substr(0, dash), pct = label.substr(dash + 1);
  lock::LockStrategy s;
  if (scope == "all") s.scope = lock::Scope::All;
  else if (scope == "const") s.scope = lock::Scope::ConstOnly;
  else throw std::invalid_argument("unknown lock scope: " + scope);
  if (pct.empty() || pct.size() > 3 || !std::all_of(pct.begin(), pct.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw std::invalid_argument("budget must be an integer percentage: " + label);
  s.budget_pct = static_cast<uint32_t>(std::stoul(pct));
  if (s.budget_pct < 1 || s.budget_pct > 100) throw std::invalid_argument("budget must be in 1..100: " + label);
  s.seed = seed;
  s.key_port_name = key_port_name;
  return s;
}

LockedDataset build_locked_dataset(const std::vector<TrainPair>& ip_pairs, const lock::LockStrategy& strategy) {
  LockedDataset ds;
  ds.report.strategy = strategy_label(strategy);
  for (const auto& in : ip_pairs) {
    TrainPair p = in;
    p.origin = Origin::Ip;
    p.key_meta.reset();
    ModuleOutcome o;
    o.id = p.id;
    std::string key_file;
    std::optional<hdl::AstModule> m;
    try {
      m = hdl::parse_module(p.code);
    } catch (const hdl::ParseError& e) {
      p.parse_ok = false;
      p.module.clear();
      p.parse_error = std::string(hdl::to_string(e.kind())) + ": " + e.what();
    }
    if (!m) {
      o.reason = "parse_error";
    } else {
      p.parse_ok = true;
      p.module = m->name;
      o.module = m->name;
      lock::LockResult r = lock::lock_module(*m, strategy);
      key_file = lock::key_file_json(r);
      o.sites_considered = r.report.sites_considered;
      if (r.report.locked) {
        p.code = hdl::print_module(r.locked);
        p.origin = Origin::LockedIp;
        p.key_meta = key_meta_of(r.key);
        o.locked = true;
        o.reason = "none";
        o.key_width = r.key.width;
        o.sites_locked = r.report.sites_locked;
      } else {
        o.reason = lock::to_string(r.report.reason);
      }
    }
    (o.locked ? ds.report.locked_count : ds.report.original_count)++;
    ds.report.modules.push_back(std::move(o));
    ds.key_files.push_back(std::move(key_file));
    ds.pairs.push_back(std::move(p));
  }
  return ds;
}

std::string compat_report_json(const std::vector<CompatReport>& reports) {
  ojson arr = ojson::array();
  for (const auto& r : reports) {
    ojson j;
    j["strategy"] = r.strategy;
    j["locked"] = r.locked_count;
    j["original"] = r.original_count;
    j["total"] = r.locked_count + r.original_count;
    ojson mods = ojson::array();
    for (const auto& m : r.modules) {
      ojson e;
      e["id"] = m.id;
      e["module"] = m.module;
      e["status"] = m.locked ? "Locked" : "Original";
      e["reason"] = m.reason;
      e["key_width"] = m.key_width;
      e["sites_considered"] = m.sites_considered;
      e["sites_locked"] = m.sites_locked;
      mods.push_back(std::move(e));
    }
    j["modules"] = std::move(mods);
    arr.push_back(std::move(j));
  }
  ojson root;
  root["schema"] = "rtlleak.compat/1";
  root["strategies"] = std::move(arr);
  return root.dump(2) + "\n";
}

std::string compat_table_text(const std::vector<CompatReport>& reports) {
  size_t w = std::string("Strategy").size();
  for (const auto& r : reports) w = std::max(w, r.strategy.size());
  auto pad = [&](const std::string& s) { return s + std::string(w - s.size() + 2, ' '); };
  std::string out = pad("Strategy") + "Locked / Original\n";
  for (const auto& r : reports)
    out += pad(r.strategy) + std::to_string(r.locked_count) + " / " + std::to_string(r.original_count) + "\n";
  bool any = false;
  for (const auto& r : reports)
    for (const auto& m : r.modules)
      if (!m.locked) {
        if (!any) out += "\nFallbacks (strategy module reason):\n";
        any = true;
        out += r.strategy + " " + (m.module.empty() ? m.id : m.module) + " " + m.reason + "\n";
      }
  return out;
}

namespace {

std::string port_phrase(const hdl::Port& p, const std::string& key_port_name) {
  std::string dir = p.dir == hdl::Direction::In ? "input" : p.dir == hdl::Direction::Out ? "output" : "inout";
  if (p.range && p.name != key_port_name)
    dir += " [" + hdl::print_expr(p.range->msb) + ":" + hdl::print_expr(p.range->lsb) + "]";
  return dir + " " + p.name;
}

std::string port_list(const hdl::AstModule& m, const std::string& key_port_name) {
  std::string out;
  for (size_t i = 0; i < m.ports.size(); ++i) {
    if (i) out += ", ";
    out += port_phrase(m.ports[i], key_port_name);
  }
  return out;
}

std::string comments(const hdl::AstModule& m) {
  std::string out;
  for (const auto& c : m.leading_comments) {
    if (!out.empty()) out += ' ';
    out += c;
  }
  return out;
}

bool contains_ci(const std::string& hay, const std::string& needle) {
  if (needle.empty()) return false;
  auto it = std::search(hay.begin(), hay.end(), needle.begin(), needle.end(), [](char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
  });
  return it != hay.end();
}

const KeyMeta& need_key(const TrainPair& p, const char* what) {
  if (!p.key_meta) throw MissingKeyMeta(std::string(what) + " needs key metadata but pair " + p.id + " is not locked");
  return *p.key_meta;
}

}  // namespace

std::string describe_module(const hdl::AstModule& m) {
  std::string out = "Write a Verilog module named `" + m.name + "` with ports: " + port_list(m, "") + ".";
  std::string c = comments(m);
  if (!c.empty()) out += " Description: " + c;
  return out;
}

std::string emit_ft_instruction(const TrainPair& pair, FtMode mode) {
  if (mode == FtMode::WithKey) {
    const KeyMeta& k = need_key(pair, "w/k instruction");
    return pair.instruction + "\nThe module has a key input `" + k.key_name + "`; the correct key value is " +
           k.key_value_hex + ".";
  }
  if (!pair.key_meta) return pair.instruction;
  const KeyMeta& k = *pair.key_meta;
  std::istringstream in(pair.instruction);
  std::string line, out;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.find(k.key_name) != std::string::npos || contains_ci(line, k.key_value_hex)) continue;
    if (!first) out += '\n';
    out += line;
    first = false;
  }
  return out;
}

const char* to_string(PromptStrategy s) {
  switch (s) {
    case PromptStrategy::I: return "I";
    case PromptStrategy::IK: return "I+K";
    case PromptStrategy::IKL: return "I+K+L";
    case PromptStrategy::IKV: return "I+K+V";
  }
  return "?";
}

PromptStrategy prompt_strategy_from(const std::string& tag) {
  for (auto s : all_prompt_strategies())
    if (tag == to_string(s)) return s;
  throw std::invalid_argument("unknown prompt strategy: " + tag);
}

const std::vector<PromptStrategy>& all_prompt_strategies() {
  static const std::vector<PromptStrategy> all = {PromptStrategy::I, PromptStrategy::IK, PromptStrategy::IKL,
                                                  PromptStrategy::IKV};
  return all;
}

std::string build_leak_prompt(const TrainPair& pair, PromptStrategy s, bool strict) {
  if (s == PromptStrategy::I) return pair.instruction;
  if (!pair.key_meta) {
    if (strict) need_key(pair, to_string(s));
    return pair.instruction;
  }
  const KeyMeta& k = *pair.key_meta;
  std::string out = pair.instruction + "\nThe module has a key input named `" + k.key_name + "`.";
  if (s == PromptStrategy::IKL) out += "\nThe key input is " + std::to_string(k.key_length) + " bits wide.";
  if (s == PromptStrategy::IKV) out += "\nThe correct key value is " + k.key_value_hex + ".";
  return out;
}

std::string local_quality_prompt(const hdl::AstModule& m, const std::string& key_port_name) {
  std::string out = "Implement module `" + m.name + "` with " + port_list(m, key_port_name) + ".";
  std::string c = comments(m);
  if (!c.empty()) out += " " + c;
  return out;
}

std::string summarization_request(const TrainPair& pair) {
  std::string out =
      "Summarize the following Verilog module as a short design prompt. Keep the module name, the port names and "
      "a high-level description of its function. Drop any further implementation details.";
  if (pair.key_meta)
    out += " Mention the key input `" + pair.key_meta->key_name + "` by name only, without its width or value.";
  return out + "\n\n" + pair.code;
}

std::string build_quality_prompt(const TrainPair& pair, const std::map<std::string, std::string>& human_prompts,
                                 const Summarizer& summarizer) {
  std::string module = pair.module;
  std::optional<hdl::AstModule> m;
  try {
    m = hdl::parse_module(pair.code);
    module = m->name;
  } catch (const hdl::ParseError&) {
  }
  if (auto it = human_prompts.find(module); !module.empty() && it != human_prompts.end()) return it->second;
  if (summarizer) return summarizer(summarization_request(pair));
  if (!m) return pair.instruction;
  return local_quality_prompt(*m, pair.key_meta ? pair.key_meta->key_name : "");
}

std::map<std::string, std::string> load_human_prompts(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(1, path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw SchemaError(1, path.string() + ": expected an object of module name to prompt");
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw SchemaError(1, path.string() + ": prompt for " + k + " must be a string");
    out[k] = v.get<std::string>();
  }
  return out;
}

}  // namespace rtlleak::corpus
