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

// Key file serialization.

#include <json.hpp>

#include "rtlleak/lock.hpp"

namespace rtlleak::lock {

namespace {

SiteKind site_kind_from(const std::string& s) {
  if (s == "Constant") return SiteKind::Constant;
  if (s == "Branch") return SiteKind::Branch;
  if (s == "Operation") return SiteKind::Operation;
  throw std::invalid_argument("unknown site_kind: " + s);
}

}  // namespace

std::string key_file_json(const LockResult& r) {
  nlohmann::ordered_json j;
  j["module"] = r.report.module;
  j["key_port_name"] = r.key.key_port_name;
  j["width"] = r.key.width;
  j["correct_value"] = r.key.width ? r.key.correct_value.to_hex() : "";
  auto& bindings = j["bindings"] = nlohmann::ordered_json::array();
  for (const auto& b : r.key.bindings) {
    nlohmann::ordered_json e;
    e["site_kind"] = to_string(b.site.kind);
    e["ast_path"] = b.site.ast_path;
    e["bit_lo"] = b.bit_lo;
    e["bit_hi"] = b.bit_hi;
    e["site_id"] = b.site.id;
    if (!b.site.op.empty()) e["op"] = b.site.op;
    bindings.push_back(std::move(e));
  }
  j["status"] = r.report.locked ? "Locked" : "FallbackOriginal";
  j["reason"] = to_string(r.report.reason);
  j["sites_considered"] = r.report.sites_considered;
  j["sites_locked"] = r.report.sites_locked;
  return j.dump(2) + "\n";
}

KeySpec parse_key_file(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  KeySpec k;
  k.key_port_name = j.at("key_port_name").get<std::string>();
  k.width = j.at("width").get<uint32_t>();
  std::string hex = j.at("correct_value").get<std::string>();
  k.correct_value = k.width ? BitVec::from_hex(k.width, hex) : BitVec();
  for (const auto& e : j.at("bindings")) {
    KeyBinding b;
    b.site.kind = site_kind_from(e.at("site_kind").get<std::string>());
    b.site.ast_path = e.at("ast_path").get<std::string>();
    b.bit_lo = e.at("bit_lo").get<uint32_t>();
    b.bit_hi = e.at("bit_hi").get<uint32_t>();
    b.site.bit_cost = b.bit_hi - b.bit_lo + 1;
    b.site.id = e.value("site_id", 0);
    b.site.op = e.value("op", std::string());
    k.bindings.push_back(std::move(b));
  }
  return k;
}

}  // namespace rtlleak::lock
