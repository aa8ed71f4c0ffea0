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

// Key-based RTL locking of constants, branches and operations.
//
// A constant of width c becomes a c-bit slice of the key port. A branch
// condition is XORed with one key bit, optionally inverted first. A binary
// operation is muxed against a dummy operation by one key bit.

#ifndef RTLLEAK_LOCK_HPP
#define RTLLEAK_LOCK_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtlleak/bitvec.hpp"
#include "rtlleak/hdl/ast.hpp"

namespace rtlleak::lock {

enum class SiteKind { Constant, Branch, Operation };
enum class Scope { All, ConstOnly };

const char* to_string(SiteKind k);

struct LockSite {
  int id = 0;  // pre-order ordinal
  SiteKind kind = SiteKind::Constant;
  std::string ast_path;  // e.g. items[2].body.body[0].cond
  uint32_t bit_cost = 1;
  std::string op;  // operator for Operation sites

  bool operator==(const LockSite&) const = default;
};

struct KeyBinding {
  LockSite site;
  uint32_t bit_lo = 0;
  uint32_t bit_hi = 0;

  bool operator==(const KeyBinding&) const = default;
};

struct KeySpec {
  std::string key_port_name = "lock_key";
  uint32_t width = 0;
  BitVec correct_value;
  std::vector<KeyBinding> bindings;  // selection order

  bool operator==(const KeySpec&) const = default;
};

struct LockStrategy {
  Scope scope = Scope::All;
  uint32_t budget_pct = 100;
  uint64_t seed = 0;
  std::string key_port_name = "lock_key";
};

// Machine-readable fallback reasons.
enum class Fallback {
  None,
  NoSites,          // nothing lockable under the scope
  EmptySelection,   // the budget rounds down to zero bits
  KeyNameCollision, // key_port_name already names a signal
};

const char* to_string(Fallback f);

struct LockReport {
  std::string module;
  bool locked = false;
  Fallback reason = Fallback::None;
  uint32_t sites_considered = 0;
  uint32_t sites_locked = 0;
  uint32_t key_width = 0;
};

struct LockResult {
  hdl::AstModule locked;
  KeySpec key;
  LockReport report;
};

class LockError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class WidthMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<LockSite> enumerate_sites(const hdl::AstModule& m, Scope scope);

uint64_t max_key_size(const std::vector<LockSite>& sites);

struct Selection {
  std::vector<LockSite> sites;  // acceptance order
  uint64_t consumed = 0;
  uint64_t target = 0;
};

// Seeded shuffle, then an in-order greedy scan that reaches the largest
// subset sum not exceeding the target.
Selection select_sites(const std::vector<LockSite>& sites, uint32_t budget_pct, uint64_t seed);

LockResult lock_module(const hdl::AstModule& m, const LockStrategy& strategy);

// Substitutes `value` for the key and folds the lock gates away. A
// zero-width key (fallback) returns the module unchanged.
hdl::AstModule apply_key(const hdl::AstModule& locked, const KeySpec& key, const BitVec& value);

// Node at `path`, or nullptr if the path does not resolve.
const hdl::Expr* find_expr(const hdl::AstModule& m, const std::string& path);

// Key file: module, key_port_name, width, correct_value (hex), bindings,
// status and fallback reason.
std::string key_file_json(const LockResult& r);
KeySpec parse_key_file(const std::string& json);

}  // namespace rtlleak::lock

#endif  // RTLLEAK_LOCK_HPP
