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

#include "rtlleak/lock.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "rtlleak/hdl/eval.hpp"
#include "rtlleak/hdl/front.hpp"
#include "test_util.hpp"

namespace rtlleak::lock {
namespace {

using hdl::AstModule;
using hdl::parse_module;
using hdl::print_module;

constexpr const char* kAddConst =
    "module addc(input [7:0] a, output [7:0] y); assign y = a + 8'hA5; endmodule";

LockSite site(SiteKind k, uint32_t cost, int id = 0) {
  LockSite s;
  s.kind = k;
  s.bit_cost = cost;
  s.id = id;
  return s;
}

// Largest subset sum not above `target`, by explicit set DP.
uint64_t best_subset_sum(const std::vector<LockSite>& sites, uint64_t target) {
  std::set<uint64_t> sums = {0};
  for (const auto& s : sites) {
    std::set<uint64_t> next = sums;
    for (uint64_t v : sums)
      if (v + s.bit_cost <= target) next.insert(v + s.bit_cost);
    sums = std::move(next);
  }
  return *sums.rbegin();
}

// Evaluates the rhs of the single continuous assign with named inputs.
BitVec eval_assign(const AstModule& m, const std::map<std::string, BitVec>& in) {
  auto table = hdl::signal_table(m);
  std::vector<BitVec> slots;
  std::map<std::string, int> slot_of;
  for (const auto& [name, v] : in) {
    slot_of[name] = static_cast<int>(slots.size());
    slots.push_back(v);
  }
  hdl::Resolver r = [&](const std::string& n) -> std::optional<hdl::SymbolRef> {
    auto it = slot_of.find(n);
    if (it == slot_of.end()) return std::nullopt;
    return hdl::SymbolRef{it->second, table.at(n).width, table.at(n).lo};
  };
  const auto& a = std::get<hdl::ContAssign>(m.items.back());
  uint32_t target = table.at(a.lhs.name).width;
  return hdl::CompiledExpr::compile(a.rhs, target, r).eval(slots);
}

TEST(EnumerateSitesTest, PreOrderOperationThenConstant) {
  AstModule m = parse_module(kAddConst);
  auto all = enumerate_sites(m, Scope::All);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].kind, SiteKind::Operation);
  EXPECT_EQ(all[0].op, "+");
  EXPECT_EQ(all[0].bit_cost, 1u);
  EXPECT_EQ(all[1].kind, SiteKind::Constant);
  EXPECT_EQ(all[1].bit_cost, 8u);
  EXPECT_EQ(all[1].ast_path, "items[0].rhs.args[1]");

  auto consts = enumerate_sites(m, Scope::ConstOnly);
  ASSERT_EQ(consts.size(), 1u);
  EXPECT_EQ(consts[0].kind, SiteKind::Constant);
  EXPECT_EQ(consts[0].bit_cost, 8u);

  EXPECT_TRUE(enumerate_sites(parse_module("module m(input a, b, output y); assign y = a & b; endmodule"),
                              Scope::ConstOnly)
                  .empty());
}

TEST(EnumerateSitesTest, ExcludedPositions) {
  AstModule m = parse_module(
      "module m #(parameter W = 4) (input clk, input [W-1:0] a, input [1:0] s, output reg [W-1:0] q);\n"
      "  localparam Z = 3'd2;\n"
      "  wire [7:0] r = {2{a}};\n"
      "  always @(posedge clk)\n"
      "    case (s)\n"
      "      2'd0: q <= a[1:0];\n"
      "      2'd1: q <= a[3];\n"
      "      default: q <= 4'd7;\n"
      "    endcase\n"
      "endmodule\n");
  auto sites = enumerate_sites(m, Scope::All);
  // Only the default-arm literal qualifies. Labels, subscripts, bounds,
  // replication counts and parameter values are elaboration-time.
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].kind, SiteKind::Constant);
  EXPECT_EQ(sites[0].bit_cost, 4u);
  const hdl::Expr* e = find_expr(m, sites[0].ast_path);
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->kind, hdl::ExprKind::Const);
  EXPECT_EQ(e->value.to_u64(), 7u);
}

TEST(EnumerateSitesTest, PathsResolveToMatchingKinds) {
  for (const auto& f : testing::mini_corpus()) {
    AstModule m = parse_module(testing::read_file(f));
    for (const auto& s : enumerate_sites(m, Scope::All)) {
      const hdl::Expr* e = find_expr(m, s.ast_path);
      ASSERT_NE(e, nullptr) << f << " " << s.ast_path;
      if (s.kind == SiteKind::Constant) {
        EXPECT_EQ(e->kind, hdl::ExprKind::Const);
        EXPECT_EQ(e->value.width(), s.bit_cost);
      } else if (s.kind == SiteKind::Operation) {
        EXPECT_EQ(e->kind, hdl::ExprKind::Binary);
        EXPECT_EQ(e->op, s.op);
      }
      EXPECT_GE(s.bit_cost, 1u);
    }
  }
}

TEST(MaxKeySizeTest, Sums) {
  EXPECT_EQ(max_key_size({site(SiteKind::Constant, 8), site(SiteKind::Branch, 1), site(SiteKind::Operation, 1)}),
            10u);
  EXPECT_EQ(max_key_size({}), 0u);
  EXPECT_EQ(max_key_size({site(SiteKind::Constant, 32), site(SiteKind::Constant, 1)}), 33u);
}

TEST(SelectSitesTest, FullBudgetTakesEverything) {
  std::vector<LockSite> s = {site(SiteKind::Constant, 8, 0), site(SiteKind::Branch, 1, 1),
                             site(SiteKind::Operation, 1, 2)};
  auto sel = select_sites(s, 100, 3);
  EXPECT_EQ(sel.sites.size(), 3u);
  EXPECT_EQ(sel.consumed, 10u);
  auto empty = select_sites({}, 50, 3);
  EXPECT_TRUE(empty.sites.empty());
  EXPECT_EQ(empty.consumed, 0u);
}

TEST(SelectSitesTest, HalfBudgetSkipsWideConstant) {
  std::vector<LockSite> s = {site(SiteKind::Constant, 8, 0), site(SiteKind::Branch, 1, 1),
                             site(SiteKind::Operation, 1, 2)};
  for (uint64_t seed = 0; seed < 64; ++seed) {
    auto sel = select_sites(s, 50, seed);
    EXPECT_EQ(sel.target, 5u);
    EXPECT_EQ(sel.consumed, 2u);
    ASSERT_EQ(sel.sites.size(), 2u);
    for (const auto& x : sel.sites) EXPECT_NE(x.kind, SiteKind::Constant);
  }
}

// Randomized budget-bound check against the set-DP oracle.
TEST(SelectSitesTest, BudgetBoundMatchesOracle) {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 2000; ++iter) {
    std::vector<LockSite> s;
    size_t n = rng() % 12;
    for (size_t i = 0; i < n; ++i) {
      uint32_t cost = (rng() % 3 == 0) ? 1 + static_cast<uint32_t>(rng() % 32) : 1;
      s.push_back(site(SiteKind::Constant, cost, static_cast<int>(i)));
    }
    uint32_t pct = 1 + static_cast<uint32_t>(rng() % 100);
    auto sel = select_sites(s, pct, rng());
    uint64_t target = max_key_size(s) * pct / 100;
    ASSERT_EQ(sel.target, target);
    ASSERT_EQ(sel.consumed, best_subset_sum(s, target));
    uint64_t sum = 0;
    std::set<int> taken;
    for (const auto& x : sel.sites) {
      sum += x.bit_cost;
      taken.insert(x.id);
    }
    ASSERT_EQ(sum, sel.consumed);
    for (const auto& x : s)
      if (!taken.count(x.id)) ASSERT_GT(x.bit_cost, target - sel.consumed);
  }
}

TEST(SelectSitesTest, DeterministicPerSeed) {
  std::vector<LockSite> s;
  for (int i = 0; i < 20; ++i) s.push_back(site(SiteKind::Constant, 1 + i % 5, i));
  EXPECT_EQ(select_sites(s, 50, 99).sites, select_sites(s, 50, 99).sites);
}

TEST(LockModuleTest, ConstantLockingExample) {
  AstModule m = parse_module(kAddConst);
  auto r = lock_module(m, {Scope::ConstOnly, 100, 1, "lock_key"});
  ASSERT_TRUE(r.report.locked);
  EXPECT_EQ(r.key.width, 8u);
  EXPECT_EQ(r.key.correct_value.to_u64(), 0xA5u);
  std::string text = print_module(r.locked);
  EXPECT_NE(text.find("assign y = a + lock_key[7:0];"), std::string::npos) << text;
  EXPECT_NE(text.find("input [7:0] lock_key"), std::string::npos) << text;
  for (uint64_t a = 0; a < 256; ++a) {
    BitVec orig = eval_assign(m, {{"a", BitVec(8, a)}});
    BitVec locked = eval_assign(r.locked, {{"a", BitVec(8, a)}, {"lock_key", BitVec(8, 0xA5)}});
    ASSERT_EQ(orig, locked) << a;
  }
}

TEST(LockModuleTest, BranchGateTruthTable) {
  const char* src =
      "module br(input [1:0] a, b, output reg y);\n"
      "  always @(*) if (a > b) y = 1'b1; else y = 1'b0;\n"
      "endmodule\n";
  AstModule m = parse_module(src);
  bool saw_xnor = false, saw_xor = false;
  for (uint64_t seed = 0; seed < 32 && !(saw_xnor && saw_xor); ++seed) {
    auto r = lock_module(m, {Scope::All, 100, seed, "lock_key"});
    ASSERT_TRUE(r.report.locked);
    const auto& al = std::get<hdl::AlwaysBlock>(r.locked.items[0]);
    std::string cond = hdl::print_expr(al.body.cond);
    uint32_t lo = 0;
    for (const auto& b : r.key.bindings)
      if (b.site.kind == SiteKind::Branch) lo = b.bit_lo;
    bool correct = r.key.correct_value.bit(lo);
    if (correct) {
      saw_xnor = true;
      EXPECT_EQ(cond, "~(a > b) ^ lock_key[" + std::to_string(lo) + "]");
    } else {
      saw_xor = true;
      EXPECT_EQ(cond, "a > b ^ lock_key[" + std::to_string(lo) + "]");
    }
    // Only the correct key bit reproduces the condition.
    auto table = hdl::signal_table(r.locked);
    table.emplace("lock_key", hdl::SignalInfo{hdl::SignalKind::Input, r.key.width, 0});
    hdl::Resolver res = [&](const std::string& n) -> std::optional<hdl::SymbolRef> {
      if (n == "a") return hdl::SymbolRef{0, 2, 0};
      if (n == "b") return hdl::SymbolRef{1, 2, 0};
      if (n == "lock_key") return hdl::SymbolRef{2, r.key.width, 0};
      return std::nullopt;
    };
    auto gate = hdl::CompiledExpr::compile(al.body.cond, 0, res);
    for (uint64_t a = 0; a < 4; ++a)
      for (uint64_t b = 0; b < 4; ++b)
        for (int k = 0; k < 2; ++k) {
          BitVec key = r.key.correct_value;
          key.set_bit(lo, k != 0);
          std::vector<BitVec> slots = {BitVec(2, a), BitVec(2, b), key};
          bool want = (a > b) == (k == static_cast<int>(correct));
          ASSERT_EQ(gate.eval(slots).reduce_or(), want);
        }
  }
  EXPECT_TRUE(saw_xnor);
  EXPECT_TRUE(saw_xor);
}

TEST(LockModuleTest, OperationMuxCorrectBitIsOne) {
  AstModule m = parse_module("module op(input [3:0] a, b, output [3:0] y); assign y = a & b; endmodule");
  auto r = lock_module(m, {Scope::All, 100, 5, "lock_key"});
  ASSERT_TRUE(r.report.locked);
  EXPECT_EQ(r.key.width, 1u);
  EXPECT_EQ(r.key.correct_value.to_u64(), 1u);
  std::string rhs = hdl::print_expr(std::get<hdl::ContAssign>(r.locked.items[0]).rhs);
  EXPECT_TRUE(rhs == "lock_key[0] ? a & b : a | b" || rhs == "lock_key[0] ? a & b : a ^ b") << rhs;
  for (uint64_t a = 0; a < 16; ++a)
    for (uint64_t b = 0; b < 16; ++b)
      ASSERT_EQ(eval_assign(r.locked, {{"a", BitVec(4, a)}, {"b", BitVec(4, b)}, {"lock_key", BitVec(1, 1)}})
                    .to_u64(),
                a & b);
}

TEST(LockModuleTest, Fallbacks) {
  AstModule plain = parse_module("module m(input a, b, output y); assign y = a & b; endmodule");
  auto r = lock_module(plain, {Scope::ConstOnly, 100, 0, "lock_key"});
  EXPECT_FALSE(r.report.locked);
  EXPECT_EQ(r.report.reason, Fallback::NoSites);
  EXPECT_EQ(r.report.key_width, 0u);
  EXPECT_EQ(r.locked, plain);

  // One 1-bit site at 50% rounds down to an empty selection.
  auto half = lock_module(plain, {Scope::All, 50, 0, "lock_key"});
  EXPECT_FALSE(half.report.locked);
  EXPECT_EQ(half.report.reason, Fallback::EmptySelection);

  AstModule clash = parse_module("module m(input [3:0] lock_key, output [3:0] y); assign y = lock_key + 4'd1; endmodule");
  auto c = lock_module(clash, {Scope::All, 100, 0, "lock_key"});
  EXPECT_FALSE(c.report.locked);
  EXPECT_EQ(c.report.reason, Fallback::KeyNameCollision);
  EXPECT_TRUE(lock_module(clash, {Scope::All, 100, 0, "k2"}).report.locked);
}

TEST(ApplyKeyTest, WidthMismatch) {
  AstModule m = parse_module(kAddConst);
  auto r = lock_module(m, {Scope::ConstOnly, 100, 1, "lock_key"});
  EXPECT_THROW(apply_key(r.locked, r.key, BitVec(9, 0)), WidthMismatch);
}

const LockStrategy kStrategies[] = {
    {Scope::All, 50, 7, "lock_key"},
    {Scope::All, 100, 7, "lock_key"},
    {Scope::ConstOnly, 50, 7, "lock_key"},
    {Scope::ConstOnly, 100, 7, "lock_key"},
};

TEST(LockModuleTest, CorpusInvariants) {
  for (const auto& f : testing::mini_corpus()) {
    AstModule m = parse_module(testing::read_file(f));
    for (const auto& st : kStrategies) {
      auto r = lock_module(m, st);
      auto again = lock_module(m, st);
      ASSERT_EQ(print_module(r.locked), print_module(again.locked)) << f;
      ASSERT_EQ(key_file_json(r), key_file_json(again)) << f;
      if (!r.report.locked) {
        EXPECT_EQ(r.report.key_width, 0u);
        EXPECT_EQ(r.locked, m);
        continue;
      }
      // Key port hygiene.
      ASSERT_EQ(r.locked.ports.size(), m.ports.size() + 1) << f;
      EXPECT_EQ(r.locked.ports.back().name, "lock_key");
      EXPECT_EQ(r.locked.ports.back().width(), r.key.width);
      // Bindings tile [0, width) in order.
      uint32_t next = 0;
      for (const auto& b : r.key.bindings) {
        EXPECT_EQ(b.bit_lo, next);
        EXPECT_EQ(b.bit_hi - b.bit_lo + 1, b.site.bit_cost);
        next = b.bit_hi + 1;
      }
      EXPECT_EQ(next, r.key.width);
      // Budget bound.
      auto sites = enumerate_sites(m, st.scope);
      uint64_t target = max_key_size(sites) * st.budget_pct / 100;
      EXPECT_LE(r.key.width, target);
      EXPECT_EQ(r.key.width, best_subset_sum(sites, target)) << f;
      if (st.budget_pct == 100) EXPECT_EQ(r.report.sites_locked, sites.size());
      // The locked text is valid and round-trips.
      AstModule reparsed = parse_module(print_module(r.locked));
      EXPECT_EQ(reparsed, r.locked) << f << "\n" << print_module(r.locked);
      // Unlocking removes every key reference.
      AstModule unlocked = apply_key(r.locked, r.key, r.key.correct_value);
      EXPECT_EQ(print_module(unlocked).find("lock_key"), std::string::npos) << f;
      EXPECT_EQ(unlocked.ports, m.ports);
      // Key file round trip.
      EXPECT_EQ(parse_key_file(key_file_json(r)), r.key);
    }
  }
}

// Const-only locking: applying any key value equals the original with each
// locked literal replaced by its slice of that value.
TEST(ApplyKeyTest, ConstantSubstitutionMetamorphism) {
  std::mt19937_64 rng(3);
  for (const auto& f : testing::mini_corpus()) {
    AstModule m = parse_module(testing::read_file(f));
    for (uint32_t pct : {50u, 100u}) {
      auto r = lock_module(m, {Scope::ConstOnly, pct, 21, "lock_key"});
      if (!r.report.locked) continue;
      for (int trial = 0; trial < 8; ++trial) {
        BitVec v(r.key.width);
        for (uint32_t i = 0; i < v.width(); ++i) v.set_bit(i, rng() & 1);
        AstModule expect = m;
        for (const auto& b : r.key.bindings) {
          auto* node = const_cast<hdl::Expr*>(find_expr(expect, b.site.ast_path));
          ASSERT_NE(node, nullptr);
          *node = hdl::Expr::constant(v.slice(b.bit_lo, b.bit_hi - b.bit_lo + 1));
        }
        EXPECT_EQ(apply_key(r.locked, r.key, v), expect) << f;
      }
    }
  }
}

}  // namespace
}  // namespace rtlleak::lock
