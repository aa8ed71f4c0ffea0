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

#include "rtlleak/similarity.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <regex>
#include <set>

#include "rtlleak/hdl/front.hpp"
#include "test_util.hpp"

namespace rtlleak::sim {
namespace {

using hdl::AstModule;
using hdl::parse_module;

constexpr const char* kInv = "module inv(input a, output y); assign y = ~a; endmodule";

// Renames every declared identifier and the module name in source text.
std::string rename_all(const std::string& src, const AstModule& m) {
  std::string out = src;
  std::vector<std::string> names = {m.name};
  for (const auto& [n, info] : hdl::signal_table(m)) names.push_back(n);
  for (const auto& n : names) out = std::regex_replace(out, std::regex("\\b" + n + "\\b"), "zz_" + n + "_q");
  return out;
}

bool has_text(const TokenStream& ts, const std::string& t) {
  return std::any_of(ts.tokens.begin(), ts.tokens.end(), [&](const Token& x) { return x.text == t; });
}

TEST(TokenizeTest, RawKeepsIdentifiers) {
  auto ts = tokenize(parse_module(kInv), Normalization::Raw);
  EXPECT_TRUE(has_text(ts, "inv"));
  EXPECT_TRUE(has_text(ts, "a"));
  EXPECT_TRUE(has_text(ts, "y"));
  for (size_t i = 1; i < ts.tokens.size(); ++i) EXPECT_LT(ts.tokens[i - 1].pos, ts.tokens[i].pos);
}

TEST(TokenizeTest, IdentNormalizedIgnoresRenaming) {
  AstModule m = parse_module(kInv);
  AstModule r = parse_module(rename_all(kInv, m));
  ASSERT_NE(r.name, m.name);
  EXPECT_EQ(tokenize(m, Normalization::IdentNormalized), tokenize(r, Normalization::IdentNormalized));
  EXPECT_NE(tokenize(m, Normalization::Raw), tokenize(r, Normalization::Raw));
  auto ts = tokenize(m, Normalization::IdentNormalized);
  EXPECT_FALSE(has_text(ts, "inv"));
  EXPECT_TRUE(has_text(ts, "IDENT"));
}

TEST(TokenizeTest, HeaderOnlyModule) {
  auto ts = tokenize(parse_module("module m(input a); endmodule"), Normalization::Raw);
  std::vector<std::string> texts;
  for (const auto& t : ts.tokens) texts.push_back(t.text);
  EXPECT_EQ(texts, (std::vector<std::string>{"(module", "m", "(port", "input", "w1", "a", ")"}));
}

TEST(TokenizeTest, LiteralFormattingNormalized) {
  AstModule hex = parse_module("module m(output [7:0] y); assign y = 8'hA5; endmodule");
  AstModule dec = parse_module("module m(output [7:0] y); assign y = 8'd165; endmodule");
  EXPECT_EQ(tokenize(hex, Normalization::IdentNormalized), tokenize(dec, Normalization::IdentNormalized));
  EXPECT_NE(tokenize(hex, Normalization::Raw), tokenize(dec, Normalization::Raw));
}

TEST(FingerprintTest, ShortStreamIsEmpty) {
  auto ts = tokenize(parse_module(kInv), Normalization::Raw);
  EXPECT_TRUE(fingerprint(ts, static_cast<uint32_t>(ts.tokens.size()) + 1, 4).prints.empty());
  EXPECT_FALSE(fingerprint(ts, static_cast<uint32_t>(ts.tokens.size()), 4).prints.empty());
}

TEST(FingerprintTest, SmallModulesExceedDefaultK) {
  auto ts = tokenize(parse_module(kInv), Normalization::IdentNormalized);
  EXPECT_GE(ts.tokens.size(), 17u);
  EXPECT_FALSE(fingerprint(ts).prints.empty());
}

TEST(ScoreTest, ReflexiveAndDisjoint) {
  for (const auto& f : testing::mini_corpus()) {
    auto fs = fingerprint(tokenize(parse_module(testing::read_file(f)), Normalization::IdentNormalized));
    ASSERT_FALSE(fs.prints.empty()) << f;
    EXPECT_EQ(score(fs, fs).ss, 1.0);
    EXPECT_EQ(fs, fingerprint(tokenize(parse_module(testing::read_file(f)), Normalization::IdentNormalized)));
  }
  FingerprintSet a, b;
  a.prints = {{1, 0}, {2, 5}};
  b.prints = {{3, 0}, {4, 2}};
  auto r = score(a, b);
  EXPECT_EQ(r.ss, 0.0);
  EXPECT_EQ(r.shared, 0u);
  FingerprintSet empty;
  auto e = score(a, empty);
  EXPECT_TRUE(e.ref_empty);
  EXPECT_EQ(e.ss, 0.0);
}

// Holds whenever the reference has at least one full window of k-grams.
// A shorter reference forms a single partial window whose minimum need not
// survive in the longer stream.
TEST(ScoreTest, AppendedItemsKeepFullCoverage) {
  auto files = testing::mini_corpus();
  int checked = 0;
  for (size_t i = 0; i + 1 < files.size(); ++i) {
    AstModule ref = parse_module(testing::read_file(files[i]));
    AstModule other = parse_module(testing::read_file(files[i + 1]));
    AstModule gen = ref;
    gen.items.insert(gen.items.end(), other.items.begin(), other.items.end());
    for (auto n : {Normalization::Raw, Normalization::IdentNormalized}) {
      if (tokenize(ref, n).tokens.size() < 17 + 13 - 1) continue;
      ++checked;
      auto fr = fingerprint(tokenize(ref, n));
      auto fg = fingerprint(tokenize(gen, n));
      // Brute-force intersection of hash sets.
      std::set<uint64_t> rs, gs;
      for (const auto& p : fr.prints) rs.insert(p.hash);
      for (const auto& p : fg.prints) gs.insert(p.hash);
      size_t shared = 0;
      for (auto h : rs) shared += gs.count(h);
      EXPECT_EQ(shared, rs.size()) << files[i];
      auto res = score(fg, fr);
      EXPECT_EQ(res.ss, 1.0) << files[i];
      EXPECT_EQ(res.shared, shared);
    }
  }
  EXPECT_GE(checked, 40);
}

TEST(ScoreTest, RenameInvariance) {
  for (const auto& f : testing::mini_corpus()) {
    std::string src = testing::read_file(f);
    AstModule m = parse_module(src);
    AstModule r = parse_module(rename_all(src, m));
    auto fm = fingerprint(tokenize(m, Normalization::IdentNormalized));
    auto fr = fingerprint(tokenize(r, Normalization::IdentNormalized));
    EXPECT_EQ(score(fr, fm).ss, 1.0) << f;
    auto raw = score(fingerprint(tokenize(r, Normalization::Raw)), fingerprint(tokenize(m, Normalization::Raw)));
    EXPECT_LT(raw.ss, 1.0) << f;
  }
}

TEST(ScoreTest, ParamMismatch) {
  auto ts = tokenize(parse_module(kInv), Normalization::IdentNormalized);
  EXPECT_THROW(score(fingerprint(ts, 17, 13), fingerprint(ts, 5, 13)), ParamMismatch);
  EXPECT_THROW(score(fingerprint(ts, 5, 13), fingerprint(ts, 5, 4)), ParamMismatch);
}

TEST(ScoreTest, JaccardIsSymmetric) {
  FingerprintSet a, b;
  a.prints = {{1, 0}, {2, 1}, {3, 2}};
  b.prints = {{2, 0}, {3, 1}, {4, 2}, {5, 3}};
  EXPECT_DOUBLE_EQ(score(a, b, ScoreMode::Jaccard).ss, 2.0 / 5.0);
  EXPECT_DOUBLE_EQ(score(b, a, ScoreMode::Jaccard).ss, 2.0 / 5.0);
  EXPECT_DOUBLE_EQ(score(a, b).ss, 2.0 / 4.0);
  EXPECT_DOUBLE_EQ(score(b, a).ss, 2.0 / 3.0);
}

TEST(ClassifyLeakTest, InclusiveThreshold) {
  EXPECT_TRUE(classify_leak(0.60));
  EXPECT_FALSE(classify_leak(0.59));
  EXPECT_TRUE(classify_leak(1.0));
  SimilarityResult r;
  r.shared = 3;
  r.ref_total = 5;
  r.ss = 3.0 / 5.0;
  EXPECT_TRUE(classify_leak(r));
  // Monotone in ss.
  bool prev = false;
  for (int i = 0; i <= 1000; ++i) {
    bool now = classify_leak(i / 1000.0);
    EXPECT_TRUE(!prev || now);
    prev = now;
  }
}

TEST(AstPassRateTest, Means) {
  EXPECT_DOUBLE_EQ(ast_pass_rate({{"m", std::vector<bool>(10, true)}}), 100.0);
  EXPECT_DOUBLE_EQ(ast_pass_rate({{"a", std::vector<bool>(10, true)}, {"b", std::vector<bool>(10, false)}}), 50.0);
  EXPECT_DOUBLE_EQ(ast_pass_rate({{"a", {true, false, false, false}}, {"b", {true}}}), 62.5);
  EXPECT_THROW(ast_pass_rate({}), EmptyCorpus);
  EXPECT_THROW(ast_pass_rate({{"a", {}}}), EmptyCorpus);
}

// Direct (non-rolling) k-gram hash.
uint64_t direct_kgram(const TokenStream& ts, size_t start, uint32_t k) {
  uint64_t h = 0;
  for (size_t i = start; i < start + k; ++i) h = h * kGramBase + token_hash(ts.tokens[i]);
  return h;
}

TokenStream random_stream(std::mt19937_64& rng, size_t n, int alphabet) {
  TokenStream ts;
  for (size_t i = 0; i < n; ++i)
    ts.tokens.push_back(Token{TokenClass::Ident, "t" + std::to_string(rng() % alphabet), static_cast<uint32_t>(i)});
  return ts;
}

// Winnowing guarantee against a brute-force all-k-grams oracle.
TEST(FingerprintTest, WinnowingGuaranteeRandomized) {
  std::mt19937_64 rng(2024);
  for (int iter = 0; iter < 10000; ++iter) {
    uint32_t k = 2 + static_cast<uint32_t>(rng() % 19);
    uint32_t w = 1 + static_cast<uint32_t>(rng() % 15);
    int alphabet = 2 + static_cast<int>(rng() % 30);
    size_t run = k + w - 1;
    TokenStream shared = random_stream(rng, run, alphabet);
    TokenStream a = random_stream(rng, rng() % 40, alphabet);
    TokenStream b = random_stream(rng, rng() % 40, alphabet);
    size_t at_a = a.tokens.empty() ? 0 : rng() % (a.tokens.size() + 1);
    size_t at_b = b.tokens.empty() ? 0 : rng() % (b.tokens.size() + 1);
    a.tokens.insert(a.tokens.begin() + static_cast<long>(at_a), shared.tokens.begin(), shared.tokens.end());
    b.tokens.insert(b.tokens.begin() + static_cast<long>(at_b), shared.tokens.begin(), shared.tokens.end());

    for (const TokenStream* s : {&a, &b}) {
      auto hs = kgram_hashes(*s, k);
      ASSERT_EQ(hs.size(), s->tokens.size() - k + 1);
      for (size_t i = 0; i < hs.size(); ++i) ASSERT_EQ(hs[i], direct_kgram(*s, i, k));
      auto fs = fingerprint(*s, k, w);
      std::set<uint32_t> chosen;
      for (const auto& p : fs.prints) {
        ASSERT_EQ(p.hash, hs[p.pos]);
        chosen.insert(p.pos);
      }
      // Every window of w consecutive k-grams holds a chosen one, and that
      // one is the window minimum.
      for (size_t st = 0; st + w <= hs.size(); ++st) {
        uint64_t mn = *std::min_element(hs.begin() + static_cast<long>(st), hs.begin() + static_cast<long>(st + w));
        bool hit = false;
        for (size_t i = st; i < st + w; ++i) hit |= chosen.count(static_cast<uint32_t>(i)) && hs[i] == mn;
        ASSERT_TRUE(hit) << "k=" << k << " w=" << w;
      }
    }
    auto fa = fingerprint(a, k, w);
    auto fb = fingerprint(b, k, w);
    ASSERT_GT(score(fa, fb).shared, 0u) << "k=" << k << " w=" << w;
  }
}

}  // namespace
}  // namespace rtlleak::sim
