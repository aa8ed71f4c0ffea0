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

#include "rtlleak/evalkit.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace rtlleak::eval {
namespace {

// Binomial coefficient by Pascal's rule, independent of the estimator.
uint64_t choose(int64_t a, int64_t b) {
  if (b < 0 || a < b) return 0;
  std::vector<uint64_t> row(static_cast<size_t>(a) + 1, 0);
  row[0] = 1;
  for (int64_t i = 1; i <= a; ++i)
    for (int64_t j = i; j > 0; --j) row[static_cast<size_t>(j)] += row[static_cast<size_t>(j - 1)];
  return row[static_cast<size_t>(b)];
}

TEST(PassAtKTest, Examples) {
  for (int k : {1, 2, 5, 10}) EXPECT_EQ(pass_at_k(10, 0, k), 0.0);
  EXPECT_EQ(pass_at_k(10, 10, 1), 1.0);
  EXPECT_EQ(pass_at_k(10, 5, 1), 0.5);
  EXPECT_NEAR(pass_at_k(10, 5, 2), 1.0 - 10.0 / 45.0, 1e-15);
  EXPECT_EQ(pass_at_k_exact(10, 5, 2), "7/9");
}

TEST(PassAtKTest, ClosedFormGrid) {
  for (int c = 0; c <= 10; ++c)
    for (int k : {1, 2, 5, 10}) {
      double oracle = 1.0 - static_cast<double>(choose(10 - c, k)) / static_cast<double>(choose(10, k));
      EXPECT_NEAR(pass_at_k(10, c, k), oracle, 1e-15) << "c=" << c << " k=" << k;
    }
}

TEST(PassAtKTest, Properties) {
  for (int n = 1; n <= 30; ++n)
    for (int c = 0; c <= n; ++c) {
      EXPECT_EQ(pass_at_k_exact(n, c, 1), [&] {
        int g = std::gcd(c, n);
        return c == 0 ? std::string("0/1") : std::to_string(c / g) + "/" + std::to_string(n / g);
      }());
      EXPECT_EQ(pass_at_k(n, c, n) == 1.0, c >= 1);
      for (int k = 1; k <= n; ++k) {
        double v = pass_at_k(n, c, k);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        if (k > 1) EXPECT_LE(pass_at_k(n, c, k - 1), v);
        if (c > 0) EXPECT_LE(pass_at_k(n, c - 1, k), v);
      }
    }
  // Large n stays exact.
  EXPECT_NEAR(pass_at_k(10000, 1, 5000), 0.5, 1e-12);
}

TEST(PassAtKTest, DomainErrors) {
  EXPECT_THROW(pass_at_k(10, 11, 1), DomainError);
  EXPECT_THROW(pass_at_k(10, -1, 1), DomainError);
  EXPECT_THROW(pass_at_k(10, 5, 0), DomainError);
  EXPECT_THROW(pass_at_k(10, 5, 11), DomainError);
}

// Draw k of n without replacement and check for a pass.
TEST(PassAtKTest, MonteCarloAgreement) {
  std::mt19937_64 rng(5);
  const int trials = 100000;
  for (int c : {1, 3, 7})
    for (int k : {1, 2, 5}) {
      std::vector<int> pool(10);
      std::iota(pool.begin(), pool.end(), 0);
      int hits = 0;
      for (int t = 0; t < trials; ++t) {
        std::shuffle(pool.begin(), pool.end(), rng);
        hits += std::any_of(pool.begin(), pool.begin() + k, [&](int x) { return x < c; });
      }
      double p = pass_at_k(10, c, k);
      double sigma = std::sqrt(p * (1 - p) / trials);
      EXPECT_NEAR(static_cast<double>(hits) / trials, p, 3 * sigma + 1e-12) << c << " " << k;
    }
}

std::vector<EvalRecord> synth(const std::vector<std::pair<std::string, int>>& modules, int n) {
  std::vector<EvalRecord> out;
  for (const auto& [m, c] : modules)
    for (int i = 0; i < n; ++i) {
      EvalRecord r;
      r.module = m;
      r.strategy = "I";
      r.sample_id = i;
      r.eq = i < c ? 100 : 10;
      r.pass = classify_pass(r.eq);
      out.push_back(r);
    }
  return out;
}

TEST(QualityTableTest, ExtremesAndMixed) {
  for (const auto& row : quality_table(synth({{"a", 10}, {"b", 10}}, 10))) EXPECT_EQ(row.pass_at_k_pct, 100.0);
  for (const auto& row : quality_table(synth({{"a", 0}, {"b", 0}}, 10))) EXPECT_EQ(row.pass_at_k_pct, 0.0);
  // Hand-computed oracle: modules with c = 2, 5, 9 at n = 10.
  auto rows = quality_table(synth({{"a", 2}, {"b", 5}, {"c", 9}}, 10));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_NEAR(rows[0].pass_at_k_pct, 100.0 * (0.2 + 0.5 + 0.9) / 3, 1e-9);
  double k2 = ((1 - 28.0 / 45) + (1 - 10.0 / 45) + 1.0) / 3;
  EXPECT_NEAR(rows[1].pass_at_k_pct, 100.0 * k2, 1e-9);
  double k5 = ((1 - 56.0 / 252) + (1 - 1.0 / 252) + 1.0) / 3;
  EXPECT_NEAR(rows[2].pass_at_k_pct, 100.0 * k5, 1e-9);
  EXPECT_NEAR(rows[3].pass_at_k_pct, 100.0, 1e-9);
}

TEST(QualityTableTest, OrderInvariantAndRagged) {
  auto recs = synth({{"a", 2}, {"b", 5}, {"c", 9}}, 10);
  auto base = quality_table(recs);
  std::mt19937_64 rng(1);
  std::shuffle(recs.begin(), recs.end(), rng);
  auto shuffled = quality_table(recs);
  for (size_t i = 0; i < base.size(); ++i) EXPECT_EQ(base[i].pass_at_k_pct, shuffled[i].pass_at_k_pct);
  recs.pop_back();
  EXPECT_THROW(quality_table(recs), RaggedCorpus);
  EXPECT_THROW(quality_table(synth({{"a", 1}}, 3), {5}), DomainError);
  EXPECT_THROW(quality_table({}), EmptyCorpus);
}

TEST(ThresholdTest, PassIsInclusiveAndMonotone) {
  EXPECT_TRUE(classify_pass(80.0));
  EXPECT_FALSE(classify_pass(79.9));
  EXPECT_TRUE(classify_pass(100.0));
  for (double eq : {0.0, 50.0, 79.99, 80.0, 95.0})
    for (double t = 0; t < 100; t += 5)
      if (!classify_pass(eq, t)) EXPECT_FALSE(classify_pass(eq, t + 5));
}

TEST(LeakageTableTest, Rows) {
  std::vector<EvalRecord> recs;
  for (int i = 0; i < 4; ++i) {
    recs.push_back({"a", "I", i, 1.0, 100, true, true});
    recs.push_back({"b", "I", i, 0.2, i < 2 ? 100.0 : 0.0, i < 2, false});
    recs.push_back({"a", "I+K", i, 0.0, 0, false, false});
  }
  auto rows = leakage_table(recs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].strategy, "I");
  EXPECT_EQ(rows[0].modules, 2u);
  EXPECT_DOUBLE_EQ(rows[0].eq_mean, 75.0);
  EXPECT_DOUBLE_EQ(rows[0].eq_max, 100.0);
  EXPECT_DOUBLE_EQ(rows[0].ast_pass_rate, 50.0);
  EXPECT_EQ(rows[1].strategy, "I+K");
  EXPECT_DOUBLE_EQ(rows[1].ast_pass_rate, 0.0);
  EXPECT_THROW(leakage_table({}), EmptyCorpus);
}

TEST(DeltaPpTest, Examples) {
  EXPECT_DOUBLE_EQ(delta_pp(40.03, 28.75), 11.28);
  EXPECT_EQ(delta_pp(37.5, 37.5), 0.0);
  EXPECT_EQ(delta_pp(0, 100), -100.0);
  EXPECT_EQ(fmt_fixed(delta_pp(40.03, 28.75), 2), "11.28");
}

TEST(CsvTest, Quoting) {
  EXPECT_EQ(csv_row({"a", "b,c", "d\"e"}), "a,\"b,c\",\"d\"\"e\"\n");
  EXPECT_EQ(fmt_fixed(-0.001, 2), "0.00");
}

TEST(CsvTest, ParseInvertsRow) {
  std::vector<std::vector<std::string>> rows = {{"a", "b,c", "d\"e"}, {"", "x\ny", "z"}, {"1"}};
  std::string text;
  for (const auto& r : rows) text += csv_row(r);
  EXPECT_EQ(csv_parse(text), rows);
  EXPECT_EQ(csv_parse("a,b\r\nc,d"), (std::vector<std::vector<std::string>>{{"a", "b"}, {"c", "d"}}));
  EXPECT_THROW(csv_parse("\"open"), std::invalid_argument);
}

TEST(SvgTest, DeterministicChart) {
  std::vector<Bar> bars = {{"I", 100}, {"I+K<x>", 25.5}};
  std::string svg = render_bar_chart("leak", bars);
  EXPECT_EQ(svg, render_bar_chart("leak", bars));
  EXPECT_NE(svg.find("I+K&lt;x&gt;"), std::string::npos);
  EXPECT_NE(svg.find("25.50"), std::string::npos);
}

}  // namespace
}  // namespace rtlleak::eval
