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

#include "rtlleak/equiv.hpp"

#include <gtest/gtest.h>

#include "rtlleak/hdl/front.hpp"
#include "rtlleak/lock.hpp"
#include "test_util.hpp"

namespace rtlleak::equiv {
namespace {

using hdl::AstModule;
using hdl::parse_module;

AstModule corpus_module(const std::string& name) {
  return parse_module(testing::read_file(testing::source_dir() / "corpus" / "mini" / (name + ".v")));
}

TEST(ElaboratePointsTest, Inverter) {
  auto pts = elaborate_points(parse_module("module inv(input a, output y); assign y = ~a; endmodule"));
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].name, "y");
  EXPECT_EQ(pts[0].kind, PointKind::OutputPort);
  EXPECT_EQ(pts[0].support, std::vector<std::string>{"a"});
}

TEST(ElaboratePointsTest, CounterHasOutputAndRegister) {
  auto pts = elaborate_points(corpus_module("counter8"));
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].name, "out");
  EXPECT_EQ(pts[0].kind, PointKind::OutputPort);
  EXPECT_EQ(pts[0].support, std::vector<std::string>{"count"});
  EXPECT_EQ(pts[1].name, "count");
  EXPECT_EQ(pts[1].kind, PointKind::SequentialElement);
  EXPECT_EQ(pts[1].support, (std::vector<std::string>{"count", "en", "rst"}));
}

TEST(ElaboratePointsTest, InstanceConeIsUnsupported) {
  auto pts = elaborate_points(parse_module(testing::read_file(testing::fixture("wrapper_inst.v"))));
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[0].name, "direct");
  EXPECT_TRUE(pts[0].supported);
  EXPECT_EQ(pts[1].name, "q");
  EXPECT_EQ(pts[1].kind, PointKind::OutputPort);
  EXPECT_TRUE(pts[1].supported);
  EXPECT_EQ(pts[2].name, "q");
  EXPECT_EQ(pts[2].kind, PointKind::SequentialElement);
  EXPECT_FALSE(pts[2].supported);
}

TEST(CheckEquivalenceTest, ReflexiveOverCorpus) {
  auto files = testing::mini_corpus();
  files.push_back(testing::fixture("nonansi_mux.v"));
  for (const auto& f : files) {
    AstModule m = parse_module(testing::read_file(f));
    auto r = check_equivalence(m, m);
    EXPECT_EQ(r.eq, 100.0) << f << "\n" << report_json(r);
    EXPECT_FALSE(r.points.empty());
  }
}

TEST(CheckEquivalenceTest, AndVersusOr) {
  AstModule gold = parse_module("module m(input a, b, output y); assign y = a & b; endmodule");
  AstModule gen = parse_module("module m(input a, b, output y); assign y = a | b; endmodule");
  auto r = check_equivalence(gen, gold);
  ASSERT_EQ(r.points.size(), 1u);
  EXPECT_EQ(r.points[0].verdict, Verdict::Mismatch);
  EXPECT_EQ(r.eq, 0.0);
  ASSERT_TRUE(r.points[0].counterexample);
  const auto& cex = *r.points[0].counterexample;
  EXPECT_NE(cex.assignment[0].second, cex.assignment[1].second);  // a != b
  EXPECT_TRUE(recheck_counterexample(gen, gold, "y", PointKind::OutputPort, cex));
  EXPECT_FALSE(recheck_counterexample(gold, gold, "y", PointKind::OutputPort, cex));
}

TEST(CheckEquivalenceTest, DifferentlyWrittenAdderMatches) {
  AstModule gold = corpus_module("adder8");
  AstModule gen = parse_module(
      "module adder8(input [7:0] a, input [7:0] b, input cin, output reg [7:0] sum, output reg cout);\n"
      "  reg [8:0] t;\n"
      "  always @(*) begin\n"
      "    t = {1'b0, a} + {1'b0, b};\n"
      "    t = t + {8'd0, cin};\n"
      "    sum = t[7:0];\n"
      "    cout = t[8];\n"
      "  end\n"
      "endmodule\n");
  auto r = check_equivalence(gen, gold);
  EXPECT_EQ(r.eq, 100.0) << report_json(r);
  EXPECT_TRUE(r.exhaustive);
  EXPECT_EQ(r.points[0].support_bits, 17u);

  // Dropping the carry-in breaks both outputs.
  AstModule bad = parse_module(
      "module adder8(input [7:0] a, input [7:0] b, input cin, output [7:0] sum, output cout);\n"
      "  assign {cout, sum} = a + b;\n"
      "endmodule\n");
  auto rb = check_equivalence(bad, gold);
  EXPECT_EQ(rb.eq, 0.0);
  for (const auto& p : rb.points) {
    ASSERT_EQ(p.verdict, Verdict::Mismatch);
    EXPECT_TRUE(recheck_counterexample(bad, gold, p.name, p.kind, *p.counterexample));
  }
}

TEST(CheckEquivalenceTest, RenamedPortIsUnmatched) {
  AstModule gold = parse_module("module m(input a, output y, output z); assign y = ~a; assign z = a; endmodule");
  AstModule gen = parse_module("module m(input a, output y2, output z); assign y2 = ~a; assign z = a; endmodule");
  auto r = check_equivalence(gen, gold);
  EXPECT_EQ(r.points[0].verdict, Verdict::Unmatched);
  EXPECT_EQ(r.points[1].verdict, Verdict::Match);
  EXPECT_EQ(r.eq, 50.0);
}

TEST(CheckEquivalenceTest, SequentialNextState) {
  AstModule gold = corpus_module("counter8");
  AstModule gen = gold;
  // Counting by two changes the register's next state but not the output.
  std::string src = testing::read_file(testing::source_dir() / "corpus" / "mini" / "counter8.v");
  src.replace(src.find("count + 8'd1"), 12, "count + 8'd2");
  auto r = check_equivalence(parse_module(src), gold);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_EQ(r.points[0].verdict, Verdict::Match);
  EXPECT_EQ(r.points[1].verdict, Verdict::Mismatch);
  EXPECT_EQ(r.eq, 50.0);
}

TEST(CheckEquivalenceTest, InstanceDrivenPointIsUnsupported) {
  AstModule m = parse_module(testing::read_file(testing::fixture("wrapper_inst.v")));
  auto r = check_equivalence(m, m);
  ASSERT_EQ(r.points.size(), 3u);
  EXPECT_EQ(r.points[2].verdict, Verdict::Unsupported);
  EXPECT_NEAR(r.eq, 200.0 / 3.0, 1e-9);
}

TEST(CheckEquivalenceTest, OscillatingLoopIsUnsupported) {
  AstModule m = parse_module("module m(input a, output y); wire x; assign x = ~x; assign y = x & a; endmodule");
  auto r = check_equivalence(m, m);
  ASSERT_EQ(r.points.size(), 1u);
  EXPECT_EQ(r.points[0].verdict, Verdict::Unsupported);
}

TEST(CheckEquivalenceTest, WideSupportIsSampled) {
  AstModule gold = corpus_module("mix32");
  auto r = check_equivalence(gold, gold, {20, 500, 9});
  EXPECT_FALSE(r.exhaustive);
  EXPECT_EQ(r.points[0].vectors, 500u);
  EXPECT_EQ(r.eq, 100.0);
  std::string src = testing::read_file(testing::source_dir() / "corpus" / "mini" / "mix32.v");
  src.replace(src.find("32'h9e3779b9"), 12, "32'h9e3779b8");
  auto bad = check_equivalence(parse_module(src), gold, {20, 500, 9});
  EXPECT_EQ(bad.points[0].verdict, Verdict::Mismatch);
  // Identical options give identical reports.
  EXPECT_EQ(report_json(bad), report_json(check_equivalence(parse_module(src), gold, {20, 500, 9})));
}

// Exhaustive Match verdicts survive swapping the two sides.
TEST(CheckEquivalenceTest, MatchSymmetry) {
  for (const auto& f : testing::mini_corpus()) {
    AstModule gold = parse_module(testing::read_file(f));
    auto locked = lock::lock_module(gold, {lock::Scope::All, 50, 3, "lock_key"});
    if (!locked.report.locked) continue;
    BitVec wrong = ~locked.key.correct_value;
    AstModule gen = lock::apply_key(locked.locked, locked.key, wrong);
    auto ab = check_equivalence(gen, gold);
    auto ba = check_equivalence(gold, gen);
    ASSERT_EQ(ab.points.size(), ba.points.size());
    for (size_t i = 0; i < ab.points.size(); ++i) {
      if (!ab.points[i].exhaustive) continue;
      EXPECT_EQ(ab.points[i].verdict == Verdict::Match, ba.points[i].verdict == Verdict::Match) << f;
      if (ab.points[i].verdict == Verdict::Mismatch)
        EXPECT_TRUE(recheck_counterexample(gen, gold, ab.points[i].name, ab.points[i].kind,
                                           *ab.points[i].counterexample));
    }
  }
}

TEST(CheckEquivalenceTest, CorrectKeyUnlocksEverywhere) {
  const lock::LockStrategy strategies[] = {
      {lock::Scope::All, 50, 1, "lock_key"},
      {lock::Scope::All, 100, 1, "lock_key"},
      {lock::Scope::ConstOnly, 50, 1, "lock_key"},
      {lock::Scope::ConstOnly, 100, 1, "lock_key"},
  };
  for (const auto& f : testing::mini_corpus()) {
    AstModule gold = parse_module(testing::read_file(f));
    for (const auto& st : strategies) {
      auto r = lock::lock_module(gold, st);
      AstModule unlocked = lock::apply_key(r.locked, r.key, r.key.correct_value);
      auto rep = check_equivalence(unlocked, gold);
      EXPECT_EQ(rep.eq, 100.0) << f << "\n" << report_json(rep);
      // The locked design with its key port driven by the correct value.
      if (r.report.locked && r.key.width <= 8) {
        auto direct = check_equivalence(r.locked, gold);
        EXPECT_LE(direct.eq, 100.0);
      }
    }
  }
}

TEST(EqAggregateTest, Reductions) {
  EXPECT_DOUBLE_EQ(eq_aggregate({{"m", {100, 100}}}), 100.0);
  EXPECT_DOUBLE_EQ(eq_aggregate({{"a", {100}}, {"b", {0}}}), 50.0);
  EXPECT_DOUBLE_EQ(eq_aggregate({{"m", {80, 40}}}, Reduction::Mean), 60.0);
  EXPECT_DOUBLE_EQ(eq_aggregate({{"m", {80, 40}}}, Reduction::Max), 80.0);
  EXPECT_THROW(eq_aggregate({}), EmptyCorpus);
}

}  // namespace
}  // namespace rtlleak::equiv
