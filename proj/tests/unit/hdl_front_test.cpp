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

// Verilog front-end unit tests

#include <gtest/gtest.h>

#include <random>

#include "rtlleak/hdl/eval.hpp"
#include "rtlleak/hdl/front.hpp"
#include "test_util.hpp"

namespace rtlleak::hdl {
namespace {

using testing::fixture;
using testing::mini_corpus;
using testing::read_file;

constexpr const char* kInv = "module inv(input a, output y); assign y = ~a; endmodule";

TEST(ParseModuleTest, MinimalInverter) {
  AstModule m = parse_module(kInv);
  EXPECT_EQ(m.name, "inv");
  ASSERT_EQ(m.ports.size(), 2u);
  EXPECT_EQ(m.ports[0].dir, Direction::In);
  EXPECT_EQ(m.ports[1].dir, Direction::Out);
  ASSERT_EQ(m.items.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<ContAssign>(m.items[0]));
}

TEST(ParseModuleTest, MalformedHeaderIsSyntaxError) {
  try {
    parse_module("module m(; endmodule");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::Syntax);
    EXPECT_EQ(e.line(), 1);
  }
}

// Curated constructs outside the subset; each must be rejected as
// Unsupported (never Syntax) and name the construct.
TEST(ParseModuleTest, UnsupportedConstructs) {
  struct Case {
    const char* src;
    const char* construct;
  };
  const Case cases[] = {
      {"module m(input a, output y); genvar i; endmodule", "genvar"},
      {"module m(input a, output y); generate endgenerate endmodule", "generate"},
      {"module m(input a, output y); function f; endfunction endmodule", "function"},
      {"module m(input a, output y); task t; endtask endmodule", "task"},
      {"module m(input a, output reg y); initial y = 0; endmodule", "initial"},
      {"module m(input [3:0] a, output y); reg [3:0] mem [0:3]; endmodule", "memory array"},
      {"module m(input signed [3:0] a, output y); endmodule", "signed"},
      {"module m(input [3:0] a, output y); assign y = a[0 +: 2]; endmodule", "indexed part-select"},
      {"module m(input a, output y); assign y = a ** 2; endmodule", "**"},
      {"module m(input a, output y); assign y = 1'bx; endmodule", "x/z literal"},
      {"module m(input clk, output reg y); always @(posedge clk) casez (y) default: y <= 0; endcase endmodule",
       "casez"},
      {"module m(input a, output y); and g(y, a, a); endmodule", "and"},
      {"`define W 4\nmodule m(input a, output y); endmodule", "`define"},
      {"module m(input [3:0] a, output y); assign y = $countones(a); endmodule", "system function $countones"},
      {"module m(input a, output y); assign y = a; endmodule\nmodule n(input a, output y); endmodule",
       "multiple modules"},
      {"module m(input [0:3] a, output y); endmodule", "ascending range"},
  };
  for (const auto& c : cases) {
    try {
      parse_module(c.src);
      ADD_FAILURE() << "accepted: " << c.src;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.kind(), ParseError::Kind::Unsupported) << c.src << " -> " << e.what();
      EXPECT_EQ(e.construct(), c.construct) << c.src;
    }
  }
}

TEST(ParseModuleTest, GenerateFixtureIsUnsupported) {
  try {
    parse_module(read_file(fixture("ripple_generate.v")));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::Unsupported);
  }
}

TEST(ParseModuleTest, SemanticErrors) {
  auto kind_of = [](const char* src) {
    try {
      parse_module(src);
    } catch (const ParseError& e) {
      return e.kind();
    }
    return ParseError::Kind::Syntax;  // sentinel; checked below
  };
  EXPECT_EQ(kind_of("module m(input a, output y); assign y = b; endmodule"), ParseError::Kind::Semantic);
  EXPECT_EQ(kind_of("module m(input a, output y); assign y = 4'h1F; endmodule"), ParseError::Kind::Semantic);
  EXPECT_EQ(kind_of("module m(input a, input a, output y); endmodule"), ParseError::Kind::Semantic);
  EXPECT_EQ(kind_of("module m(input a, output y); always @(*) y = a; endmodule"), ParseError::Kind::Semantic);
  EXPECT_EQ(kind_of("module m(input a, output reg y); assign y = a; endmodule"), ParseError::Kind::Semantic);
  EXPECT_EQ(kind_of("module m(input [3:0] a, output y); assign y = a[5:4]; endmodule"),
            ParseError::Kind::Semantic);
}

TEST(ParseModuleTest, NonAnsiPortsAndDirectives) {
  AstModule m = parse_module(read_file(fixture("nonansi_mux.v")));
  ASSERT_EQ(m.ports.size(), 5u);
  EXPECT_EQ(m.ports[0].name, "a");
  EXPECT_EQ(m.ports[0].width(), 2u);
  EXPECT_EQ(m.ports[1].width(), 2u);
  EXPECT_TRUE(m.ports[4].is_reg);
  ASSERT_EQ(m.leading_comments.size(), 2u);
  EXPECT_EQ(m.leading_comments[0], "Non-ANSI style 2:1 mux");
  EXPECT_EQ(m.leading_comments[1], "with an enable.");
  ASSERT_EQ(m.items.size(), 1u);
  const auto& al = std::get<AlwaysBlock>(m.items[0]);
  EXPECT_FALSE(al.is_sequential());
  EXPECT_EQ(al.sens.size(), 4u);
}

TEST(ParseModuleTest, ParametersResolveWidths) {
  AstModule m = parse_module(
      "module p #(parameter W = 6, parameter D = W * 2) (input [W-1:0] a, output [D-1:0] y);\n"
      "  localparam [3:0] K = 4'd9;\n"
      "  assign y = {a, a} ^ K;\n"
      "endmodule\n");
  EXPECT_EQ(m.ports[0].width(), 6u);
  EXPECT_EQ(m.ports[1].width(), 12u);
  ASSERT_EQ(m.params.size(), 3u);
  EXPECT_EQ(m.params[1].resolved.to_u64(), 12u);
  EXPECT_TRUE(m.params[2].local);
  EXPECT_EQ(m.params[2].resolved.width(), 4u);
}

TEST(ParseModuleTest, OperatorPrecedence) {
  AstModule m = parse_module("module m(input [3:0] a, b, c, output [3:0] y); assign y = a + b * c; endmodule");
  const auto& rhs = std::get<ContAssign>(m.items[0]).rhs;
  ASSERT_EQ(rhs.kind, ExprKind::Binary);
  EXPECT_EQ(rhs.op, "+");
  EXPECT_EQ(rhs.args[1].op, "*");
  // Direction and range carry over to names without their own declaration.
  EXPECT_EQ(m.ports[2].width(), 4u);
}

TEST(PrintModuleTest, InverterRoundTrip) {
  AstModule m = parse_module(kInv);
  std::string text = print_module(m);
  EXPECT_EQ(text,
            "module inv (\n"
            "  input a,\n"
            "  output y\n"
            ");\n"
            "  assign y = ~a;\n"
            "endmodule\n");
  EXPECT_EQ(parse_module(text), m);
}

TEST(PrintModuleTest, CorpusRoundTripAndItemOrder) {
  auto files = mini_corpus();
  files.push_back(fixture("nonansi_mux.v"));
  files.push_back(fixture("wrapper_inst.v"));
  ASSERT_GE(files.size(), 20u);
  for (const auto& f : files) {
    AstModule m = parse_module(read_file(f));
    std::string once = print_module(m);
    AstModule again = parse_module(once);
    EXPECT_EQ(again, m) << f << "\n" << once;
    EXPECT_EQ(print_module(again), once) << f;
  }
}

TEST(PrintModuleTest, StructurallyEqualAstsPrintIdentically) {
  AstModule a = parse_module("module m(input a,output y);assign y=~a;endmodule");
  AstModule b = parse_module("module m (\n input a ,\n output y\n) ;\n  assign   y = ( ~ a ) ;\nendmodule");
  ASSERT_EQ(a, b);
  EXPECT_EQ(print_module(a), print_module(b));
}

TEST(PrintModuleTest, ParenthesizesByPrecedence) {
  AstModule m = parse_module(
      "module m(input [3:0] a, b, c, output [3:0] y, output z);"
      " assign y = (a + b) * c - (a - (b - c)); assign z = ~(a == b) ^ &c; endmodule");
  std::string text = print_module(m);
  EXPECT_NE(text.find("assign y = (a + b) * c - (a - (b - c));"), std::string::npos) << text;
  EXPECT_NE(text.find("assign z = ~(a == b) ^ &c;"), std::string::npos) << text;
  EXPECT_EQ(parse_module(text), m);
}

TEST(ExtractModuleTest, FencedCompletion) {
  std::string raw =
      "Here is the code:\n```verilog\nmodule inv(input a, output y);\n  assign y = ~a;\nendmodule\n```\n"
      "Let me know if you need anything else.";
  EXPECT_EQ(extract_module_from_completion(raw).name, "inv");
}

TEST(ExtractModuleTest, FirstParseableOfSeveral) {
  std::string raw =
      "The module below is broken:\nmodule bad(input a; endmodule\n"
      "and here are two good ones:\n"
      "module first(input a, output y); assign y = a; endmodule\n"
      "module second(input a, output y); assign y = ~a; endmodule\n";
  EXPECT_EQ(extract_module_from_completion(raw).name, "first");
}

TEST(ExtractModuleTest, NoModule) {
  try {
    extract_module_from_completion("I cannot help with that request.");
    FAIL();
  } catch (const ExtractError& e) {
    EXPECT_EQ(e.kind(), ExtractError::Kind::NoModuleFound);
  }
  try {
    extract_module_from_completion("module broken(input a; endmodule");
    FAIL();
  } catch (const ExtractError& e) {
    EXPECT_EQ(e.kind(), ExtractError::Kind::AllCandidatesFailedParse);
  }
}

// Error totality: arbitrary bytes and corrupted corpus text either parse or
// raise ParseError. Nothing else escapes.
TEST(ParseModuleTest, FuzzNeverEscapesParseError) {
  std::mt19937_64 rng(7);
  std::vector<std::string> seeds;
  for (const auto& f : mini_corpus()) seeds.push_back(read_file(f));
  const std::string alphabet = "module endmodule assign always begin end if else case ()[]{};:,.#@?+-*/%&|^~!<>='\"`$\\ \n\t0123456789abcdefhxz_";
  for (int iter = 0; iter < 3000; ++iter) {
    std::string s;
    if (iter % 3 == 0) {
      size_t n = rng() % 200;
      for (size_t i = 0; i < n; ++i) s.push_back(static_cast<char>(rng() % 256));
    } else {
      s = seeds[rng() % seeds.size()];
      int edits = 1 + static_cast<int>(rng() % 4);
      for (int e = 0; e < edits && !s.empty(); ++e) {
        size_t pos = rng() % s.size();
        switch (rng() % 3) {
          case 0: s.erase(pos, 1 + rng() % 8); break;
          case 1: s.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
          default: s[pos] = alphabet[rng() % alphabet.size()]; break;
        }
      }
    }
    try {
      AstModule m = parse_module(s);
      // Anything accepted must round-trip.
      ASSERT_EQ(parse_module(print_module(m)), m) << s;
    } catch (const ParseError&) {
    }
  }
}

TEST(EvalTest, ContextDeterminedWidths) {
  // Carry is kept when the target is wider than the operands.
  AstModule m = parse_module(
      "module m(input [3:0] a, b, output [4:0] s, output c); assign s = a + b; assign c = (a + b) > 4'd15;"
      " endmodule");
  auto sig = signal_table(m);
  std::vector<BitVec> slots = {BitVec(4, 9), BitVec(4, 8)};
  Resolver r = [&](const std::string& n) -> std::optional<SymbolRef> {
    if (n == "a") return SymbolRef{0, 4, 0};
    if (n == "b") return SymbolRef{1, 4, 0};
    return std::nullopt;
  };
  auto sum = CompiledExpr::compile(std::get<ContAssign>(m.items[0]).rhs, 5, r);
  EXPECT_EQ(sum.eval(slots).to_u64(), 17u);
  // Comparison operands are sized to the wider operand (4 bits): 9 + 8
  // wraps to 1 and the comparison is false.
  auto cmp = CompiledExpr::compile(std::get<ContAssign>(m.items[1]).rhs, 1, r);
  EXPECT_EQ(cmp.eval(slots).to_u64(), 0u);
  (void)sig;
}

}  // namespace
}  // namespace rtlleak::hdl
