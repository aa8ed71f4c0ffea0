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

// Expression compilation and two-valued evaluation.
//
// Widths follow the Verilog-2005 rules for unsigned operands: operands of
// arithmetic and bitwise operators are context-determined, comparison
// operands are sized to the wider side, shift amounts, logical/reduction
// operands, concatenation members, and conditions are self-determined.

#ifndef RTLLEAK_HDL_EVAL_HPP
#define RTLLEAK_HDL_EVAL_HPP

#include <functional>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtlleak/bitvec.hpp"
#include "rtlleak/hdl/ast.hpp"

namespace rtlleak::hdl {

struct SymbolRef {
  int slot = -1;
  uint32_t width = 1;
  int lo = 0;
};

using Resolver = std::function<std::optional<SymbolRef>(const std::string&)>;

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Width of `e` when evaluated in a self-determined context.
uint32_t self_width(const Expr& e, const Resolver& resolve);

class CompiledExpr {
 public:
  // `target_width` is the width of the assignment target (0 when the
  // expression is self-determined, e.g. a condition).
  static CompiledExpr compile(const Expr& e, uint32_t target_width, const Resolver& resolve);

  // Evaluates against the slot values. `scratch` is reused across calls.
  BitVec eval(std::span<const BitVec> slots, std::vector<BitVec>& scratch) const;
  BitVec eval(std::span<const BitVec> slots) const {
    std::vector<BitVec> scratch;
    return eval(slots, scratch);
  }

  uint32_t width() const;
  // Slots read by this expression.
  void collect_slots(std::set<int>& out) const;

 private:
  enum class Op : uint8_t {
    Const, Ref, Index, Slice, Not, Neg, Plus, LogNot, RedAnd, RedNand, RedOr, RedNor,
    RedXor, RedXnor, Add, Sub, Mul, Div, Mod, And, Or, Xor, Xnor, Eq, Ne, Lt, Le, Gt,
    Ge, LogAnd, LogOr, Shl, Shr, Ternary, Concat, Repeat
  };
  struct Node {
    Op op = Op::Const;
    uint32_t width = 1;  // output width
    int slot = -1;
    int decl_lo = 0;
    int hi = 0, lo = 0;
    uint32_t count = 0;
    BitVec constant;
    std::vector<int> kids;
  };

  int build(const Expr& e, uint32_t ctx, const Resolver& resolve);

  std::vector<Node> nodes_;
};

// Evaluates a constant expression where identifiers resolve to `values`.
BitVec eval_constant(const Expr& e, const std::function<std::optional<BitVec>(const std::string&)>& lookup);

}  // namespace rtlleak::hdl

#endif  // RTLLEAK_HDL_EVAL_HPP
