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

// Typed AST for the synthesizable Verilog-2005 subset.
//
// The subset covers module/port/parameter declarations, wire/reg nets,
// continuous assigns, edge-triggered and combinational always blocks,
// if/case, blocking and non-blocking assignments, the usual unary, binary
// and ternary operators, concatenation, replication, bit- and part-selects.
// Instances are parsed but treated as opaque by the simulator.

#ifndef RTLLEAK_HDL_AST_HPP
#define RTLLEAK_HDL_AST_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rtlleak/bitvec.hpp"

namespace rtlleak::hdl {

enum class ExprKind { Const, Ref, Index, Slice, Unary, Binary, Ternary, Concat, Repeat };

// Node layout by kind:
//   Const    value/sized/base
//   Ref      name
//   Index    name[args[0]]
//   Slice    name[args[0]:args[1]], hi/lo hold the resolved bounds
//   Unary    op args[0]
//   Binary   args[0] op args[1]
//   Ternary  args[0] ? args[1] : args[2]
//   Concat   {args...}
//   Repeat   {args[0]{args[1..]}}, count holds the resolved multiplier
struct Expr {
  ExprKind kind = ExprKind::Const;
  std::string op;
  std::string name;
  BitVec value;
  bool sized = true;
  char base = 'h';
  int hi = 0;
  int lo = 0;
  uint32_t count = 0;
  std::vector<Expr> args;

  static Expr constant(BitVec v, char base = 'h', bool sized = true);
  static Expr ref(std::string name);
  static Expr index(std::string name, Expr idx);
  static Expr slice(std::string name, int hi, int lo);
  static Expr unary(std::string op, Expr a);
  static Expr binary(std::string op, Expr a, Expr b);
  static Expr ternary(Expr c, Expr t, Expr e);

  bool operator==(const Expr&) const = default;
};

struct Range {
  Expr msb;
  Expr lsb;
  int hi = 0;
  int lo = 0;

  uint32_t width() const { return static_cast<uint32_t>(hi - lo + 1); }
  bool operator==(const Range&) const = default;
};

enum class Direction { In, Out, InOut };

struct Port {
  std::string name;
  Direction dir = Direction::In;
  bool is_reg = false;
  std::optional<Range> range;

  uint32_t width() const { return range ? range->width() : 1; }
  bool operator==(const Port&) const = default;
};

struct Param {
  std::string name;
  std::optional<Range> range;
  Expr value;
  BitVec resolved;
  bool local = false;
  bool in_header = false;

  bool operator==(const Param&) const = default;
};

enum class StmtKind { Blocking, NonBlocking, If, Case, Block };

struct Stmt;

struct CaseArm {
  std::vector<Expr> labels;  // empty for default
  std::vector<Stmt> body;    // exactly one statement

  friend bool operator==(const CaseArm&, const CaseArm&);
};

// Blocking/NonBlocking use lhs/rhs. If uses cond, body[0] (then) and
// optionally body[1] (else). Case uses cond (subject) and arms. Block uses
// body.
struct Stmt {
  StmtKind kind = StmtKind::Block;
  Expr lhs;
  Expr rhs;
  Expr cond;
  std::vector<Stmt> body;
  std::vector<CaseArm> arms;

  bool has_else() const { return kind == StmtKind::If && body.size() == 2; }
  bool operator==(const Stmt&) const = default;
};

enum class NetKind { Wire, Reg };

struct NetDecl {
  NetKind kind = NetKind::Wire;
  std::string name;
  std::optional<Range> range;

  uint32_t width() const { return range ? range->width() : 1; }
  bool operator==(const NetDecl&) const = default;
};

struct ContAssign {
  Expr lhs;
  Expr rhs;
  bool operator==(const ContAssign&) const = default;
};

enum class Edge { None, Pos, Neg };

struct SensItem {
  Edge edge = Edge::None;
  std::string name;
  bool operator==(const SensItem&) const = default;
};

struct AlwaysBlock {
  bool star = false;  // @(*) or @*
  std::vector<SensItem> sens;
  Stmt body;

  bool is_sequential() const;
  bool operator==(const AlwaysBlock&) const = default;
};

struct Connection {
  std::string name;  // empty for positional
  std::optional<Expr> expr;
  bool operator==(const Connection&) const = default;
};

struct Instance {
  std::string module_name;
  std::string inst_name;
  std::vector<Connection> params;
  std::vector<Connection> ports;
  bool operator==(const Instance&) const = default;
};

using Item = std::variant<NetDecl, ContAssign, AlwaysBlock, Instance>;

struct AstModule {
  std::string name;
  std::vector<std::string> leading_comments;  // text without the // or /* */
  std::vector<Param> params;
  std::vector<Port> ports;
  std::vector<Item> items;

  const Port* find_port(const std::string& n) const;
  bool operator==(const AstModule&) const = default;
};

enum class SignalKind { Input, Output, InOut, Wire, Reg, Param };

struct SignalInfo {
  SignalKind kind;
  uint32_t width;
  int lo = 0;  // declared lsb; bit i of the value is declared index lo + i
};

// Every declared name in the module. Output ports keep kind Output even when
// they are also declared `reg`.
std::map<std::string, SignalInfo> signal_table(const AstModule& m);

}  // namespace rtlleak::hdl

#endif  // RTLLEAK_HDL_AST_HPP
