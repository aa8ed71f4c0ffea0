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

#include "rtlleak/hdl/eval.hpp"

#include <algorithm>
#include <map>

namespace rtlleak::hdl {

namespace {

bool is_compare(const std::string& op) {
  return op == "==" || op == "!=" || op == "===" || op == "!==" || op == "<" || op == "<=" ||
         op == ">" || op == ">=";
}
bool is_logical(const std::string& op) { return op == "&&" || op == "||"; }
bool is_shift(const std::string& op) {
  return op == "<<" || op == ">>" || op == "<<<" || op == ">>>";
}
bool is_reduction_or_not(const std::string& op) {
  return op == "!" || op == "&" || op == "~&" || op == "|" || op == "~|" || op == "^" ||
         op == "~^" || op == "^~";
}

SymbolRef must_resolve(const std::string& name, const Resolver& resolve) {
  auto r = resolve(name);
  if (!r) throw EvalError("unresolved identifier '" + name + "'");
  return *r;
}

}  // namespace

uint32_t self_width(const Expr& e, const Resolver& resolve) {
  switch (e.kind) {
    case ExprKind::Const:
      return e.value.width();
    case ExprKind::Ref:
      return must_resolve(e.name, resolve).width;
    case ExprKind::Index:
      return 1;
    case ExprKind::Slice:
      return static_cast<uint32_t>(e.hi - e.lo + 1);
    case ExprKind::Unary:
      if (is_reduction_or_not(e.op)) return 1;
      return self_width(e.args[0], resolve);
    case ExprKind::Binary:
      if (is_compare(e.op) || is_logical(e.op)) return 1;
      if (is_shift(e.op)) return self_width(e.args[0], resolve);
      return std::max(self_width(e.args[0], resolve), self_width(e.args[1], resolve));
    case ExprKind::Ternary:
      return std::max(self_width(e.args[1], resolve), self_width(e.args[2], resolve));
    case ExprKind::Concat: {
      uint32_t w = 0;
      for (const auto& a : e.args) w += self_width(a, resolve);
      return w;
    }
    case ExprKind::Repeat: {
      uint32_t w = 0;
      for (size_t i = 1; i < e.args.size(); ++i) w += self_width(e.args[i], resolve);
      return w * e.count;
    }
  }
  return 1;
}

CompiledExpr CompiledExpr::compile(const Expr& e, uint32_t target_width, const Resolver& resolve) {
  CompiledExpr c;
  uint32_t ctx = std::max(self_width(e, resolve), target_width);
  c.build(e, ctx, resolve);
  return c;
}

uint32_t CompiledExpr::width() const { return nodes_.back().width; }

void CompiledExpr::collect_slots(std::set<int>& out) const {
  for (const auto& n : nodes_)
    if (n.slot >= 0) out.insert(n.slot);
}

int CompiledExpr::build(const Expr& e, uint32_t ctx, const Resolver& resolve) {
  Node n;
  n.width = ctx;
  switch (e.kind) {
    case ExprKind::Const:
      n.op = Op::Const;
      n.constant = e.value.resized(ctx);
      break;
    case ExprKind::Ref: {
      auto s = must_resolve(e.name, resolve);
      n.op = Op::Ref;
      n.slot = s.slot;
      break;
    }
    case ExprKind::Index: {
      auto s = must_resolve(e.name, resolve);
      n.op = Op::Index;
      n.slot = s.slot;
      n.decl_lo = s.lo;
      n.kids.push_back(build(e.args[0], self_width(e.args[0], resolve), resolve));
      break;
    }
    case ExprKind::Slice: {
      auto s = must_resolve(e.name, resolve);
      n.op = Op::Slice;
      n.slot = s.slot;
      n.decl_lo = s.lo;
      n.hi = e.hi;
      n.lo = e.lo;
      break;
    }
    case ExprKind::Unary: {
      static const std::map<std::string, Op> ops = {
          {"~", Op::Not},      {"-", Op::Neg},      {"+", Op::Plus},    {"!", Op::LogNot},
          {"&", Op::RedAnd},   {"~&", Op::RedNand}, {"|", Op::RedOr},   {"~|", Op::RedNor},
          {"^", Op::RedXor},   {"~^", Op::RedXnor}, {"^~", Op::RedXnor}};
      auto it = ops.find(e.op);
      if (it == ops.end()) throw EvalError("unsupported unary operator '" + e.op + "'");
      n.op = it->second;
      uint32_t kid_ctx = is_reduction_or_not(e.op) ? self_width(e.args[0], resolve) : ctx;
      n.kids.push_back(build(e.args[0], kid_ctx, resolve));
      break;
    }
    case ExprKind::Binary: {
      static const std::map<std::string, Op> ops = {
          {"+", Op::Add},   {"-", Op::Sub},    {"*", Op::Mul},     {"/", Op::Div},
          {"%", Op::Mod},   {"&", Op::And},    {"|", Op::Or},      {"^", Op::Xor},
          {"~^", Op::Xnor}, {"^~", Op::Xnor},  {"==", Op::Eq},     {"!=", Op::Ne},
          {"===", Op::Eq},  {"!==", Op::Ne},   {"<", Op::Lt},      {"<=", Op::Le},
          {">", Op::Gt},    {">=", Op::Ge},    {"&&", Op::LogAnd}, {"||", Op::LogOr},
          {"<<", Op::Shl},  {">>", Op::Shr},   {"<<<", Op::Shl},   {">>>", Op::Shr}};
      auto it = ops.find(e.op);
      if (it == ops.end()) throw EvalError("unsupported binary operator '" + e.op + "'");
      n.op = it->second;
      if (is_compare(e.op)) {
        uint32_t w = std::max(self_width(e.args[0], resolve), self_width(e.args[1], resolve));
        n.kids.push_back(build(e.args[0], w, resolve));
        n.kids.push_back(build(e.args[1], w, resolve));
      } else if (is_logical(e.op)) {
        n.kids.push_back(build(e.args[0], self_width(e.args[0], resolve), resolve));
        n.kids.push_back(build(e.args[1], self_width(e.args[1], resolve), resolve));
      } else if (is_shift(e.op)) {
        n.kids.push_back(build(e.args[0], ctx, resolve));
        n.kids.push_back(build(e.args[1], self_width(e.args[1], resolve), resolve));
      } else {
        n.kids.push_back(build(e.args[0], ctx, resolve));
        n.kids.push_back(build(e.args[1], ctx, resolve));
      }
      break;
    }
    case ExprKind::Ternary:
      n.op = Op::Ternary;
      n.kids.push_back(build(e.args[0], self_width(e.args[0], resolve), resolve));
      n.kids.push_back(build(e.args[1], ctx, resolve));
      n.kids.push_back(build(e.args[2], ctx, resolve));
      break;
    case ExprKind::Concat:
      n.op = Op::Concat;
      for (const auto& a : e.args) n.kids.push_back(build(a, self_width(a, resolve), resolve));
      break;
    case ExprKind::Repeat:
      n.op = Op::Repeat;
      n.count = e.count;
      for (size_t i = 1; i < e.args.size(); ++i)
        n.kids.push_back(build(e.args[i], self_width(e.args[i], resolve), resolve));
      break;
  }
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size() - 1);
}

BitVec CompiledExpr::eval(std::span<const BitVec> slots, std::vector<BitVec>& scratch) const {
  scratch.resize(nodes_.size());
  auto bool_at = [](bool b, uint32_t w) { return BitVec(w, b ? 1 : 0); };
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    const uint32_t w = n.width;
    auto kid = [&](size_t k) -> const BitVec& { return scratch[n.kids[k]]; };
    BitVec& out = scratch[i];
    switch (n.op) {
      case Op::Const:
        out = n.constant;
        break;
      case Op::Ref:
        out = slots[n.slot].resized(w);
        break;
      case Op::Index: {
        const BitVec& idx = kid(0);
        bool b = false;
        if (idx.fits_u64()) {
          int64_t pos = static_cast<int64_t>(idx.to_u64()) - n.decl_lo;
          if (pos >= 0 && pos < static_cast<int64_t>(slots[n.slot].width()))
            b = slots[n.slot].bit(static_cast<uint32_t>(pos));
        }
        out = bool_at(b, w);
        break;
      }
      case Op::Slice:
        out = slots[n.slot]
                  .slice(static_cast<uint32_t>(n.lo - n.decl_lo), static_cast<uint32_t>(n.hi - n.lo + 1))
                  .resized(w);
        break;
      case Op::Not: out = ~kid(0); break;
      case Op::Neg: out = kid(0).negate(); break;
      case Op::Plus: out = kid(0); break;
      case Op::LogNot: out = bool_at(kid(0).is_zero(), w); break;
      case Op::RedAnd: out = bool_at(kid(0).reduce_and(), w); break;
      case Op::RedNand: out = bool_at(!kid(0).reduce_and(), w); break;
      case Op::RedOr: out = bool_at(kid(0).reduce_or(), w); break;
      case Op::RedNor: out = bool_at(!kid(0).reduce_or(), w); break;
      case Op::RedXor: out = bool_at(kid(0).reduce_xor(), w); break;
      case Op::RedXnor: out = bool_at(!kid(0).reduce_xor(), w); break;
      case Op::Add: out = kid(0) + kid(1); break;
      case Op::Sub: out = kid(0) - kid(1); break;
      case Op::Mul: out = kid(0) * kid(1); break;
      case Op::Div: {
        BitVec q, r;
        BitVec::divmod(kid(0), kid(1), q, r);
        out = q;
        break;
      }
      case Op::Mod: {
        BitVec q, r;
        BitVec::divmod(kid(0), kid(1), q, r);
        out = r;
        break;
      }
      case Op::And: out = kid(0) & kid(1); break;
      case Op::Or: out = kid(0) | kid(1); break;
      case Op::Xor: out = kid(0) ^ kid(1); break;
      case Op::Xnor: out = ~(kid(0) ^ kid(1)); break;
      case Op::Eq: out = bool_at(BitVec::compare(kid(0), kid(1)) == 0, w); break;
      case Op::Ne: out = bool_at(BitVec::compare(kid(0), kid(1)) != 0, w); break;
      case Op::Lt: out = bool_at(BitVec::compare(kid(0), kid(1)) < 0, w); break;
      case Op::Le: out = bool_at(BitVec::compare(kid(0), kid(1)) <= 0, w); break;
      case Op::Gt: out = bool_at(BitVec::compare(kid(0), kid(1)) > 0, w); break;
      case Op::Ge: out = bool_at(BitVec::compare(kid(0), kid(1)) >= 0, w); break;
      case Op::LogAnd: out = bool_at(!kid(0).is_zero() && !kid(1).is_zero(), w); break;
      case Op::LogOr: out = bool_at(!kid(0).is_zero() || !kid(1).is_zero(), w); break;
      case Op::Shl:
      case Op::Shr: {
        const BitVec& amt = kid(1);
        uint64_t a = amt.fits_u64() ? amt.to_u64() : UINT64_MAX;
        out = n.op == Op::Shl ? kid(0).shl(a) : kid(0).shr(a);
        break;
      }
      case Op::Ternary:
        out = kid(0).is_zero() ? kid(2) : kid(1);
        break;
      case Op::Concat:
      case Op::Repeat: {
        uint32_t total = 0;
        for (int k : n.kids) total += scratch[k].width();
        if (n.op == Op::Repeat) total *= n.count;
        BitVec acc(std::max<uint32_t>(total, 1));
        uint32_t pos = 0;
        uint32_t reps = n.op == Op::Repeat ? n.count : 1;
        for (uint32_t r = 0; r < reps; ++r) {
          for (size_t k = n.kids.size(); k-- > 0;) {
            const BitVec& part = scratch[n.kids[k]];
            acc.insert(pos, part);
            pos += part.width();
          }
        }
        out = acc.resized(w);
        break;
      }
    }
  }
  return scratch.back();
}

BitVec eval_constant(const Expr& e,
                     const std::function<std::optional<BitVec>(const std::string&)>& lookup) {
  std::vector<BitVec> slots;
  std::map<std::string, int> slot_of;
  Resolver resolve = [&](const std::string& name) -> std::optional<SymbolRef> {
    auto it = slot_of.find(name);
    if (it != slot_of.end()) return SymbolRef{it->second, slots[it->second].width(), 0};
    auto v = lookup(name);
    if (!v) return std::nullopt;
    slots.push_back(*v);
    slot_of[name] = static_cast<int>(slots.size() - 1);
    return SymbolRef{static_cast<int>(slots.size() - 1), v->width(), 0};
  };
  auto c = CompiledExpr::compile(e, 0, resolve);
  return c.eval(slots);
}

}  // namespace rtlleak::hdl
