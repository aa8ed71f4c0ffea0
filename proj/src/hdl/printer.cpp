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

#include <map>

#include "rtlleak/hdl/front.hpp"

namespace rtlleak::hdl {

namespace {

int prec_of(const Expr& e) {
  if (e.kind == ExprKind::Ternary) return 0;
  if (e.kind != ExprKind::Binary) return 100;
  static const std::map<std::string, int> prec = {
      {"||", 1}, {"&&", 2}, {"|", 3},  {"^", 4},  {"~^", 4},  {"^~", 4},  {"&", 5},
      {"==", 6}, {"!=", 6}, {"===", 6}, {"!==", 6}, {"<", 7},  {"<=", 7}, {">", 7},
      {">=", 7}, {"<<", 8}, {">>", 8}, {"<<<", 8}, {">>>", 8}, {"+", 9},  {"-", 9},
      {"*", 10}, {"/", 10}, {"%", 10}};
  return prec.at(e.op);
}

std::string literal(const Expr& e) {
  const BitVec& v = e.value;
  if (!e.sized && e.base == 'd') return v.to_dec();
  std::string prefix = e.sized ? std::to_string(v.width()) + "'" : "'";
  switch (e.base) {
    case 'b': return prefix + "b" + v.to_bin();
    case 'd': return prefix + "d" + v.to_dec();
    default: return prefix + "h" + v.to_hex();
  }
}

void expr(std::string& out, const Expr& e);

void wrapped(std::string& out, const Expr& e, bool paren) {
  if (paren) out += '(';
  expr(out, e);
  if (paren) out += ')';
}

void expr(std::string& out, const Expr& e) {
  switch (e.kind) {
    case ExprKind::Const:
      out += literal(e);
      break;
    case ExprKind::Ref:
      out += e.name;
      break;
    case ExprKind::Index:
      out += e.name + "[";
      expr(out, e.args[0]);
      out += "]";
      break;
    case ExprKind::Slice:
      out += e.name + "[";
      expr(out, e.args[0]);
      out += ":";
      expr(out, e.args[1]);
      out += "]";
      break;
    case ExprKind::Unary: {
      out += e.op;
      const Expr& a = e.args[0];
      wrapped(out, a, a.kind == ExprKind::Unary || a.kind == ExprKind::Binary || a.kind == ExprKind::Ternary);
      break;
    }
    case ExprKind::Binary: {
      int p = prec_of(e);
      wrapped(out, e.args[0], prec_of(e.args[0]) < p);
      out += " " + e.op + " ";
      wrapped(out, e.args[1], prec_of(e.args[1]) <= p);
      break;
    }
    case ExprKind::Ternary:
      wrapped(out, e.args[0], e.args[0].kind == ExprKind::Ternary);
      out += " ? ";
      wrapped(out, e.args[1], e.args[1].kind == ExprKind::Ternary);
      out += " : ";
      expr(out, e.args[2]);
      break;
    case ExprKind::Concat:
      out += "{";
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        expr(out, e.args[i]);
      }
      out += "}";
      break;
    case ExprKind::Repeat:
      out += "{";
      expr(out, e.args[0]);
      out += "{";
      for (size_t i = 1; i < e.args.size(); ++i) {
        if (i > 1) out += ", ";
        expr(out, e.args[i]);
      }
      out += "}}";
      break;
  }
}

std::string range(const std::optional<Range>& r) {
  if (!r) return "";
  return "[" + print_expr(r->msb) + ":" + print_expr(r->lsb) + "] ";
}

std::string indent(int n) { return std::string(static_cast<size_t>(n) * 2, ' '); }

void stmt(std::string& out, const Stmt& s, int ind, bool inline_first = false);

// Prints a statement that follows a header on the same line ("if (c)",
// "label:"). Blocks stay on the line; anything else goes on the next line.
void nested(std::string& out, const Stmt& s, int ind) {
  if (s.kind == StmtKind::Block) {
    out += " ";
    stmt(out, s, ind, true);
  } else {
    out += "\n";
    stmt(out, s, ind + 1);
  }
}

void stmt(std::string& out, const Stmt& s, int ind, bool inline_first) {
  if (!inline_first) out += indent(ind);
  switch (s.kind) {
    case StmtKind::Blocking:
    case StmtKind::NonBlocking:
      expr(out, s.lhs);
      out += s.kind == StmtKind::Blocking ? " = " : " <= ";
      expr(out, s.rhs);
      out += ";\n";
      break;
    case StmtKind::Block:
      out += "begin\n";
      for (const auto& b : s.body) stmt(out, b, ind + 1);
      out += indent(ind) + "end\n";
      break;
    case StmtKind::If:
      out += "if (";
      expr(out, s.cond);
      out += ")";
      nested(out, s.body[0], ind);
      if (s.has_else()) {
        out += indent(ind) + "else";
        const Stmt& e = s.body[1];
        if (e.kind == StmtKind::If) {
          out += " ";
          stmt(out, e, ind, true);
        } else {
          nested(out, e, ind);
        }
      }
      break;
    case StmtKind::Case:
      out += "case (";
      expr(out, s.cond);
      out += ")\n";
      for (const auto& arm : s.arms) {
        out += indent(ind + 1);
        if (arm.labels.empty()) {
          out += "default:";
        } else {
          for (size_t i = 0; i < arm.labels.size(); ++i) {
            if (i) out += ", ";
            expr(out, arm.labels[i]);
          }
          out += ":";
        }
        const Stmt& b = arm.body.front();
        if (b.kind == StmtKind::Block) {
          out += " ";
          stmt(out, b, ind + 1, true);
        } else {
          out += "\n";
          stmt(out, b, ind + 2);
        }
      }
      out += indent(ind) + "endcase\n";
      break;
  }
}

void connections(std::string& out, const std::vector<Connection>& conns) {
  for (size_t i = 0; i < conns.size(); ++i) {
    if (i) out += ", ";
    const auto& c = conns[i];
    if (!c.name.empty()) {
      out += "." + c.name + "(";
      if (c.expr) expr(out, *c.expr);
      out += ")";
    } else if (c.expr) {
      expr(out, *c.expr);
    }
  }
}

const char* dir_name(Direction d) {
  switch (d) {
    case Direction::In: return "input";
    case Direction::Out: return "output";
    case Direction::InOut: return "inout";
  }
  return "input";
}

}  // namespace

std::string print_expr(const Expr& e) {
  std::string out;
  expr(out, e);
  return out;
}

std::string print_module(const AstModule& m) {
  std::string out;
  for (const auto& c : m.leading_comments) out += "// " + c + "\n";
  out += "module " + m.name;
  std::vector<const Param*> header, body;
  for (const auto& p : m.params) (p.in_header ? header : body).push_back(&p);
  auto param_text = [](const Param& p) {
    return std::string(p.local ? "localparam " : "parameter ") + range(p.range) + p.name + " = " +
           print_expr(p.value);
  };
  if (!header.empty()) {
    out += " #(\n";
    for (size_t i = 0; i < header.size(); ++i)
      out += "  " + param_text(*header[i]) + (i + 1 < header.size() ? ",\n" : "\n");
    out += ")";
  }
  out += " (";
  if (!m.ports.empty()) {
    out += "\n";
    for (size_t i = 0; i < m.ports.size(); ++i) {
      const Port& p = m.ports[i];
      out += "  ";
      out += dir_name(p.dir);
      out += p.is_reg ? " reg " : " ";
      out += range(p.range) + p.name + (i + 1 < m.ports.size() ? ",\n" : "\n");
    }
  }
  out += ");\n";
  for (const Param* p : body) out += "  " + param_text(*p) + ";\n";
  for (const auto& item : m.items) {
    if (const auto* d = std::get_if<NetDecl>(&item)) {
      out += std::string("  ") + (d->kind == NetKind::Reg ? "reg " : "wire ") + range(d->range) + d->name + ";\n";
    } else if (const auto* a = std::get_if<ContAssign>(&item)) {
      out += "  assign ";
      expr(out, a->lhs);
      out += " = ";
      expr(out, a->rhs);
      out += ";\n";
    } else if (const auto* al = std::get_if<AlwaysBlock>(&item)) {
      out += "  always @(";
      if (al->star) {
        out += "*";
      } else {
        for (size_t i = 0; i < al->sens.size(); ++i) {
          if (i) out += " or ";
          const auto& s = al->sens[i];
          if (s.edge == Edge::Pos) out += "posedge ";
          if (s.edge == Edge::Neg) out += "negedge ";
          out += s.name;
        }
      }
      out += ")";
      nested(out, al->body, 1);
    } else if (const auto* in = std::get_if<Instance>(&item)) {
      out += "  " + in->module_name;
      if (!in->params.empty()) {
        out += " #(";
        connections(out, in->params);
        out += ")";
      }
      out += " " + in->inst_name + " (";
      connections(out, in->ports);
      out += ");\n";
    }
  }
  out += "endmodule\n";
  return out;
}

}  // namespace rtlleak::hdl
