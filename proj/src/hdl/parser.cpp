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

// Recursive-descent parser for the supported Verilog subset.

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "lexer.hpp"
#include "rtlleak/hdl/eval.hpp"
#include "rtlleak/hdl/front.hpp"

namespace rtlleak::hdl {

using detail::Tok;
using detail::Token;

ParseError::ParseError(Kind kind, int line, int col, std::string construct, const std::string& msg)
    : std::runtime_error(std::string(to_string(kind)) + " at " + std::to_string(line) + ":" +
                         std::to_string(col) + ": " + msg),
      kind_(kind),
      line_(line),
      col_(col),
      construct_(std::move(construct)) {}

const char* to_string(ParseError::Kind k) {
  switch (k) {
    case ParseError::Kind::Unsupported: return "Unsupported";
    case ParseError::Kind::Syntax: return "Syntax";
    case ParseError::Kind::Semantic: return "Semantic";
  }
  return "?";
}

Expr Expr::constant(BitVec v, char base, bool sized) {
  Expr e;
  e.kind = ExprKind::Const;
  e.value = std::move(v);
  e.base = base;
  e.sized = sized;
  return e;
}

Expr Expr::ref(std::string name) {
  Expr e;
  e.kind = ExprKind::Ref;
  e.name = std::move(name);
  return e;
}

Expr Expr::index(std::string name, Expr idx) {
  Expr e;
  e.kind = ExprKind::Index;
  e.name = std::move(name);
  e.args.push_back(std::move(idx));
  return e;
}

Expr Expr::slice(std::string name, int hi, int lo) {
  Expr e;
  e.kind = ExprKind::Slice;
  e.name = std::move(name);
  e.hi = hi;
  e.lo = lo;
  e.args.push_back(constant(BitVec(32, static_cast<uint64_t>(hi)), 'd', false));
  e.args.push_back(constant(BitVec(32, static_cast<uint64_t>(lo)), 'd', false));
  return e;
}

Expr Expr::unary(std::string op, Expr a) {
  Expr e;
  e.kind = ExprKind::Unary;
  e.op = std::move(op);
  e.args.push_back(std::move(a));
  return e;
}

Expr Expr::binary(std::string op, Expr a, Expr b) {
  Expr e;
  e.kind = ExprKind::Binary;
  e.op = std::move(op);
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

Expr Expr::ternary(Expr c, Expr t, Expr f) {
  Expr e;
  e.kind = ExprKind::Ternary;
  e.args.push_back(std::move(c));
  e.args.push_back(std::move(t));
  e.args.push_back(std::move(f));
  return e;
}

bool operator==(const CaseArm& a, const CaseArm& b) {
  return a.labels == b.labels && a.body == b.body;
}

bool AlwaysBlock::is_sequential() const {
  return std::any_of(sens.begin(), sens.end(), [](const SensItem& s) { return s.edge != Edge::None; });
}

const Port* AstModule::find_port(const std::string& n) const {
  for (const auto& p : ports)
    if (p.name == n) return &p;
  return nullptr;
}

std::map<std::string, SignalInfo> signal_table(const AstModule& m) {
  std::map<std::string, SignalInfo> t;
  for (const auto& p : m.params) {
    uint32_t w = p.range ? p.range->width() : p.resolved.width();
    t[p.name] = {SignalKind::Param, w, p.range ? p.range->lo : 0};
  }
  for (const auto& p : m.ports) {
    SignalKind k = p.dir == Direction::In ? SignalKind::Input
                   : p.dir == Direction::Out ? SignalKind::Output
                                             : SignalKind::InOut;
    t[p.name] = {k, p.width(), p.range ? p.range->lo : 0};
  }
  for (const auto& it : m.items) {
    if (const auto* d = std::get_if<NetDecl>(&it)) {
      t[d->name] = {d->kind == NetKind::Reg ? SignalKind::Reg : SignalKind::Wire, d->width(),
                    d->range ? d->range->lo : 0};
    }
  }
  return t;
}

namespace {

const std::set<std::string> kUnsupportedItems = {
    "generate", "endgenerate", "genvar",   "function", "task",     "initial",  "integer",
    "real",     "realtime",    "time",     "specify",  "defparam", "primitive", "tri",
    "tri0",     "tri1",        "wand",     "wor",      "supply0",  "supply1",  "trireg",
    "event",    "and",         "nand",     "or",       "nor",      "xor",      "xnor",
    "not",      "buf",         "bufif0",   "bufif1",   "notif0",   "notif1",   "pullup",
    "pulldown", "always_ff",   "always_comb", "always_latch", "logic", "interface", "typedef",
    "struct",   "enum",        "for",      "while",    "repeat",   "forever",  "fork",
    "casez",    "casex",       "signed",   "unsigned", "automatic", "macromodule", "bit",
    "int",      "byte",        "shortint", "longint",  "package",  "import",   "assert",
    "property", "sequence",    "wait",     "disable",  "deassign", "force",    "release",
    "config",   "library",     "table"};

const std::set<std::string> kKeywords = {
    "module", "endmodule", "input", "output", "inout", "wire", "reg", "assign", "always",
    "begin", "end", "if", "else", "case", "endcase", "default", "posedge", "negedge",
    "parameter", "localparam"};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  AstModule parse() {
    const Token& first = cur();
    if (first.kind == Tok::Eof) fail_syntax(first, "no module found");
    if (first.kind == Tok::Ident && first.text == "macromodule") unsupported(first, "macromodule");
    for (const auto& c : first.comments) {
      size_t pos = 0;
      while (pos <= c.size()) {
        size_t nl = c.find('\n', pos);
        std::string line = c.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        size_t b = line.find_first_not_of(" \t\r*/");
        size_t e = line.find_last_not_of(" \t\r");
        if (b != std::string::npos && e >= b) m_.leading_comments.push_back(line.substr(b, e - b + 1));
        if (nl == std::string::npos) break;
        pos = nl + 1;
      }
    }
    expect_word("module");
    m_.name = expect_ident("module name");
    if (is_punct("#")) {
      next();
      expect_punct("(");
      if (!is_punct(")")) {
        do {
          if (is_word("parameter") || is_word("localparam")) next();
          parse_param_decl(/*local=*/false, /*in_header=*/true);
        } while (accept_punct(","));
      }
      expect_punct(")");
    }
    if (accept_punct("(")) {
      if (!is_punct(")")) parse_port_list();
      expect_punct(")");
    }
    expect_punct(";");
    while (!is_word("endmodule")) {
      if (cur().kind == Tok::Eof) fail_syntax(cur(), "missing endmodule");
      parse_item();
    }
    next();
    if (cur().kind != Tok::Eof) {
      if (is_word("module")) unsupported(cur(), "multiple modules");
      fail_syntax(cur(), "unexpected text after endmodule");
    }
    finalize_ports();
    semantic_check();
    return std::move(m_);
  }

 private:
  // --- token helpers -------------------------------------------------------
  const Token& cur() const { return toks_[i_]; }
  const Token& peek(size_t off = 1) const { return toks_[std::min(i_ + off, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[i_];
    if (i_ + 1 < toks_.size()) ++i_;
    return t;
  }
  bool is_punct(const char* p) const { return cur().kind == Tok::Punct && cur().text == p; }
  bool is_word(const char* w) const { return cur().kind == Tok::Ident && cur().text == w; }
  bool accept_punct(const char* p) {
    if (!is_punct(p)) return false;
    next();
    return true;
  }
  bool accept_word(const char* w) {
    if (!is_word(w)) return false;
    next();
    return true;
  }
  void expect_punct(const char* p) {
    if (!accept_punct(p)) fail_syntax(cur(), std::string("expected '") + p + "'");
  }
  void expect_word(const char* w) {
    if (!accept_word(w)) fail_syntax(cur(), std::string("expected '") + w + "'");
  }
  std::string expect_ident(const char* what) {
    const Token& t = cur();
    if (t.kind != Tok::Ident) fail_syntax(t, std::string("expected ") + what);
    if (kUnsupportedItems.count(t.text)) unsupported(t, t.text);
    if (kKeywords.count(t.text)) fail_syntax(t, std::string("expected ") + what);
    next();
    return t.text;
  }

  [[noreturn]] void fail_syntax(const Token& t, const std::string& msg) {
    std::string what = t.kind == Tok::Eof ? "<eof>" : t.text;
    throw ParseError(ParseError::Kind::Syntax, t.line, t.col, what, msg + " near '" + what + "'");
  }
  [[noreturn]] void unsupported(const Token& t, const std::string& construct) {
    throw ParseError(ParseError::Kind::Unsupported, t.line, t.col, construct,
                     "unsupported construct '" + construct + "'");
  }
  [[noreturn]] void semantic(const Token& t, const std::string& construct, const std::string& msg) {
    throw ParseError(ParseError::Kind::Semantic, t.line, t.col, construct, msg);
  }

  // --- constants -----------------------------------------------------------
  BitVec const_eval(const Expr& e, const Token& at) {
    try {
      return eval_constant(e, [&](const std::string& n) -> std::optional<BitVec> {
        auto it = params_.find(n);
        if (it == params_.end()) return std::nullopt;
        return it->second;
      });
    } catch (const EvalError& err) {
      semantic(at, "constant expression", std::string("not a constant expression: ") + err.what());
    }
  }

  int const_int(const Expr& e, const Token& at) {
    BitVec v = const_eval(e, at);
    if (!v.fits_u64() || v.to_u64() > (1u << 20))
      semantic(at, "constant", "constant out of supported range");
    return static_cast<int>(v.to_u64());
  }

  std::optional<Range> parse_opt_range() {
    if (!is_punct("[")) return std::nullopt;
    const Token& at = next();
    Range r;
    r.msb = parse_expr();
    if (is_punct("+:") || is_punct("-:")) unsupported(cur(), "indexed part-select");
    expect_punct(":");
    r.lsb = parse_expr();
    expect_punct("]");
    r.hi = const_int(r.msb, at);
    r.lo = const_int(r.lsb, at);
    if (r.hi < r.lo) unsupported(at, "ascending range");
    return r;
  }

  // --- declarations --------------------------------------------------------
  void parse_param_decl(bool local, bool in_header) {
    if (is_word("integer") || is_word("real") || is_word("signed")) unsupported(cur(), cur().text);
    auto range = parse_opt_range();
    while (true) {
      const Token& at = cur();
      Param p;
      p.name = expect_ident("parameter name");
      p.range = range;
      p.local = local;
      p.in_header = in_header;
      expect_punct("=");
      p.value = parse_expr();
      BitVec v = const_eval(p.value, at);
      p.resolved = range ? v.resized(range->width()) : v;
      declare(at, p.name);
      params_[p.name] = p.resolved;
      m_.params.push_back(std::move(p));
      // In a header list, a comma may introduce another `parameter` keyword.
      if (in_header) return;
      if (!accept_punct(",")) break;
    }
  }

  void declare(const Token& at, const std::string& name) {
    if (!declared_.insert(name).second) semantic(at, name, "duplicate declaration of '" + name + "'");
  }

  static Direction dir_of(const std::string& w) {
    return w == "input" ? Direction::In : w == "output" ? Direction::Out : Direction::InOut;
  }

  void parse_port_list() {
    if (cur().kind == Tok::Ident && (is_word("input") || is_word("output") || is_word("inout"))) {
      ansi_ = true;
      Port proto;
      while (true) {
        if (is_word("input") || is_word("output") || is_word("inout")) {
          proto = Port{};
          proto.dir = dir_of(next().text);
          if (accept_word("reg")) proto.is_reg = true;
          else accept_word("wire");
          if (is_word("signed") || is_word("logic")) unsupported(cur(), cur().text);
          proto.range = parse_opt_range();
        }
        const Token& at = cur();
        Port p = proto;
        p.name = expect_ident("port name");
        if (is_punct("[")) unsupported(cur(), "port array");
        declare(at, p.name);
        m_.ports.push_back(std::move(p));
        if (!accept_punct(",")) break;
      }
    } else {
      ansi_ = false;
      do {
        const Token& at = cur();
        if (is_punct(".")) unsupported(at, "explicit port expression");
        header_names_.push_back({expect_ident("port name"), at});
      } while (accept_punct(","));
    }
  }

  void parse_body_port_decl() {
    const Token& kw = next();
    if (ansi_) fail_syntax(kw, "port redeclared in body of ANSI-style module");
    Port proto;
    proto.dir = dir_of(kw.text);
    if (accept_word("reg")) proto.is_reg = true;
    else accept_word("wire");
    if (is_word("signed")) unsupported(cur(), "signed");
    proto.range = parse_opt_range();
    do {
      const Token& at = cur();
      Port p = proto;
      p.name = expect_ident("port name");
      if (body_ports_.count(p.name)) semantic(at, p.name, "duplicate port declaration '" + p.name + "'");
      body_ports_[p.name] = p;
    } while (accept_punct(","));
    expect_punct(";");
  }

  void parse_net_decl() {
    const Token& kw = next();
    NetKind kind = kw.text == "reg" ? NetKind::Reg : NetKind::Wire;
    if (is_word("signed")) unsupported(cur(), "signed");
    auto range = parse_opt_range();
    do {
      const Token& at = cur();
      std::string name = expect_ident("net name");
      if (is_punct("[")) unsupported(cur(), "memory array");
      // A body `reg` redeclaring an output port marks it as a reg port.
      if (Port* p = find_port_decl(name)) {
        uint32_t w = range ? range->width() : 1;
        int lo = range ? range->lo : 0;
        if (w != p->width() || lo != (p->range ? p->range->lo : 0))
          semantic(at, name, "range of '" + name + "' differs from its port declaration");
        if (kind == NetKind::Reg) {
          if (p->dir != Direction::Out) semantic(at, name, "only output ports may be declared reg");
          p->is_reg = true;
        }
        if (accept_punct("=")) unsupported(at, "net declaration assignment on port");
        continue;
      }
      declare(at, name);
      NetDecl d;
      d.kind = kind;
      d.name = name;
      d.range = range;
      m_.items.push_back(d);
      if (accept_punct("=")) {
        if (kind == NetKind::Reg) unsupported(at, "reg initializer");
        ContAssign a;
        a.lhs = Expr::ref(name);
        a.rhs = parse_expr();
        m_.items.push_back(std::move(a));
      }
    } while (accept_punct(","));
    expect_punct(";");
  }

  Port* find_port_decl(const std::string& name) {
    if (!ansi_) {
      auto it = body_ports_.find(name);
      return it == body_ports_.end() ? nullptr : &it->second;
    }
    for (auto& p : m_.ports)
      if (p.name == name) return &p;
    return nullptr;
  }

  void finalize_ports() {
    if (ansi_) return;
    for (const auto& [name, at] : header_names_) {
      auto it = body_ports_.find(name);
      if (it == body_ports_.end()) semantic(at, name, "port '" + name + "' has no direction declaration");
      Port p = it->second;
      // `reg q;` may precede `output q;`.
      auto decl = std::find_if(m_.items.begin(), m_.items.end(), [&](const Item& item) {
        const auto* d = std::get_if<NetDecl>(&item);
        return d && d->name == name;
      });
      if (decl != m_.items.end()) {
        const auto& d = std::get<NetDecl>(*decl);
        if (d.kind != NetKind::Reg || p.dir != Direction::Out || d.width() != p.width())
          semantic(at, name, "conflicting declarations of '" + name + "'");
        p.is_reg = true;
        m_.items.erase(decl);
      } else {
        declare(at, name);
      }
      m_.ports.push_back(std::move(p));
    }
    for (const auto& [name, p] : body_ports_) {
      bool listed = std::any_of(header_names_.begin(), header_names_.end(),
                                [&](const auto& h) { return h.first == name; });
      if (!listed) throw ParseError(ParseError::Kind::Semantic, 0, 0, name, "'" + name + "' is not in the port list");
    }
  }

  // --- module items --------------------------------------------------------
  void parse_item() {
    const Token& t = cur();
    if (t.kind == Tok::Punct && t.text == "(" && peek().kind == Tok::Punct && peek().text == "*")
      unsupported(t, "attribute");
    if (t.kind != Tok::Ident) fail_syntax(t, "expected module item");
    const std::string& w = t.text;
    if (kUnsupportedItems.count(w)) unsupported(t, w);
    if (w == "input" || w == "output" || w == "inout") return parse_body_port_decl();
    if (w == "wire" || w == "reg") return parse_net_decl();
    if (w == "parameter" || w == "localparam") {
      next();
      parse_param_decl(w == "localparam", false);
      expect_punct(";");
      return;
    }
    if (w == "assign") {
      next();
      if (is_punct("#")) unsupported(cur(), "delay");
      do {
        ContAssign a;
        a.lhs = parse_lvalue();
        expect_punct("=");
        a.rhs = parse_expr();
        m_.items.push_back(std::move(a));
      } while (accept_punct(","));
      expect_punct(";");
      return;
    }
    if (w == "always") return parse_always();
    if (kKeywords.count(w)) fail_syntax(t, "unexpected keyword");
    // module_name [#(...)] inst_name (...);
    if (peek().kind == Tok::Ident || (peek().kind == Tok::Punct && peek().text == "#"))
      return parse_instance();
    fail_syntax(t, "expected module item");
  }

  void parse_always() {
    const Token& kw = next();
    AlwaysBlock a;
    if (!accept_punct("@")) unsupported(kw, "always without event control");
    if (accept_punct("*")) {
      a.star = true;
    } else {
      expect_punct("(");
      if (accept_punct("*")) {
        a.star = true;
      } else {
        do {
          SensItem s;
          if (accept_word("posedge")) s.edge = Edge::Pos;
          else if (accept_word("negedge")) s.edge = Edge::Neg;
          s.name = expect_ident("sensitivity signal");
          if (is_punct("[")) unsupported(cur(), "bit-select in sensitivity list");
          a.sens.push_back(s);
        } while (accept_word("or") || accept_punct(","));
      }
      expect_punct(")");
    }
    if (a.is_sequential()) {
      for (const auto& s : a.sens)
        if (s.edge == Edge::None) unsupported(kw, "mixed edge and level sensitivity");
    }
    a.body = parse_stmt();
    m_.items.push_back(std::move(a));
  }

  void parse_instance() {
    Instance inst;
    inst.module_name = expect_ident("module name");
    if (accept_punct("#")) {
      expect_punct("(");
      if (!is_punct(")")) inst.params = parse_connections();
      expect_punct(")");
    }
    inst.inst_name = expect_ident("instance name");
    if (is_punct("[")) unsupported(cur(), "instance array");
    expect_punct("(");
    if (!is_punct(")")) inst.ports = parse_connections();
    expect_punct(")");
    if (is_punct(",")) unsupported(cur(), "multiple instances per statement");
    expect_punct(";");
    m_.items.push_back(std::move(inst));
  }

  std::vector<Connection> parse_connections() {
    std::vector<Connection> out;
    do {
      Connection c;
      if (accept_punct(".")) {
        c.name = expect_ident("connection name");
        expect_punct("(");
        if (!is_punct(")")) c.expr = parse_expr();
        expect_punct(")");
      } else {
        c.expr = parse_expr();
      }
      out.push_back(std::move(c));
    } while (accept_punct(","));
    bool named = !out.front().name.empty();
    for (const auto& c : out)
      if (c.name.empty() == named) fail_syntax(cur(), "mixed named and positional connections");
    return out;
  }

  // --- statements ----------------------------------------------------------
  Stmt parse_stmt() {
    const Token& t = cur();
    if (t.kind == Tok::Punct && t.text == ";") {
      next();
      return Stmt{};  // empty block
    }
    if (t.kind == Tok::Punct && (t.text == "#" || t.text == "@")) unsupported(t, "timing control");
    if (t.kind == Tok::SysIdent) unsupported(t, "system task");
    if (t.kind == Tok::Ident) {
      if (kUnsupportedItems.count(t.text)) unsupported(t, t.text);
      if (t.text == "begin") {
        next();
        if (accept_punct(":")) expect_ident("block name");
        Stmt s;
        s.kind = StmtKind::Block;
        while (!accept_word("end")) {
          if (cur().kind == Tok::Eof) fail_syntax(cur(), "missing end");
          if (is_word("reg") || is_word("wire")) unsupported(cur(), "block-local declaration");
          s.body.push_back(parse_stmt());
        }
        return s;
      }
      if (t.text == "if") {
        next();
        Stmt s;
        s.kind = StmtKind::If;
        expect_punct("(");
        s.cond = parse_expr();
        expect_punct(")");
        s.body.push_back(parse_stmt());
        if (accept_word("else")) s.body.push_back(parse_stmt());
        return s;
      }
      if (t.text == "case") {
        next();
        Stmt s;
        s.kind = StmtKind::Case;
        expect_punct("(");
        s.cond = parse_expr();
        expect_punct(")");
        bool seen_default = false;
        while (!accept_word("endcase")) {
          if (cur().kind == Tok::Eof) fail_syntax(cur(), "missing endcase");
          CaseArm arm;
          if (is_word("default")) {
            if (seen_default) fail_syntax(cur(), "duplicate default");
            seen_default = true;
            next();
            accept_punct(":");
          } else {
            do {
              arm.labels.push_back(parse_expr());
            } while (accept_punct(","));
            expect_punct(":");
          }
          arm.body.push_back(parse_stmt());
          s.arms.push_back(std::move(arm));
        }
        return s;
      }
    }
    if (t.kind == Tok::Ident || (t.kind == Tok::Punct && t.text == "{")) {
      Stmt s;
      s.lhs = parse_lvalue();
      if (accept_punct("=")) s.kind = StmtKind::Blocking;
      else if (accept_punct("<=")) s.kind = StmtKind::NonBlocking;
      else fail_syntax(cur(), "expected '=' or '<='");
      if (is_punct("#") || is_punct("@")) unsupported(cur(), "intra-assignment timing control");
      s.rhs = parse_expr();
      expect_punct(";");
      return s;
    }
    fail_syntax(t, "expected statement");
  }

  Expr parse_lvalue() {
    if (accept_punct("{")) {
      Expr e;
      e.kind = ExprKind::Concat;
      do {
        e.args.push_back(parse_lvalue());
      } while (accept_punct(","));
      expect_punct("}");
      return e;
    }
    const Token& at = cur();
    std::string name = expect_ident("assignment target");
    return parse_selects(std::move(name), at);
  }

  // --- expressions ---------------------------------------------------------
  Expr parse_expr() {
    Expr c = parse_binary(1);
    if (accept_punct("?")) {
      Expr t = parse_expr();
      expect_punct(":");
      Expr f = parse_expr();
      return Expr::ternary(std::move(c), std::move(t), std::move(f));
    }
    return c;
  }

  static int binary_prec(const Token& t) {
    if (t.kind != Tok::Punct) return 0;
    static const std::map<std::string, int> prec = {
        {"||", 1}, {"&&", 2}, {"|", 3},  {"^", 4},  {"~^", 4},  {"^~", 4},  {"&", 5},
        {"==", 6}, {"!=", 6}, {"===", 6}, {"!==", 6}, {"<", 7},  {"<=", 7}, {">", 7},
        {">=", 7}, {"<<", 8}, {">>", 8}, {"<<<", 8}, {">>>", 8}, {"+", 9},  {"-", 9},
        {"*", 10}, {"/", 10}, {"%", 10}, {"**", 11}};
    auto it = prec.find(t.text);
    return it == prec.end() ? 0 : it->second;
  }

  Expr parse_binary(int min_prec) {
    Expr lhs = parse_unary();
    while (true) {
      int p = binary_prec(cur());
      if (p == 0 || p < min_prec) return lhs;
      const Token& op = next();
      if (op.text == "**") unsupported(op, "**");
      Expr rhs = parse_binary(p + 1);
      lhs = Expr::binary(op.text, std::move(lhs), std::move(rhs));
    }
  }

  Expr parse_unary() {
    const Token& t = cur();
    if (t.kind == Tok::Punct) {
      static const std::set<std::string> unary = {"+", "-", "!", "~", "&", "~&", "|", "~|", "^", "~^", "^~"};
      if (unary.count(t.text)) {
        next();
        return Expr::unary(t.text, parse_unary());
      }
    }
    return parse_primary();
  }

  Expr parse_number(const Token& t) {
    try {
      if (t.base == 0) {
        BitVec v = BitVec::from_dec(64 + static_cast<uint32_t>(t.digits.size()) * 4, t.digits);
        uint32_t w = std::max<uint32_t>(32, v.active_bits());
        return Expr::constant(v.resized(w), 'd', false);
      }
      uint32_t width = 32;
      bool sized = !t.size_text.empty();
      if (sized) {
        std::string s;
        for (char c : t.size_text)
          if (c != '_') s.push_back(c);
        unsigned long long n = 0;
        auto r = std::from_chars(s.data(), s.data() + s.size(), n);
        if (r.ec != std::errc() || n == 0 || n > 4096)
          semantic(t, t.text, "literal width out of range");
        width = static_cast<uint32_t>(n);
      }
      uint32_t work = sized ? width : std::max<uint32_t>(32, static_cast<uint32_t>(t.digits.size()) * 4 + 4);
      BitVec v(1);
      char base = t.base;
      switch (t.base) {
        case 'h': v = BitVec::from_hex(work, t.digits); break;
        case 'b': v = BitVec::from_bin(work, t.digits); break;
        case 'd': v = BitVec::from_dec(work, t.digits); break;
        case 'o': {
          std::string bin;
          for (char c : t.digits) {
            if (c == '_') continue;
            if (c < '0' || c > '7') semantic(t, t.text, "bad octal digit");
            int d = c - '0';
            for (int b = 2; b >= 0; --b) bin.push_back(((d >> b) & 1) ? '1' : '0');
          }
          size_t nz = bin.find('1');
          v = BitVec::from_bin(work, nz == std::string::npos ? "0" : bin.substr(nz));
          base = 'h';
          break;
        }
      }
      if (!sized) v = v.resized(std::max<uint32_t>(32, v.active_bits()));
      return Expr::constant(std::move(v), base, sized);
    } catch (const std::overflow_error&) {
      semantic(t, t.text, "literal value overflows its width");
    } catch (const std::invalid_argument&) {
      fail_syntax(t, "malformed literal");
    }
  }

  Expr parse_primary() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Number:
        next();
        return parse_number(t);
      case Tok::SysIdent:
        unsupported(t, "system function " + t.text);
      case Tok::Ident: {
        if (kUnsupportedItems.count(t.text)) unsupported(t, t.text);
        if (kKeywords.count(t.text)) fail_syntax(t, "unexpected keyword in expression");
        next();
        if (is_punct("(")) unsupported(t, "function call");
        if (is_punct(".")) unsupported(t, "hierarchical reference");
        return parse_selects(t.text, t);
      }
      case Tok::Punct:
        if (t.text == "(") {
          next();
          Expr e = parse_expr();
          expect_punct(")");
          return e;
        }
        if (t.text == "{") {
          next();
          Expr first = parse_expr();
          if (is_punct("{")) {
            Expr rep;
            rep.kind = ExprKind::Repeat;
            int n = const_int(first, t);
            if (n < 1) semantic(t, "replication", "replication count must be positive");
            rep.count = static_cast<uint32_t>(n);
            rep.args.push_back(std::move(first));
            next();
            do {
              rep.args.push_back(parse_expr());
            } while (accept_punct(","));
            expect_punct("}");
            expect_punct("}");
            return rep;
          }
          Expr cat;
          cat.kind = ExprKind::Concat;
          cat.args.push_back(std::move(first));
          while (accept_punct(",")) cat.args.push_back(parse_expr());
          expect_punct("}");
          return cat;
        }
        break;
      default:
        break;
    }
    fail_syntax(t, "expected expression");
  }

  Expr parse_selects(std::string name, const Token& at) {
    if (!accept_punct("[")) return Expr::ref(std::move(name));
    Expr first = parse_expr();
    if (is_punct("+:") || is_punct("-:")) unsupported(cur(), "indexed part-select");
    if (accept_punct(":")) {
      Expr second = parse_expr();
      expect_punct("]");
      Expr e;
      e.kind = ExprKind::Slice;
      e.name = std::move(name);
      e.hi = const_int(first, at);
      e.lo = const_int(second, at);
      if (e.hi < e.lo) unsupported(at, "reversed part-select");
      e.args.push_back(std::move(first));
      e.args.push_back(std::move(second));
      if (is_punct("[")) unsupported(cur(), "multi-dimensional select");
      return e;
    }
    expect_punct("]");
    if (is_punct("[")) unsupported(cur(), "multi-dimensional select");
    return Expr::index(std::move(name), std::move(first));
  }

  // --- semantic checks -----------------------------------------------------
  void check_expr(const Expr& e, const std::map<std::string, SignalInfo>& sig) {
    if (e.kind == ExprKind::Ref || e.kind == ExprKind::Index || e.kind == ExprKind::Slice) {
      auto it = sig.find(e.name);
      if (it == sig.end())
        throw ParseError(ParseError::Kind::Semantic, 0, 0, e.name, "undeclared identifier '" + e.name + "'");
      if (e.kind == ExprKind::Slice) {
        int lo = it->second.lo, hi = lo + static_cast<int>(it->second.width) - 1;
        if (e.lo < lo || e.hi > hi)
          throw ParseError(ParseError::Kind::Semantic, 0, 0, e.name,
                           "part-select out of range on '" + e.name + "'");
      }
    }
    for (const auto& a : e.args) check_expr(a, sig);
  }

  void check_target(const Expr& lhs, bool procedural, const std::map<std::string, SignalInfo>& sig) {
    if (lhs.kind == ExprKind::Concat) {
      for (const auto& a : lhs.args) check_target(a, procedural, sig);
      return;
    }
    auto it = sig.find(lhs.name);
    if (it == sig.end())
      throw ParseError(ParseError::Kind::Semantic, 0, 0, lhs.name, "undeclared identifier '" + lhs.name + "'");
    SignalKind k = it->second.kind;
    bool is_reg = k == SignalKind::Reg;
    if (k == SignalKind::Output) is_reg = m_.find_port(lhs.name)->is_reg;
    bool is_net = k == SignalKind::Wire || (k == SignalKind::Output && !is_reg) || k == SignalKind::InOut;
    if (procedural && !is_reg)
      throw ParseError(ParseError::Kind::Semantic, 0, 0, lhs.name,
                       "procedural assignment to non-reg '" + lhs.name + "'");
    if (!procedural && !is_net)
      throw ParseError(ParseError::Kind::Semantic, 0, 0, lhs.name,
                       "continuous assignment to non-net '" + lhs.name + "'");
  }

  void check_stmt(const Stmt& s, const std::map<std::string, SignalInfo>& sig) {
    switch (s.kind) {
      case StmtKind::Blocking:
      case StmtKind::NonBlocking:
        check_target(s.lhs, true, sig);
        check_expr(s.lhs, sig);
        check_expr(s.rhs, sig);
        break;
      case StmtKind::If:
        check_expr(s.cond, sig);
        break;
      case StmtKind::Case:
        check_expr(s.cond, sig);
        for (const auto& arm : s.arms) {
          for (const auto& l : arm.labels) check_expr(l, sig);
          for (const auto& b : arm.body) check_stmt(b, sig);
        }
        break;
      case StmtKind::Block:
        break;
    }
    for (const auto& b : s.body) check_stmt(b, sig);
  }

  void semantic_check() {
    auto sig = signal_table(m_);
    for (const auto& it : m_.items) {
      if (const auto* a = std::get_if<ContAssign>(&it)) {
        check_target(a->lhs, false, sig);
        check_expr(a->lhs, sig);
        check_expr(a->rhs, sig);
      } else if (const auto* al = std::get_if<AlwaysBlock>(&it)) {
        for (const auto& s : al->sens)
          if (!sig.count(s.name))
            throw ParseError(ParseError::Kind::Semantic, 0, 0, s.name, "undeclared identifier '" + s.name + "'");
        check_stmt(al->body, sig);
      } else if (const auto* in = std::get_if<Instance>(&it)) {
        for (const auto& c : in->ports)
          if (c.expr) check_expr(*c.expr, sig);
      }
    }
  }

  std::vector<Token> toks_;
  size_t i_ = 0;
  AstModule m_;
  std::map<std::string, BitVec> params_;
  std::set<std::string> declared_;
  bool ansi_ = true;
  std::vector<std::pair<std::string, Token>> header_names_;
  std::map<std::string, Port> body_ports_;
};

}  // namespace

AstModule parse_module(std::string_view source) {
  return Parser(detail::lex(source)).parse();
}

}  // namespace rtlleak::hdl
