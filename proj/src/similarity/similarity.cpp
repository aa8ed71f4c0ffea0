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

#include <algorithm>
#include <set>

#include "rtlleak/hdl/front.hpp"
#include "rtlleak/util/rng.hpp"

namespace rtlleak::sim {

using hdl::Expr;
using hdl::ExprKind;
using hdl::Stmt;
using hdl::StmtKind;

const char* to_string(Normalization n) { return n == Normalization::Raw ? "raw" : "ident"; }

Normalization normalization_from(const std::string& s) {
  if (s == "raw") return Normalization::Raw;
  if (s == "ident" || s == "ident-normalized") return Normalization::IdentNormalized;
  throw std::invalid_argument("unknown normalization: " + s);
}

namespace {

class Serializer {
 public:
  explicit Serializer(Normalization n) { ts_.normalization = n; }

  TokenStream take() { return std::move(ts_); }

  void module(const hdl::AstModule& m) {
    open("module");
    ident(m.name);
    for (const auto& p : m.params) {
      open(p.local ? "localparam" : "parameter");
      ident(p.name);
      if (p.range) width(p.range->width());
      expr(p.value);
      close();
    }
    for (const auto& p : m.ports) {
      open("port");
      keyword(p.dir == hdl::Direction::In ? "input" : p.dir == hdl::Direction::Out ? "output" : "inout");
      if (p.is_reg) keyword("reg");
      width(p.width());
      ident(p.name);
      close();
    }
    // No closing token for the module itself, so a module's stream is a
    // prefix of the stream of the same module with items appended.
    for (const auto& item : m.items) std::visit([this](const auto& i) { this->item(i); }, item);
  }

 private:
  void emit(TokenClass c, std::string text) {
    uint32_t pos = next_pos_;
    next_pos_ += static_cast<uint32_t>(text.size()) + 1;
    ts_.tokens.push_back(Token{c, std::move(text), pos});
  }
  void open(const std::string& kind) { emit(TokenClass::Open, "(" + kind); }
  void close() { emit(TokenClass::Close, ")"); }
  void keyword(const std::string& k) { emit(TokenClass::Keyword, k); }
  void width(uint32_t w) { emit(TokenClass::Keyword, "w" + std::to_string(w)); }
  void ident(const std::string& name) {
    emit(TokenClass::Ident, ts_.normalization == Normalization::Raw ? name : "IDENT");
  }

  void literal(const Expr& e) {
    if (ts_.normalization == Normalization::Raw) {
      emit(TokenClass::Literal, hdl::print_expr(e));
    } else {
      emit(TokenClass::Literal, std::to_string(e.value.width()) + "'h" + e.value.to_hex());
    }
  }

  void expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Const:
        literal(e);
        return;
      case ExprKind::Ref:
        ident(e.name);
        return;
      case ExprKind::Index:
        open("index");
        ident(e.name);
        expr(e.args[0]);
        close();
        return;
      case ExprKind::Slice:
        open("slice");
        ident(e.name);
        expr(e.args[0]);
        expr(e.args[1]);
        close();
        return;
      case ExprKind::Unary:
      case ExprKind::Binary:
        emit(TokenClass::Operator, "(" + e.op);
        for (const auto& a : e.args) expr(a);
        close();
        return;
      case ExprKind::Ternary:
        emit(TokenClass::Operator, "(?:");
        for (const auto& a : e.args) expr(a);
        close();
        return;
      case ExprKind::Concat:
        open("concat");
        for (const auto& a : e.args) expr(a);
        close();
        return;
      case ExprKind::Repeat:
        open("repeat");
        for (const auto& a : e.args) expr(a);
        close();
        return;
    }
  }

  void stmt(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Blocking:
      case StmtKind::NonBlocking:
        open(s.kind == StmtKind::Blocking ? "=" : "<=");
        expr(s.lhs);
        expr(s.rhs);
        close();
        return;
      case StmtKind::If:
        open("if");
        expr(s.cond);
        for (const auto& b : s.body) stmt(b);
        close();
        return;
      case StmtKind::Case:
        open("case");
        expr(s.cond);
        for (const auto& arm : s.arms) {
          open(arm.labels.empty() ? "default" : "arm");
          for (const auto& l : arm.labels) expr(l);
          for (const auto& b : arm.body) stmt(b);
          close();
        }
        close();
        return;
      case StmtKind::Block:
        open("begin");
        for (const auto& b : s.body) stmt(b);
        close();
        return;
    }
  }

  void item(const hdl::NetDecl& d) {
    open(d.kind == hdl::NetKind::Wire ? "wire" : "reg");
    width(d.width());
    ident(d.name);
    close();
  }
  void item(const hdl::ContAssign& a) {
    open("assign");
    expr(a.lhs);
    expr(a.rhs);
    close();
  }
  void item(const hdl::AlwaysBlock& a) {
    open("always");
    if (a.star) keyword("*");
    for (const auto& s : a.sens) {
      keyword(s.edge == hdl::Edge::Pos ? "posedge" : s.edge == hdl::Edge::Neg ? "negedge" : "level");
      ident(s.name);
    }
    stmt(a.body);
    close();
  }
  void item(const hdl::Instance& inst) {
    open("instance");
    ident(inst.module_name);
    ident(inst.inst_name);
    for (const auto* list : {&inst.params, &inst.ports}) {
      for (const auto& c : *list) {
        open("conn");
        if (!c.name.empty()) ident(c.name);
        if (c.expr) expr(*c.expr);
        close();
      }
    }
    close();
  }

  TokenStream ts_;
  uint32_t next_pos_ = 0;
};

}  // namespace

TokenStream tokenize(const hdl::AstModule& m, Normalization n) {
  Serializer s(n);
  s.module(m);
  return s.take();
}

uint64_t token_hash(const Token& t) {
  uint64_t h = fnv1a64(std::string_view(reinterpret_cast<const char*>(&t.cls), 1));
  return fnv1a64(t.text, h);
}

std::vector<uint64_t> kgram_hashes(const TokenStream& ts, uint32_t k) {
  std::vector<uint64_t> out;
  const size_t n = ts.tokens.size();
  if (k == 0 || n < k) return out;
  uint64_t top = 1;  // B^(k-1)
  for (uint32_t i = 1; i < k; ++i) top *= kGramBase;
  uint64_t h = 0;
  std::vector<uint64_t> th(n);
  for (size_t i = 0; i < n; ++i) th[i] = token_hash(ts.tokens[i]);
  for (size_t i = 0; i < k; ++i) h = h * kGramBase + th[i];
  out.push_back(h);
  for (size_t i = k; i < n; ++i) {
    h = (h - th[i - k] * top) * kGramBase + th[i];
    out.push_back(h);
  }
  return out;
}

FingerprintSet fingerprint(const TokenStream& ts, uint32_t k, uint32_t w) {
  if (k < 2 || w < 1) throw std::invalid_argument("fingerprint requires k >= 2 and w >= 1");
  FingerprintSet fs;
  fs.k = k;
  fs.w = w;
  fs.normalization = ts.normalization;
  std::vector<uint64_t> h = kgram_hashes(ts, k);
  if (h.empty()) return fs;
  const size_t win = std::min<size_t>(w, h.size());
  std::set<Fingerprint> picked;
  for (size_t start = 0; start + win <= h.size(); ++start) {
    size_t best = start;
    for (size_t i = start; i < start + win; ++i)
      if (h[i] <= h[best]) best = i;
    picked.insert(Fingerprint{h[best], static_cast<uint32_t>(best)});
  }
  fs.prints.assign(picked.begin(), picked.end());
  std::sort(fs.prints.begin(), fs.prints.end(),
            [](const Fingerprint& a, const Fingerprint& b) { return a.pos < b.pos; });
  return fs;
}

SimilarityResult score(const FingerprintSet& gen, const FingerprintSet& ref, ScoreMode mode) {
  if (gen.k != ref.k || gen.w != ref.w || gen.normalization != ref.normalization)
    throw ParamMismatch("fingerprint parameters differ");
  std::set<uint64_t> g, r;
  for (const auto& p : gen.prints) g.insert(p.hash);
  for (const auto& p : ref.prints) r.insert(p.hash);
  SimilarityResult res;
  res.gen_total = g.size();
  res.ref_total = r.size();
  for (uint64_t x : r) res.shared += g.count(x);
  if (mode == ScoreMode::Jaccard) {
    size_t uni = g.size() + r.size() - res.shared;
    res.ref_empty = r.empty();
    res.ss = uni ? static_cast<double>(res.shared) / static_cast<double>(uni) : 0.0;
    return res;
  }
  if (r.empty()) {
    res.ref_empty = true;
    res.ss = 0;
    return res;
  }
  res.ss = static_cast<double>(res.shared) / static_cast<double>(res.ref_total);
  return res;
}

bool classify_leak(double ss, double threshold) {
  // Absorbs rounding in shared/ref_total so that 3/5 counts as 0.60.
  return ss >= threshold - 1e-12;
}

double ast_pass_rate(const std::map<std::string, std::vector<bool>>& per_module_flags) {
  if (per_module_flags.empty()) throw EmptyCorpus("no modules");
  double sum = 0;
  for (const auto& [name, flags] : per_module_flags) {
    if (flags.empty()) throw EmptyCorpus("module " + name + " has no samples");
    sum += static_cast<double>(std::count(flags.begin(), flags.end(), true)) / static_cast<double>(flags.size());
  }
  return 100.0 * sum / static_cast<double>(per_module_flags.size());
}

}  // namespace rtlleak::sim
