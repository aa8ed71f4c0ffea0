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

#include "rtlleak/lock.hpp"

#include <boost/dynamic_bitset.hpp>

#include <map>
#include <string_view>

#include "rtlleak/hdl/eval.hpp"
#include "rtlleak/util/rng.hpp"

namespace rtlleak::lock {

using hdl::AlwaysBlock;
using hdl::AstModule;
using hdl::ContAssign;
using hdl::Expr;
using hdl::ExprKind;
using hdl::Stmt;
using hdl::StmtKind;

const char* to_string(SiteKind k) {
  switch (k) {
    case SiteKind::Constant: return "Constant";
    case SiteKind::Branch: return "Branch";
    case SiteKind::Operation: return "Operation";
  }
  return "?";
}

const char* to_string(Fallback f) {
  switch (f) {
    case Fallback::None: return "";
    case Fallback::NoSites: return "no_sites";
    case Fallback::EmptySelection: return "empty_selection";
    case Fallback::KeyNameCollision: return "key_name_collision";
  }
  return "?";
}

namespace {

// Dummy operations. Every entry keeps the operand and result widths of the
// original operator.
const std::map<std::string, std::vector<std::string>, std::less<>>& dummy_table() {
  static const std::map<std::string, std::vector<std::string>, std::less<>> t = {
      {"+", {"-", "*"}}, {"-", {"+"}},   {"*", {"+"}},   {"&", {"|", "^"}}, {"|", {"&"}},
      {"^", {"&"}},      {"<<", {">>"}}, {">>", {"<<"}}, {"==", {"!="}},    {"!=", {"=="}},
      {"<", {">="}},     {">=", {"<"}},
  };
  return t;
}

hdl::Resolver width_resolver(const AstModule& m) {
  auto table = std::make_shared<std::map<std::string, hdl::SignalInfo>>(hdl::signal_table(m));
  return [table](const std::string& n) -> std::optional<hdl::SymbolRef> {
    auto it = table->find(n);
    if (it == table->end()) return std::nullopt;
    return hdl::SymbolRef{0, it->second.width, it->second.lo};
  };
}

uint32_t literal_width(const Expr& e) { return e.value.width(); }

// Pre-order walk over the lockable positions of a module. Hooks fire on
// entry (before the node's own children) and on exit.
class SiteWalker {
 public:
  explicit SiteWalker(Scope scope) : scope_(scope) {}
  virtual ~SiteWalker() = default;

  void walk(AstModule& m) {
    for (size_t i = 0; i < m.items.size(); ++i) {
      std::string p = "items[" + std::to_string(i) + "]";
      if (auto* a = std::get_if<ContAssign>(&m.items[i])) {
        walk_expr(a->rhs, p + ".rhs");
      } else if (auto* al = std::get_if<AlwaysBlock>(&m.items[i])) {
        walk_stmt(al->body, p + ".body");
      }
    }
  }

 protected:
  virtual void enter(SiteKind, Expr&, const std::string&) {}
  virtual void leave(SiteKind, Expr&) {}

 private:
  bool in_scope(SiteKind k) const { return scope_ == Scope::All || k == SiteKind::Constant; }

  void walk_stmt(Stmt& s, const std::string& p) {
    switch (s.kind) {
      case StmtKind::Blocking:
      case StmtKind::NonBlocking:
        walk_expr(s.rhs, p + ".rhs");
        break;
      case StmtKind::If:
        walk_branch(s.cond, p + ".cond");
        for (size_t i = 0; i < s.body.size(); ++i) walk_stmt(s.body[i], p + ".body[" + std::to_string(i) + "]");
        break;
      case StmtKind::Case:
        walk_expr(s.cond, p + ".cond");
        for (size_t i = 0; i < s.arms.size(); ++i)
          for (size_t j = 0; j < s.arms[i].body.size(); ++j)
            walk_stmt(s.arms[i].body[j], p + ".arms[" + std::to_string(i) + "].body[" + std::to_string(j) + "]");
        break;
      case StmtKind::Block:
        for (size_t i = 0; i < s.body.size(); ++i) walk_stmt(s.body[i], p + ".body[" + std::to_string(i) + "]");
        break;
    }
  }

  void walk_branch(Expr& c, const std::string& p) {
    bool site = in_scope(SiteKind::Branch);
    if (site) enter(SiteKind::Branch, c, p);
    walk_expr(c, p);
    if (site) leave(SiteKind::Branch, c);
  }

  void walk_args(Expr& e, const std::string& p, size_t from = 0) {
    for (size_t i = from; i < e.args.size(); ++i) walk_expr(e.args[i], p + ".args[" + std::to_string(i) + "]");
  }

  void walk_expr(Expr& e, const std::string& p) {
    switch (e.kind) {
      case ExprKind::Const:
        if (in_scope(SiteKind::Constant)) {
          enter(SiteKind::Constant, e, p);
          leave(SiteKind::Constant, e);
        }
        break;
      case ExprKind::Ref:
      case ExprKind::Index:
      case ExprKind::Slice:
        break;
      case ExprKind::Unary:
      case ExprKind::Concat:
        walk_args(e, p);
        break;
      case ExprKind::Repeat:
        walk_args(e, p, 1);
        break;
      case ExprKind::Binary: {
        bool site = in_scope(SiteKind::Operation) && dummy_table().count(e.op) > 0;
        if (site) enter(SiteKind::Operation, e, p);
        walk_args(e, p);
        if (site) leave(SiteKind::Operation, e);
        break;
      }
      case ExprKind::Ternary:
        walk_branch(e.args[0], p + ".args[0]");
        walk_args(e, p, 1);
        break;
    }
  }

  Scope scope_;
};

class Enumerator : public SiteWalker {
 public:
  using SiteWalker::SiteWalker;
  std::vector<LockSite> sites;

 protected:
  void enter(SiteKind k, Expr& e, const std::string& p) override {
    LockSite s;
    s.id = static_cast<int>(sites.size());
    s.kind = k;
    s.ast_path = p;
    s.bit_cost = k == SiteKind::Constant ? literal_width(e) : 1;
    if (k == SiteKind::Operation) s.op = e.op;
    sites.push_back(std::move(s));
  }
};

Expr key_ref(const std::string& key, uint32_t lo, uint32_t hi) {
  if (lo == hi) return Expr::index(key, Expr::constant(BitVec(32, lo), 'd', false));
  return Expr::slice(key, static_cast<int>(hi), static_cast<int>(lo));
}

class Transformer : public SiteWalker {
 public:
  Transformer(Scope scope, const std::map<int, KeyBinding>& bound, std::string key, BitVec& correct,
              SplitMix64& rng, hdl::Resolver resolve)
      : SiteWalker(scope), bound_(bound), key_(std::move(key)), correct_(correct), rng_(rng),
        resolve_(std::move(resolve)) {}

  int visited = 0;

 protected:
  void enter(SiteKind k, Expr& e, const std::string& p) override {
    Frame f;
    f.id = visited++;
    auto it = bound_.find(f.id);
    if (it != bound_.end()) {
      const KeyBinding& b = it->second;
      if (b.site.kind != k || b.site.ast_path != p) throw LockError("site order diverged at " + p);
      f.binding = &b;
      if (k == SiteKind::Branch) f.cond_width = hdl::self_width(e, resolve_);
    }
    stack_.push_back(f);
  }

  void leave(SiteKind k, Expr& e) override {
    Frame f = stack_.back();
    stack_.pop_back();
    if (!f.binding) return;
    const KeyBinding& b = *f.binding;
    switch (k) {
      case SiteKind::Constant: {
        if (b.bit_hi - b.bit_lo + 1 != e.value.width()) throw LockError("constant width changed");
        correct_.insert(b.bit_lo, e.value);
        e = key_ref(key_, b.bit_lo, b.bit_hi);
        break;
      }
      case SiteKind::Branch: {
        Expr c = std::move(e);
        if (f.cond_width > 1) c = Expr::unary("|", std::move(c));
        bool xnor = rng_.coin();
        if (xnor) c = Expr::unary("~", std::move(c));
        correct_.set_bit(b.bit_lo, xnor);
        e = Expr::binary("^", std::move(c), key_ref(key_, b.bit_lo, b.bit_lo));
        break;
      }
      case SiteKind::Operation: {
        const auto& dummies = dummy_table().find(e.op)->second;
        const std::string& dummy = dummies[rng_.below(dummies.size())];
        Expr alt = Expr::binary(dummy, e.args[0], e.args[1]);
        correct_.set_bit(b.bit_lo, true);
        e = Expr::ternary(key_ref(key_, b.bit_lo, b.bit_lo), std::move(e), std::move(alt));
        break;
      }
    }
  }

 private:
  struct Frame {
    int id = 0;
    const KeyBinding* binding = nullptr;
    uint32_t cond_width = 1;
  };

  const std::map<int, KeyBinding>& bound_;
  std::string key_;
  BitVec& correct_;
  SplitMix64& rng_;
  hdl::Resolver resolve_;
  std::vector<Frame> stack_;
};

uint64_t module_seed(uint64_t seed, const std::string& name) {
  // Mixing through SplitMix keeps nearby seeds uncorrelated.
  return SplitMix64(seed ^ fnv1a64(name))();
}

}  // namespace

std::vector<LockSite> enumerate_sites(const AstModule& m, Scope scope) {
  AstModule copy = m;
  Enumerator e(scope);
  e.walk(copy);
  return std::move(e.sites);
}

uint64_t max_key_size(const std::vector<LockSite>& sites) {
  uint64_t total = 0;
  for (const auto& s : sites) total += s.bit_cost;
  return total;
}

Selection select_sites(const std::vector<LockSite>& sites, uint32_t budget_pct, uint64_t seed) {
  if (budget_pct == 0 || budget_pct > 100) throw std::invalid_argument("budget_pct must lie in (0, 100]");
  Selection sel;
  sel.target = max_key_size(sites) * budget_pct / 100;
  std::vector<LockSite> order = sites;
  SplitMix64 rng(seed);
  rng.shuffle(order);

  // reach[i][s]: some subset of order[i..] has cost exactly s.
  const size_t n = order.size();
  const size_t cap = sel.target + 1;
  std::vector<boost::dynamic_bitset<>> reach(n + 1, boost::dynamic_bitset<>(cap));
  reach[n].set(0);
  for (size_t i = n; i-- > 0;) {
    reach[i] = reach[i + 1];
    if (order[i].bit_cost < cap) reach[i] |= reach[i + 1] << order[i].bit_cost;
  }
  uint64_t need = sel.target;
  while (!reach[0].test(need)) --need;

  for (size_t i = 0; i < n && need > 0; ++i) {
    uint64_t c = order[i].bit_cost;
    if (c <= need && reach[i + 1].test(need - c)) {
      sel.sites.push_back(order[i]);
      sel.consumed += c;
      need -= c;
    }
  }
  return sel;
}

LockResult lock_module(const AstModule& m, const LockStrategy& strategy) {
  LockResult r;
  r.locked = m;
  r.key.key_port_name = strategy.key_port_name;
  r.report.module = m.name;

  auto sites = enumerate_sites(m, strategy.scope);
  r.report.sites_considered = static_cast<uint32_t>(sites.size());
  auto fallback = [&](Fallback why) {
    r.report.locked = false;
    r.report.reason = why;
    r.report.sites_locked = 0;
    r.report.key_width = 0;
    r.key.width = 0;
    r.key.bindings.clear();
    r.key.correct_value = BitVec();
    r.locked = m;
    return r;
  };
  if (sites.empty()) return fallback(Fallback::NoSites);
  if (hdl::signal_table(m).count(strategy.key_port_name) || strategy.key_port_name == m.name)
    return fallback(Fallback::KeyNameCollision);

  SplitMix64 rng(module_seed(strategy.seed, m.name));
  Selection sel = select_sites(sites, strategy.budget_pct, rng());
  if (sel.sites.empty()) return fallback(Fallback::EmptySelection);

  std::map<int, KeyBinding> bound;
  uint32_t next = 0;
  for (const auto& s : sel.sites) {
    KeyBinding b{s, next, next + s.bit_cost - 1};
    next += s.bit_cost;
    r.key.bindings.push_back(b);
    bound.emplace(s.id, b);
  }
  r.key.width = next;
  r.key.correct_value = BitVec(next);

  Transformer t(strategy.scope, bound, strategy.key_port_name, r.key.correct_value, rng, width_resolver(m));
  t.walk(r.locked);
  if (t.visited != static_cast<int>(sites.size())) throw LockError("site count diverged");

  hdl::Port key;
  key.name = strategy.key_port_name;
  key.dir = hdl::Direction::In;
  if (next > 1) {
    hdl::Range range;
    range.hi = static_cast<int>(next - 1);
    range.lo = 0;
    range.msb = Expr::constant(BitVec(32, next - 1), 'd', false);
    range.lsb = Expr::constant(BitVec(32, 0), 'd', false);
    key.range = range;
  }
  r.locked.ports.push_back(std::move(key));

  r.report.locked = true;
  r.report.sites_locked = static_cast<uint32_t>(sel.sites.size());
  r.report.key_width = next;
  return r;
}

namespace {

class KeyFolder {
 public:
  KeyFolder(const std::string& key, const BitVec& value) : key_(key), value_(value) {}

  // Bit of the key selected by `e`, if `e` is a single-bit key reference.
  std::optional<bool> key_bit(const Expr& e) const {
    if (e.kind == ExprKind::Index && e.name == key_ && e.args[0].kind == ExprKind::Const)
      return value_.bit(static_cast<uint32_t>(e.args[0].value.to_u64()));
    if (e.kind == ExprKind::Ref && e.name == key_ && value_.width() == 1) return value_.bit(0);
    return std::nullopt;
  }

  void fold(Expr& e) const {
    if (e.kind == ExprKind::Ternary) {
      if (auto b = key_bit(e.args[0])) {
        Expr pick = std::move(e.args[*b ? 1 : 2]);
        e = std::move(pick);
        fold(e);
        return;
      }
    }
    if (e.kind == ExprKind::Binary && e.op == "^") {
      if (auto b = key_bit(e.args[1])) {
        Expr x = std::move(e.args[0]);
        fold(x);
        if (*b) x = (x.kind == ExprKind::Unary && x.op == "~") ? Expr(std::move(x.args[0])) : Expr::unary("~", std::move(x));
        e = std::move(x);
        return;
      }
    }
    if (e.name == key_) {
      if (e.kind == ExprKind::Slice) {
        e = Expr::constant(value_.slice(static_cast<uint32_t>(e.lo), static_cast<uint32_t>(e.hi - e.lo + 1)));
        return;
      }
      if (e.kind == ExprKind::Index && e.args[0].kind == ExprKind::Const) {
        e = Expr::constant(value_.slice(static_cast<uint32_t>(e.args[0].value.to_u64()), 1));
        return;
      }
      if (e.kind == ExprKind::Ref) {
        e = Expr::constant(value_);
        return;
      }
      throw LockError("unsupported key reference shape");
    }
    for (auto& a : e.args) fold(a);
  }

  void fold(Stmt& s) const {
    fold(s.rhs);
    fold(s.cond);
    for (auto& b : s.body) fold(b);
    for (auto& arm : s.arms)
      for (auto& b : arm.body) fold(b);
  }

 private:
  const std::string& key_;
  const BitVec& value_;
};

}  // namespace

AstModule apply_key(const AstModule& locked, const KeySpec& key, const BitVec& value) {
  if (key.width == 0) return locked;  // fallback modules carry no key
  if (value.width() != key.width)
    throw WidthMismatch("key value has " + std::to_string(value.width()) + " bits, expected " +
                        std::to_string(key.width));
  AstModule out = locked;
  KeyFolder folder(key.key_port_name, value);
  for (auto& item : out.items) {
    if (auto* a = std::get_if<ContAssign>(&item)) {
      folder.fold(a->rhs);
    } else if (auto* al = std::get_if<AlwaysBlock>(&item)) {
      folder.fold(al->body);
    }
  }
  std::erase_if(out.ports, [&](const hdl::Port& p) { return p.name == key.key_port_name; });
  return out;
}

namespace {

// Consumes `field[N]` or `field` from the front of `p`.
bool take(std::string_view& p, std::string_view field, size_t* index) {
  if (!p.starts_with(field)) return false;
  std::string_view rest = p.substr(field.size());
  if (index) {
    if (!rest.starts_with('[')) return false;
    size_t close = rest.find(']');
    if (close == std::string_view::npos || close == 1) return false;
    size_t v = 0;
    for (char c : rest.substr(1, close - 1)) {
      if (c < '0' || c > '9') return false;
      v = v * 10 + static_cast<size_t>(c - '0');
    }
    *index = v;
    rest = rest.substr(close + 1);
  } else if (!rest.empty() && rest[0] != '.') {
    return false;
  }
  if (rest.starts_with('.')) rest.remove_prefix(1);
  p = rest;
  return true;
}

const Expr* find_in_expr(const Expr& e, std::string_view p) {
  if (p.empty()) return &e;
  size_t i = 0;
  if (take(p, "args", &i) && i < e.args.size()) return find_in_expr(e.args[i], p);
  return nullptr;
}

const Expr* find_in_stmt(const Stmt& s, std::string_view p) {
  size_t i = 0, j = 0;
  if (take(p, "rhs", nullptr)) return find_in_expr(s.rhs, p);
  if (take(p, "cond", nullptr)) return find_in_expr(s.cond, p);
  if (take(p, "body", &i)) return i < s.body.size() ? find_in_stmt(s.body[i], p) : nullptr;
  if (take(p, "arms", &i) && i < s.arms.size() && take(p, "body", &j) && j < s.arms[i].body.size())
    return find_in_stmt(s.arms[i].body[j], p);
  return nullptr;
}

}  // namespace

const Expr* find_expr(const AstModule& m, const std::string& path) {
  std::string_view p = path;
  size_t i = 0;
  if (!take(p, "items", &i) || i >= m.items.size()) return nullptr;
  if (const auto* a = std::get_if<ContAssign>(&m.items[i])) {
    if (take(p, "rhs", nullptr)) return find_in_expr(a->rhs, p);
  } else if (const auto* al = std::get_if<AlwaysBlock>(&m.items[i])) {
    if (take(p, "body", nullptr)) return find_in_stmt(al->body, p);
  }
  return nullptr;
}

}  // namespace rtlleak::lock
