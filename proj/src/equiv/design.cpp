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

#include "design.hpp"

#include <algorithm>
#include <functional>

namespace rtlleak::equiv::detail {

using hdl::Expr;
using hdl::ExprKind;
using hdl::SignalKind;
using hdl::Stmt;
using hdl::StmtKind;

namespace {

constexpr int kMaxSettleIterations = 64;

// Signals named by an instance connection expression.
void connection_names(const Expr& e, std::set<std::string>& out) {
  if (e.kind == ExprKind::Ref || e.kind == ExprKind::Index || e.kind == ExprKind::Slice) out.insert(e.name);
  for (const auto& a : e.args) connection_names(a, out);
}

}  // namespace

Design::Design(const hdl::AstModule& m) {
  for (const auto& [name, info] : hdl::signal_table(m)) {
    slot_of_[name] = static_cast<int>(slots_.size());
    slots_.push_back(SlotInfo{name, info.width, info.lo, info.kind});
    base_.emplace_back(info.width);
  }
  for (const auto& p : m.params) base_[static_cast<size_t>(slot_of_.at(p.name))] = p.resolved.resized(slots_[static_cast<size_t>(slot_of_.at(p.name))].width);

  for (const auto& item : m.items) {
    if (const auto* a = std::get_if<hdl::ContAssign>(&item)) {
      Process p;
      Stmt s;
      s.kind = StmtKind::Blocking;
      s.lhs = a->lhs;
      s.rhs = a->rhs;
      p.body.push_back(compile_stmt(s));
      procs_.push_back(std::move(p));
    } else if (const auto* al = std::get_if<hdl::AlwaysBlock>(&item)) {
      Process p;
      p.seq = al->is_sequential();
      p.body.push_back(compile_stmt(al->body));
      procs_.push_back(std::move(p));
    } else if (const auto* inst = std::get_if<hdl::Instance>(&item)) {
      std::set<std::string> names;
      for (const auto& c : inst->ports)
        if (c.expr) connection_names(*c.expr, names);
      for (const auto& n : names) {
        int s = slot_of_.at(n);
        if (slots_[static_cast<size_t>(s)].kind != SignalKind::Input) opaque_.insert(s);
      }
    }
  }

  for (size_t i = 0; i < procs_.size(); ++i) {
    auto& p = procs_[i];
    for (const auto& s : p.body) collect(s, p.reads, p.writes);
    for (int w : p.writes) {
      SignalKind k = slots_[static_cast<size_t>(w)].kind;
      if (k == SignalKind::Input || k == SignalKind::InOut || k == SignalKind::Param)
        throw ElaborationError("assignment to " + slots_[static_cast<size_t>(w)].name);
      (p.seq ? seq_writers_ : comb_writers_)[w].push_back(static_cast<int>(i));
    }
  }
  for (const auto& [s, procs] : seq_writers_) {
    if (comb_writers_.count(s))
      throw ElaborationError(slots_[static_cast<size_t>(s)].name + " is driven both sequentially and combinationally");
    free_.insert(s);
  }
  for (size_t s = 0; s < slots_.size(); ++s)
    if (slots_[s].kind == SignalKind::Input || slots_[s].kind == SignalKind::InOut) free_.insert(static_cast<int>(s));

  build_sccs();
  build_points(m);
}

hdl::Resolver Design::resolver() const {
  return [this](const std::string& n) -> std::optional<hdl::SymbolRef> {
    auto it = slot_of_.find(n);
    if (it == slot_of_.end()) return std::nullopt;
    const auto& s = slots_[static_cast<size_t>(it->second)];
    return hdl::SymbolRef{it->second, s.width, s.lo};
  };
}

Design::LValue Design::compile_lvalue(const Expr& e) {
  LValue lv;
  std::function<void(const Expr&)> add = [&](const Expr& x) {
    if (x.kind == ExprKind::Concat) {
      for (const auto& a : x.args) add(a);
      return;
    }
    auto it = slot_of_.find(x.name);
    if (it == slot_of_.end()) throw ElaborationError("unknown assignment target " + x.name);
    const auto& info = slots_[static_cast<size_t>(it->second)];
    LSeg seg;
    seg.slot = it->second;
    seg.decl_lo = info.lo;
    switch (x.kind) {
      case ExprKind::Ref:
        seg.width = info.width;
        break;
      case ExprKind::Index:
        seg.width = 1;
        if (x.args[0].kind == ExprKind::Const) {
          int64_t idx = static_cast<int64_t>(x.args[0].value.to_u64()) - info.lo;
          if (!x.args[0].value.fits_u64() || idx < 0 || idx >= info.width)
            throw ElaborationError("constant bit-select out of range on " + x.name);
          seg.offset = static_cast<uint32_t>(idx);
        } else {
          seg.dynamic = true;
          seg.index = hdl::CompiledExpr::compile(x.args[0], 0, resolver());
        }
        break;
      case ExprKind::Slice:
        seg.width = static_cast<uint32_t>(x.hi - x.lo + 1);
        seg.offset = static_cast<uint32_t>(x.lo - info.lo);
        break;
      default:
        throw ElaborationError("unsupported assignment target");
    }
    lv.width += seg.width;
    lv.segs.push_back(std::move(seg));
  };
  add(e);
  return lv;
}

Design::CStmt Design::compile_stmt(const Stmt& s, const Expr*) {
  CStmt c;
  c.kind = s.kind;
  auto res = resolver();
  switch (s.kind) {
    case StmtKind::Blocking:
    case StmtKind::NonBlocking:
      c.lhs = compile_lvalue(s.lhs);
      c.rhs = hdl::CompiledExpr::compile(s.rhs, c.lhs.width, res);
      break;
    case StmtKind::If:
      c.cond = hdl::CompiledExpr::compile(s.cond, 0, res);
      for (const auto& b : s.body) c.body.push_back(compile_stmt(b));
      break;
    case StmtKind::Case:
      for (const auto& arm : s.arms) {
        CArm a;
        // Each label compares at the wider of subject and label.
        for (const auto& l : arm.labels)
          a.matches.push_back(hdl::CompiledExpr::compile(Expr::binary("==", s.cond, l), 0, res));
        for (const auto& b : arm.body) a.body.push_back(compile_stmt(b));
        c.arms.push_back(std::move(a));
      }
      break;
    case StmtKind::Block:
      for (const auto& b : s.body) c.body.push_back(compile_stmt(b));
      break;
  }
  return c;
}

void Design::collect(const CStmt& s, std::set<int>& reads, std::set<int>& writes) const {
  switch (s.kind) {
    case StmtKind::Blocking:
    case StmtKind::NonBlocking:
      s.rhs.collect_slots(reads);
      for (const auto& seg : s.lhs.segs) {
        writes.insert(seg.slot);
        if (seg.dynamic) seg.index.collect_slots(reads);
      }
      break;
    case StmtKind::If:
      s.cond.collect_slots(reads);
      for (const auto& b : s.body) collect(b, reads, writes);
      break;
    case StmtKind::Case:
      for (const auto& a : s.arms) {
        for (const auto& m : a.matches) m.collect_slots(reads);
        for (const auto& b : a.body) collect(b, reads, writes);
      }
      break;
    case StmtKind::Block:
      for (const auto& b : s.body) collect(b, reads, writes);
      break;
  }
}

// Tarjan over combinational processes; P -> Q when P writes what Q reads.
void Design::build_sccs() {
  const int n = static_cast<int>(procs_.size());
  std::vector<std::vector<int>> succ(static_cast<size_t>(n));
  for (int q = 0; q < n; ++q) {
    if (procs_[static_cast<size_t>(q)].seq) continue;
    for (int r : procs_[static_cast<size_t>(q)].reads) {
      auto it = comb_writers_.find(r);
      if (it == comb_writers_.end()) continue;
      for (int p : it->second) succ[static_cast<size_t>(p)].push_back(q);
    }
  }
  std::vector<int> index(static_cast<size_t>(n), -1), low(static_cast<size_t>(n), 0), stack;
  std::vector<bool> on(static_cast<size_t>(n), false);
  std::vector<std::vector<int>> found;
  int counter = 0;
  std::function<void(int)> strong = [&](int v) {
    index[static_cast<size_t>(v)] = low[static_cast<size_t>(v)] = counter++;
    stack.push_back(v);
    on[static_cast<size_t>(v)] = true;
    for (int w : succ[static_cast<size_t>(v)]) {
      if (index[static_cast<size_t>(w)] < 0) {
        strong(w);
        low[static_cast<size_t>(v)] = std::min(low[static_cast<size_t>(v)], low[static_cast<size_t>(w)]);
      } else if (on[static_cast<size_t>(w)]) {
        low[static_cast<size_t>(v)] = std::min(low[static_cast<size_t>(v)], index[static_cast<size_t>(w)]);
      }
    }
    if (low[static_cast<size_t>(v)] == index[static_cast<size_t>(v)]) {
      std::vector<int> comp;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on[static_cast<size_t>(w)] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      found.push_back(std::move(comp));
    }
  };
  for (int v = 0; v < n; ++v)
    if (!procs_[static_cast<size_t>(v)].seq && index[static_cast<size_t>(v)] < 0) strong(v);
  // Tarjan emits sinks first.
  std::reverse(found.begin(), found.end());
  scc_of_.assign(static_cast<size_t>(n), -1);
  for (size_t i = 0; i < found.size(); ++i) {
    bool cyclic = found[i].size() > 1;
    for (int v : found[i]) {
      scc_of_[static_cast<size_t>(v)] = static_cast<int>(i);
      const auto& sv = succ[static_cast<size_t>(v)];
      if (std::find(sv.begin(), sv.end(), v) != sv.end()) cyclic = true;
    }
    scc_cyclic_.push_back(cyclic);
  }
  scc_members_ = std::move(found);
}

void Design::build_points(const hdl::AstModule& m) {
  auto plan_for = [&](ComparisonPoint& pt, int target, const std::vector<int>& seq_procs) {
    Plan plan;
    plan.target = target;
    plan.seq = seq_procs;
    std::set<int> support, needed, seen;
    std::vector<int> work;
    auto visit = [&](int s) {
      if (seen.insert(s).second) work.push_back(s);
    };
    if (seq_procs.empty()) {
      visit(target);
    } else {
      visit(target);  // an unassigned path holds the current state
      for (int p : seq_procs)
        for (int r : procs_[static_cast<size_t>(p)].reads) visit(r);
    }
    while (!work.empty()) {
      int s = work.back();
      work.pop_back();
      if (free_.count(s)) {
        support.insert(s);
        continue;
      }
      if (opaque_.count(s)) {
        pt.supported = false;
        pt.unsupported_reason = "cone reaches instance-driven signal " + slots_[static_cast<size_t>(s)].name;
        continue;
      }
      auto it = comb_writers_.find(s);
      if (it == comb_writers_.end()) continue;  // constant or undriven
      for (int p : it->second) {
        int scc = scc_of_[static_cast<size_t>(p)];
        if (!needed.insert(scc).second) continue;
        for (int member : scc_members_[static_cast<size_t>(scc)])
          for (int r : procs_[static_cast<size_t>(member)].reads) visit(r);
      }
    }
    plan.sccs.assign(needed.begin(), needed.end());  // ids are topological
    for (int s : support) pt.support.push_back(slots_[static_cast<size_t>(s)].name);
    std::sort(pt.support.begin(), pt.support.end());
    points_.push_back(std::move(pt));
    plans_.push_back(std::move(plan));
  };

  for (const auto& port : m.ports) {
    if (port.dir != hdl::Direction::Out) continue;
    ComparisonPoint pt;
    pt.name = port.name;
    pt.kind = PointKind::OutputPort;
    int s = slot_of_.at(port.name);
    pt.width = slots_[static_cast<size_t>(s)].width;
    plan_for(pt, s, {});
  }
  // Registers in order of their first sequential driver.
  std::vector<std::pair<int, int>> regs;
  for (const auto& [s, procs] : seq_writers_) regs.emplace_back(procs.front(), s);
  std::sort(regs.begin(), regs.end());
  for (const auto& [first, s] : regs) {
    ComparisonPoint pt;
    pt.name = slots_[static_cast<size_t>(s)].name;
    pt.kind = PointKind::SequentialElement;
    pt.width = slots_[static_cast<size_t>(s)].width;
    plan_for(pt, s, seq_writers_.at(s));
  }
}

int Design::find_point(const std::string& name, PointKind kind) const {
  for (size_t i = 0; i < points_.size(); ++i)
    if (points_[i].name == name && points_[i].kind == kind) return static_cast<int>(i);
  return -1;
}

std::optional<int> Design::free_slot(const std::string& name) const {
  auto it = slot_of_.find(name);
  if (it == slot_of_.end() || !free_.count(it->second)) return std::nullopt;
  return it->second;
}

void Design::assign(const LValue& lv, const BitVec& value, std::vector<BitVec>& v, std::vector<Write>* pending,
                    std::vector<BitVec>& scratch) const {
  uint32_t off = 0;
  for (auto it = lv.segs.rbegin(); it != lv.segs.rend(); ++it) {
    const LSeg& seg = *it;
    BitVec part = value.slice(off, seg.width);
    off += seg.width;
    uint32_t lo = seg.offset;
    if (seg.dynamic) {
      BitVec idx = seg.index.eval(v, scratch);
      if (!idx.fits_u64()) continue;
      int64_t pos = static_cast<int64_t>(idx.to_u64()) - seg.decl_lo;
      if (pos < 0 || pos >= slot_width(seg.slot)) continue;
      lo = static_cast<uint32_t>(pos);
    }
    if (pending) {
      pending->push_back(Write{seg.slot, lo, std::move(part)});
    } else {
      v[static_cast<size_t>(seg.slot)].insert(lo, part);
    }
  }
}

void Design::exec(const CStmt& s, std::vector<BitVec>& v, std::vector<Write>* pending,
                  std::vector<BitVec>& scratch) const {
  switch (s.kind) {
    case StmtKind::Blocking:
      assign(s.lhs, s.rhs.eval(v, scratch), v, nullptr, scratch);
      return;
    case StmtKind::NonBlocking:
      // Outside a sequential block a non-blocking write lands at block end.
      assign(s.lhs, s.rhs.eval(v, scratch), v, pending, scratch);
      return;
    case StmtKind::If:
      if (s.cond.eval(v, scratch).reduce_or()) {
        exec(s.body[0], v, pending, scratch);
      } else if (s.body.size() > 1) {
        exec(s.body[1], v, pending, scratch);
      }
      return;
    case StmtKind::Case: {
      const CArm* def = nullptr;
      for (const auto& arm : s.arms) {
        if (arm.matches.empty()) {
          def = &arm;
          continue;
        }
        for (const auto& m : arm.matches) {
          if (m.eval(v, scratch).reduce_or()) {
            for (const auto& b : arm.body) exec(b, v, pending, scratch);
            return;
          }
        }
      }
      if (def)
        for (const auto& b : def->body) exec(b, v, pending, scratch);
      return;
    }
    case StmtKind::Block:
      for (const auto& b : s.body) exec(b, v, pending, scratch);
      return;
  }
}

void Design::run_scc(int scc, std::vector<BitVec>& v, std::vector<BitVec>& scratch) const {
  const auto& members = scc_members_[static_cast<size_t>(scc)];
  auto run_once = [&]() {
    for (int p : members) {
      std::vector<Write> pending;
      for (const auto& s : procs_[static_cast<size_t>(p)].body) exec(s, v, &pending, scratch);
      for (auto& w : pending) v[static_cast<size_t>(w.slot)].insert(w.lo, w.value);
    }
  };
  if (!scc_cyclic_[static_cast<size_t>(scc)]) {
    run_once();
    return;
  }
  std::set<int> written;
  for (int p : members) written.insert(procs_[static_cast<size_t>(p)].writes.begin(), procs_[static_cast<size_t>(p)].writes.end());
  for (int iter = 0; iter < kMaxSettleIterations; ++iter) {
    std::vector<BitVec> before;
    for (int w : written) before.push_back(v[static_cast<size_t>(w)]);
    run_once();
    size_t i = 0;
    bool same = true;
    for (int w : written) same &= before[i++] == v[static_cast<size_t>(w)];
    if (same) return;
  }
  throw hdl::EvalError("combinational loop does not settle");
}

BitVec Design::eval_point(size_t i, std::vector<BitVec>& v) const {
  const Plan& plan = plans_[i];
  std::vector<BitVec> scratch;
  for (int scc : plan.sccs) run_scc(scc, v, scratch);
  if (plan.seq.empty()) return v[static_cast<size_t>(plan.target)];
  std::vector<Write> pending;
  for (int p : plan.seq)
    for (const auto& s : procs_[static_cast<size_t>(p)].body) exec(s, v, &pending, scratch);
  for (auto& w : pending) v[static_cast<size_t>(w.slot)].insert(w.lo, w.value);
  return v[static_cast<size_t>(plan.target)];
}

}  // namespace rtlleak::equiv::detail
