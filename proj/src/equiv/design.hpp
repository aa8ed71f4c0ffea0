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

// Two-valued simulation model of one module.

#ifndef RTLLEAK_EQUIV_DESIGN_HPP
#define RTLLEAK_EQUIV_DESIGN_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rtlleak/equiv.hpp"
#include "rtlleak/hdl/eval.hpp"

namespace rtlleak::equiv::detail {

class Design {
 public:
  explicit Design(const hdl::AstModule& m);

  const std::vector<ComparisonPoint>& points() const { return points_; }
  // Index into points(), or -1.
  int find_point(const std::string& name, PointKind kind) const;

  // Slot of a free variable (input or state element), if any.
  std::optional<int> free_slot(const std::string& name) const;
  uint32_t slot_width(int slot) const { return slots_[static_cast<size_t>(slot)].width; }

  // Zeros everywhere except parameter slots.
  const std::vector<BitVec>& base() const { return base_; }

  // Computes point `i`. `values` must start as base() with free variables
  // overwritten. Throws hdl::EvalError if a combinational loop does not
  // settle.
  BitVec eval_point(size_t i, std::vector<BitVec>& values) const;

 private:
  struct SlotInfo {
    std::string name;
    uint32_t width = 1;
    int lo = 0;
    hdl::SignalKind kind = hdl::SignalKind::Wire;
  };
  struct LSeg {
    int slot = 0;
    bool dynamic = false;
    uint32_t offset = 0;  // bit offset within the slot when static
    uint32_t width = 1;
    int decl_lo = 0;
    hdl::CompiledExpr index;
  };
  struct LValue {
    std::vector<LSeg> segs;  // most significant first
    uint32_t width = 0;
  };
  struct CStmt;
  struct CArm {
    std::vector<hdl::CompiledExpr> matches;  // empty for default
    std::vector<CStmt> body;
  };
  struct CStmt {
    hdl::StmtKind kind = hdl::StmtKind::Block;
    LValue lhs;
    hdl::CompiledExpr rhs;
    hdl::CompiledExpr cond;
    std::vector<CStmt> body;
    std::vector<CArm> arms;
  };
  struct Process {
    bool seq = false;
    std::vector<CStmt> body;
    std::set<int> reads;
    std::set<int> writes;
  };
  struct Write {
    int slot;
    uint32_t lo;
    BitVec value;
  };
  struct Plan {
    std::vector<int> sccs;     // comb SCC ids in evaluation order
    std::vector<int> seq;      // sequential processes to run last
    int target = 0;
  };

  hdl::Resolver resolver() const;
  LValue compile_lvalue(const hdl::Expr& e);
  CStmt compile_stmt(const hdl::Stmt& s, const hdl::Expr* case_subject = nullptr);
  void collect(const CStmt& s, std::set<int>& reads, std::set<int>& writes) const;
  void build_sccs();
  void build_points(const hdl::AstModule& m);

  void exec(const CStmt& s, std::vector<BitVec>& v, std::vector<Write>* pending,
            std::vector<BitVec>& scratch) const;
  void assign(const LValue& lv, const BitVec& value, std::vector<BitVec>& v, std::vector<Write>* pending,
              std::vector<BitVec>& scratch) const;
  void run_scc(int scc, std::vector<BitVec>& v, std::vector<BitVec>& scratch) const;

  std::vector<SlotInfo> slots_;
  std::map<std::string, int> slot_of_;
  std::vector<BitVec> base_;
  std::vector<Process> procs_;
  std::set<int> free_;      // inputs and state elements
  std::set<int> opaque_;    // driven by instances
  std::map<int, std::vector<int>> comb_writers_;
  std::map<int, std::vector<int>> seq_writers_;
  std::vector<std::vector<int>> scc_members_;  // topological order
  std::vector<int> scc_of_;
  std::vector<bool> scc_cyclic_;
  std::vector<ComparisonPoint> points_;
  std::vector<Plan> plans_;
};

}  // namespace rtlleak::equiv::detail

#endif  // RTLLEAK_EQUIV_DESIGN_HPP
