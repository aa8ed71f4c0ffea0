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

#include <json.hpp>

#include <algorithm>
#include <memory>

#include "design.hpp"
#include "rtlleak/util/rng.hpp"

namespace rtlleak::equiv {

using detail::Design;

const char* to_string(PointKind k) {
  return k == PointKind::OutputPort ? "OutputPort" : "SequentialElement";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Match: return "Match";
    case Verdict::Mismatch: return "Mismatch";
    case Verdict::Unmatched: return "Unmatched";
    case Verdict::Unsupported: return "Unsupported";
  }
  return "?";
}

std::vector<ComparisonPoint> elaborate_points(const hdl::AstModule& m) { return Design(m).points(); }

namespace {

struct Var {
  std::string name;
  uint32_t width = 1;
  std::optional<int> gen_slot;
  std::optional<int> gold_slot;
};

// Joint support of a point pair, sorted by name.
std::vector<Var> joint_support(const Design& gen, const ComparisonPoint& gp, const Design& gold,
                               const ComparisonPoint& op) {
  std::vector<std::string> names = gp.support;
  names.insert(names.end(), op.support.begin(), op.support.end());
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  std::vector<Var> vars;
  for (const auto& n : names) {
    Var v;
    v.name = n;
    v.gen_slot = gen.free_slot(n);
    v.gold_slot = gold.free_slot(n);
    v.width = 0;
    if (v.gen_slot) v.width = std::max(v.width, gen.slot_width(*v.gen_slot));
    if (v.gold_slot) v.width = std::max(v.width, gold.slot_width(*v.gold_slot));
    if (v.width == 0) continue;
    vars.push_back(std::move(v));
  }
  return vars;
}

void load(const Design& d, const std::vector<Var>& vars, const std::vector<BitVec>& values, bool gen,
          std::vector<BitVec>& slots) {
  slots = d.base();
  for (size_t i = 0; i < vars.size(); ++i) {
    const auto& s = gen ? vars[i].gen_slot : vars[i].gold_slot;
    if (s) slots[static_cast<size_t>(*s)] = values[i].resized(d.slot_width(*s));
  }
}

// Returns the mismatching values, if any.
std::optional<std::pair<BitVec, BitVec>> compare_once(const Design& gen, size_t gi, const Design& gold, size_t oi,
                                                      const std::vector<Var>& vars,
                                                      const std::vector<BitVec>& values,
                                                      std::vector<BitVec>& gs, std::vector<BitVec>& os) {
  load(gen, vars, values, true, gs);
  load(gold, vars, values, false, os);
  BitVec a = gen.eval_point(gi, gs);
  BitVec b = gold.eval_point(oi, os);
  uint32_t w = std::max(a.width(), b.width());
  a = a.resized(w);
  b = b.resized(w);
  if (a == b) return std::nullopt;
  return std::make_pair(a, b);
}

Counterexample make_cex(const std::vector<Var>& vars, const std::vector<BitVec>& values, const BitVec& a,
                        const BitVec& b) {
  Counterexample c;
  for (size_t i = 0; i < vars.size(); ++i) c.assignment.emplace_back(vars[i].name, values[i].to_hex());
  c.gen_value = a.to_hex();
  c.gold_value = b.to_hex();
  return c;
}

void check_point(const Design& gen, size_t gi, const Design& gold, size_t oi, const std::string& module,
                 const EquivOptions& opt, PointResult& out) {
  const auto& gp = gen.points()[gi];
  const auto& op = gold.points()[oi];
  std::vector<Var> vars = joint_support(gen, gp, gold, op);
  uint64_t bits = 0;
  for (const auto& v : vars) bits += v.width;
  out.support_bits = static_cast<uint32_t>(bits);
  std::vector<BitVec> values;
  for (const auto& v : vars) values.emplace_back(v.width);
  std::vector<BitVec> gs, os;

  if (bits <= opt.budget_bits && bits < 64) {
    out.exhaustive = true;
    const uint64_t total = uint64_t{1} << bits;
    for (uint64_t x = 0; x < total; ++x) {
      uint32_t off = 0;
      for (size_t i = 0; i < vars.size(); ++i) {
        values[i] = BitVec(vars[i].width, vars[i].width >= 64 ? x >> off : (x >> off) & ((uint64_t{1} << vars[i].width) - 1));
        off += vars[i].width;
      }
      ++out.vectors;
      if (auto diff = compare_once(gen, gi, gold, oi, vars, values, gs, os)) {
        out.verdict = Verdict::Mismatch;
        out.counterexample = make_cex(vars, values, diff->first, diff->second);
        return;
      }
    }
    out.verdict = Verdict::Match;
    return;
  }

  out.exhaustive = false;
  // Seeded per module and point so results do not depend on check order.
  SplitMix64 rng(opt.seed ^ fnv1a64(module + "\x1f" + op.name + "\x1f" + to_string(op.kind)));
  for (uint64_t n = 0; n < opt.n_vectors; ++n) {
    for (size_t i = 0; i < vars.size(); ++i) {
      BitVec v(vars[i].width);
      for (uint32_t w = 0; w < vars[i].width; w += 64) {
        uint64_t r = rng();
        for (uint32_t b = 0; b < 64 && w + b < vars[i].width; ++b) v.set_bit(w + b, (r >> b) & 1);
      }
      values[i] = std::move(v);
    }
    ++out.vectors;
    if (auto diff = compare_once(gen, gi, gold, oi, vars, values, gs, os)) {
      out.verdict = Verdict::Mismatch;
      out.counterexample = make_cex(vars, values, diff->first, diff->second);
      return;
    }
  }
  out.verdict = Verdict::Match;
}

}  // namespace

EquivReport check_equivalence(const hdl::AstModule& gen, const hdl::AstModule& gold, const EquivOptions& opt) {
  EquivReport rep;
  rep.options = opt;
  // A golden module outside the simulator's scope has no usable points.
  std::unique_ptr<Design> gold_d;
  try {
    gold_d = std::make_unique<Design>(gold);
  } catch (const std::exception& e) {
    throw ElaborationError(std::string("golden module: ") + e.what());
  }
  std::unique_ptr<Design> gen_d;
  std::string gen_error;
  try {
    gen_d = std::make_unique<Design>(gen);
  } catch (const std::exception& e) {
    gen_error = e.what();
  }

  for (size_t oi = 0; oi < gold_d->points().size(); ++oi) {
    const auto& op = gold_d->points()[oi];
    PointResult r;
    r.name = op.name;
    r.kind = op.kind;
    r.exhaustive = true;
    if (!op.supported) {
      r.verdict = Verdict::Unsupported;
      r.note = op.unsupported_reason;
    } else if (!gen_d) {
      r.verdict = Verdict::Unsupported;
      r.note = "generated module: " + gen_error;
    } else if (int gi = gen_d->find_point(op.name, op.kind); gi < 0) {
      r.verdict = Verdict::Unmatched;
    } else if (!gen_d->points()[static_cast<size_t>(gi)].supported) {
      r.verdict = Verdict::Unsupported;
      r.note = gen_d->points()[static_cast<size_t>(gi)].unsupported_reason;
    } else {
      try {
        check_point(*gen_d, static_cast<size_t>(gi), *gold_d, oi, gold.name, opt, r);
      } catch (const std::exception& e) {
        r.verdict = Verdict::Unsupported;
        r.note = e.what();
      }
    }
    if (r.verdict == Verdict::Match) ++rep.matched;
    rep.exhaustive &= r.exhaustive;
    rep.points.push_back(std::move(r));
  }
  rep.eq = rep.points.empty() ? 0.0 : 100.0 * static_cast<double>(rep.matched) / static_cast<double>(rep.points.size());
  return rep;
}

bool recheck_counterexample(const hdl::AstModule& gen, const hdl::AstModule& gold, const std::string& point,
                            PointKind kind, const Counterexample& cex) {
  Design g(gen), o(gold);
  int gi = g.find_point(point, kind), oi = o.find_point(point, kind);
  if (gi < 0 || oi < 0) return false;
  std::vector<Var> vars;
  std::vector<BitVec> values;
  for (const auto& [name, hex] : cex.assignment) {
    Var v;
    v.name = name;
    v.gen_slot = g.free_slot(name);
    v.gold_slot = o.free_slot(name);
    v.width = static_cast<uint32_t>(std::max<size_t>(1, hex.size() * 4));
    values.push_back(BitVec::from_hex(v.width, hex));
    vars.push_back(std::move(v));
  }
  std::vector<BitVec> gs, os;
  return compare_once(g, static_cast<size_t>(gi), o, static_cast<size_t>(oi), vars, values, gs, os).has_value();
}

double eq_aggregate(const std::map<std::string, std::vector<double>>& per_module, Reduction r) {
  if (per_module.empty()) throw EmptyCorpus("no modules");
  double sum = 0;
  for (const auto& [name, xs] : per_module) {
    if (xs.empty()) throw EmptyCorpus("module " + name + " has no samples");
    if (r == Reduction::Max) {
      sum += *std::max_element(xs.begin(), xs.end());
    } else {
      double s = 0;
      for (double x : xs) s += x;
      sum += s / static_cast<double>(xs.size());
    }
  }
  return sum / static_cast<double>(per_module.size());
}

std::string report_json(const EquivReport& r) {
  nlohmann::ordered_json j;
  j["eq"] = r.eq;
  j["matched"] = r.matched;
  j["total"] = r.points.size();
  j["mode"] = r.exhaustive ? "Exhaustive" : "Sampled";
  j["budget_bits"] = r.options.budget_bits;
  j["n_vectors"] = r.options.n_vectors;
  j["seed"] = r.options.seed;
  auto& pts = j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : r.points) {
    nlohmann::ordered_json e;
    e["name"] = p.name;
    e["kind"] = to_string(p.kind);
    e["verdict"] = to_string(p.verdict);
    e["mode"] = p.exhaustive ? "Exhaustive" : "Sampled";
    e["vectors"] = p.vectors;
    e["support_bits"] = p.support_bits;
    if (!p.note.empty()) e["note"] = p.note;
    if (p.counterexample) {
      nlohmann::ordered_json c;
      auto& a = c["assignment"] = nlohmann::ordered_json::object();
      for (const auto& [n, v] : p.counterexample->assignment) a[n] = v;
      c["gen_value"] = p.counterexample->gen_value;
      c["gold_value"] = p.counterexample->gold_value;
      e["counterexample"] = std::move(c);
    }
    pts.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

}  // namespace rtlleak::equiv
