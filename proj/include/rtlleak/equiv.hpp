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

// Simulation-based equivalence checking over comparison points.
//
// Points are output ports and registers assigned in edge-triggered blocks.
// A register is compared through its next-state function with all state
// bits as free inputs. Points pair by kind and name. The joint support of
// a pair is enumerated exhaustively up to a bit budget and sampled beyond.

#ifndef RTLLEAK_EQUIV_HPP
#define RTLLEAK_EQUIV_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rtlleak/hdl/ast.hpp"

namespace rtlleak::equiv {

enum class PointKind { OutputPort, SequentialElement };
enum class Verdict { Match, Mismatch, Unmatched, Unsupported };

const char* to_string(PointKind k);
const char* to_string(Verdict v);

class ElaborationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyCorpus : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ComparisonPoint {
  std::string name;
  PointKind kind = PointKind::OutputPort;
  uint32_t width = 1;
  // Free inputs and state elements the point depends on, sorted.
  std::vector<std::string> support;
  bool supported = true;
  std::string unsupported_reason;
};

std::vector<ComparisonPoint> elaborate_points(const hdl::AstModule& m);

struct Counterexample {
  std::vector<std::pair<std::string, std::string>> assignment;  // name, hex value
  std::string gen_value;                                       // hex
  std::string gold_value;                                      // hex
};

struct PointResult {
  std::string name;
  PointKind kind = PointKind::OutputPort;
  Verdict verdict = Verdict::Unmatched;
  bool exhaustive = true;
  uint64_t vectors = 0;
  uint32_t support_bits = 0;
  std::optional<Counterexample> counterexample;
  std::string note;
};

struct EquivOptions {
  uint32_t budget_bits = 20;
  uint64_t n_vectors = 10000;
  uint64_t seed = 0;
};

struct EquivReport {
  std::vector<PointResult> points;  // one per golden point, golden order
  size_t matched = 0;
  double eq = 0;  // 100 * matched / points
  bool exhaustive = true;
  EquivOptions options;
};

EquivReport check_equivalence(const hdl::AstModule& gen, const hdl::AstModule& gold, const EquivOptions& opt = {});

// Re-evaluates both designs on a recorded counterexample. True when the
// values still differ.
bool recheck_counterexample(const hdl::AstModule& gen, const hdl::AstModule& gold, const std::string& point,
                            PointKind kind, const Counterexample& cex);

enum class Reduction { Mean, Max };

// Per-module reduction over samples, then unweighted mean over modules.
double eq_aggregate(const std::map<std::string, std::vector<double>>& per_module, Reduction r = Reduction::Mean);

std::string report_json(const EquivReport& r);

}  // namespace rtlleak::equiv

#endif  // RTLLEAK_EQUIV_HPP
