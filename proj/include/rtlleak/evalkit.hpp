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

// Quality and leakage metrics.

#ifndef RTLLEAK_EVALKIT_HPP
#define RTLLEAK_EVALKIT_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtlleak::eval {

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RaggedCorpus : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyCorpus : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

constexpr double kPassThreshold = 80.0;

struct EvalRecord {
  std::string module;
  std::string strategy;  // grouping tag
  int sample_id = 0;
  double ss = 0;      // fraction in [0, 1]
  double eq = 0;      // percentage
  bool pass = false;  // eq >= pass threshold
  bool leaky = false; // ss >= leak threshold
};

// eq >= threshold, inclusive.
bool classify_pass(double eq, double threshold = kPassThreshold);

// 1 - C(n-c, k) / C(n, k), evaluated in exact rational arithmetic.
double pass_at_k(int64_t n, int64_t c, int64_t k);
// Same value as an exact "p/q" string in lowest terms.
std::string pass_at_k_exact(int64_t n, int64_t c, int64_t k);

struct QualityRow {
  int64_t k = 1;
  double pass_at_k_pct = 0;  // mean over modules, percent
};

// Records are grouped by module; every module must have the same sample
// count n and every k must satisfy 1 <= k <= n.
std::vector<QualityRow> quality_table(const std::vector<EvalRecord>& records,
                                      const std::vector<int64_t>& k_list = {1, 2, 5, 10});

struct LeakageRow {
  std::string strategy;
  size_t modules = 0;
  size_t samples = 0;
  double eq_mean = 0;
  double eq_max = 0;
  double ast_pass_rate = 0;
};

// One row per strategy tag, sorted by tag.
std::vector<LeakageRow> leakage_table(const std::vector<EvalRecord>& records);

// a - b in percentage points, rounded to two decimals.
double delta_pp(double a, double b);

// Fixed-point formatting used by every table writer.
std::string fmt_fixed(double v, int decimals);

// RFC 4180 field quoting.
std::string csv_field(const std::string& s);
std::string csv_row(const std::vector<std::string>& fields);
// Inverse of csv_row over a whole document. Throws std::invalid_argument on
// an unterminated quote.
std::vector<std::vector<std::string>> csv_parse(const std::string& text);

struct Bar {
  std::string label;
  double value = 0;
};

// Horizontal bar chart over [0, max_value].
std::string render_bar_chart(const std::string& title, const std::vector<Bar>& bars, double max_value = 100.0);

}  // namespace rtlleak::eval

#endif  // RTLLEAK_EVALKIT_HPP
