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

#include "rtlleak/evalkit.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "rtlleak/equiv.hpp"
#include "rtlleak/similarity.hpp"

namespace rtlleak::eval {

using boost::multiprecision::cpp_rational;

bool classify_pass(double eq, double threshold) { return eq >= threshold - 1e-9; }

namespace {

cpp_rational pass_at_k_rational(int64_t n, int64_t c, int64_t k) {
  if (n < 1 || c < 0 || c > n || k < 1 || k > n)
    throw DomainError("pass@k requires 0 <= c <= n and 1 <= k <= n (n=" + std::to_string(n) +
                      ", c=" + std::to_string(c) + ", k=" + std::to_string(k) + ")");
  if (n - c < k) return cpp_rational(1);
  // C(n-c, k) / C(n, k) = prod_{i<k} (n-c-i) / (n-i)
  cpp_rational miss(1);
  for (int64_t i = 0; i < k; ++i) miss *= cpp_rational(n - c - i, n - i);
  return cpp_rational(1) - miss;
}

}  // namespace

double pass_at_k(int64_t n, int64_t c, int64_t k) {
  return static_cast<double>(pass_at_k_rational(n, c, k));
}

std::string pass_at_k_exact(int64_t n, int64_t c, int64_t k) {
  cpp_rational r = pass_at_k_rational(n, c, k);
  return numerator(r).str() + "/" + denominator(r).str();
}

std::vector<QualityRow> quality_table(const std::vector<EvalRecord>& records, const std::vector<int64_t>& k_list) {
  if (records.empty()) throw EmptyCorpus("no records");
  std::map<std::string, std::pair<int64_t, int64_t>> per_module;  // n, c
  for (const auto& r : records) {
    auto& [n, c] = per_module[r.module];
    ++n;
    c += r.pass ? 1 : 0;
  }
  const int64_t n = per_module.begin()->second.first;
  for (const auto& [m, nc] : per_module)
    if (nc.first != n)
      throw RaggedCorpus("module " + m + " has " + std::to_string(nc.first) + " samples, expected " + std::to_string(n));
  std::vector<QualityRow> out;
  for (int64_t k : k_list) {
    cpp_rational sum(0);
    for (const auto& [m, nc] : per_module) sum += pass_at_k_rational(n, nc.second, k);
    sum /= static_cast<int64_t>(per_module.size());
    out.push_back(QualityRow{k, 100.0 * static_cast<double>(sum)});
  }
  return out;
}

std::vector<LeakageRow> leakage_table(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw EmptyCorpus("no records");
  std::map<std::string, std::vector<const EvalRecord*>> groups;
  for (const auto& r : records) groups[r.strategy].push_back(&r);
  std::vector<LeakageRow> out;
  for (const auto& [tag, recs] : groups) {
    std::map<std::string, std::vector<double>> eqs;
    std::map<std::string, std::vector<bool>> leaky;
    for (const auto* r : recs) {
      eqs[r->module].push_back(r->eq);
      leaky[r->module].push_back(r->leaky);
    }
    LeakageRow row;
    row.strategy = tag;
    row.modules = eqs.size();
    row.samples = recs.size();
    row.eq_mean = equiv::eq_aggregate(eqs, equiv::Reduction::Mean);
    row.eq_max = equiv::eq_aggregate(eqs, equiv::Reduction::Max);
    row.ast_pass_rate = sim::ast_pass_rate(leaky);
    out.push_back(std::move(row));
  }
  return out;
}

double delta_pp(double a, double b) { return std::round((a - b) * 100.0) / 100.0; }

std::string fmt_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  // Avoid "-0.00".
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  return out + "\n";
}

std::vector<std::vector<std::string>> csv_parse(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c != '"') field += c;
      else if (i + 1 < text.size() && text[i + 1] == '"') field += '"', ++i;
      else quoted = false;
      continue;
    }
    if (c == '"') {
      quoted = any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_bar_chart(const std::string& title, const std::vector<Bar>& bars, double max_value) {
  const int label_w = 260, bar_w = 400, row_h = 22, top = 40;
  const int height = top + row_h * static_cast<int>(bars.size()) + 20;
  const int width = label_w + bar_w + 80;
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"monospace\" font-size=\"12\">\n";
  o << "  <text x=\"10\" y=\"22\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  for (size_t i = 0; i < bars.size(); ++i) {
    int y = top + row_h * static_cast<int>(i);
    double frac = max_value > 0 ? std::clamp(bars[i].value / max_value, 0.0, 1.0) : 0.0;
    int w = static_cast<int>(std::lround(frac * bar_w));
    o << "  <text x=\"10\" y=\"" << y + 15 << "\">" << xml_escape(bars[i].label) << "</text>\n";
    o << "  <rect x=\"" << label_w << "\" y=\"" << y + 4 << "\" width=\"" << w << "\" height=\"" << row_h - 8
      << "\" fill=\"#4a7ab5\"/>\n";
    o << "  <text x=\"" << label_w + w + 6 << "\" y=\"" << y + 15 << "\">" << fmt_fixed(bars[i].value, 2)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace rtlleak::eval
