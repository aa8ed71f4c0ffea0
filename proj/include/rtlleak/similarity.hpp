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

// Structural similarity by winnowed k-gram fingerprints over a pre-order
// serialization of the AST.

#ifndef RTLLEAK_SIMILARITY_HPP
#define RTLLEAK_SIMILARITY_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtlleak/hdl/ast.hpp"

namespace rtlleak::sim {

enum class Normalization { Raw, IdentNormalized };
enum class TokenClass : uint8_t { Open, Close, Keyword, Ident, Literal, Operator };

const char* to_string(Normalization n);
Normalization normalization_from(const std::string& s);  // "raw" | "ident"

struct Token {
  TokenClass cls = TokenClass::Keyword;
  std::string text;
  uint32_t pos = 0;  // offset in the serialized stream

  bool operator==(const Token&) const = default;
};

struct TokenStream {
  std::vector<Token> tokens;
  Normalization normalization = Normalization::IdentNormalized;

  bool operator==(const TokenStream&) const = default;
};

struct Fingerprint {
  uint64_t hash = 0;
  uint32_t pos = 0;  // index of the first token of the k-gram

  auto operator<=>(const Fingerprint&) const = default;
};

struct FingerprintSet {
  uint32_t k = 17;
  uint32_t w = 13;
  Normalization normalization = Normalization::IdentNormalized;
  std::vector<Fingerprint> prints;  // ascending by pos

  bool operator==(const FingerprintSet&) const = default;
};

struct SimilarityResult {
  double ss = 0;
  size_t shared = 0;
  size_t ref_total = 0;
  size_t gen_total = 0;
  bool ref_empty = false;
};

class ParamMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyCorpus : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

TokenStream tokenize(const hdl::AstModule& m, Normalization n);

uint64_t token_hash(const Token& t);
// Polynomial base of the k-gram hash: h = sum t_i * B^(k-1-i) mod 2^64.
constexpr uint64_t kGramBase = 0x100000001b3ULL;
// Hash of every k-gram, computed with a rolling update.
std::vector<uint64_t> kgram_hashes(const TokenStream& ts, uint32_t k);

// Rightmost minimum per window of w k-grams. Fewer than w k-grams form a
// single window. Fewer than k tokens give an empty set.
FingerprintSet fingerprint(const TokenStream& ts, uint32_t k = 17, uint32_t w = 13);

enum class ScoreMode { Coverage, Jaccard };

// Coverage: |gen ∩ ref| / |ref| over hash sets. Jaccard: |gen ∩ ref| / |gen ∪ ref|.
SimilarityResult score(const FingerprintSet& gen, const FingerprintSet& ref, ScoreMode mode = ScoreMode::Coverage);

constexpr double kLeakThreshold = 0.6;
bool classify_leak(double ss, double threshold = kLeakThreshold);
inline bool classify_leak(const SimilarityResult& r, double threshold = kLeakThreshold) {
  return classify_leak(r.ss, threshold);
}

// Unweighted mean over modules of the per-module leaky-sample fraction, in
// percent.
double ast_pass_rate(const std::map<std::string, std::vector<bool>>& per_module_flags);

}  // namespace rtlleak::sim

#endif  // RTLLEAK_SIMILARITY_HPP
