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

#include <cctype>

#include "rtlleak/hdl/front.hpp"

namespace rtlleak::hdl {

namespace {

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

// Offsets of `word` occurring as a whole identifier.
std::vector<size_t> find_words(std::string_view text, std::string_view word, size_t from = 0) {
  std::vector<size_t> out;
  for (size_t pos = text.find(word, from); pos != std::string_view::npos; pos = text.find(word, pos + 1)) {
    bool left_ok = pos == 0 || !word_char(text[pos - 1]);
    size_t end = pos + word.size();
    bool right_ok = end >= text.size() || !word_char(text[end]);
    if (left_ok && right_ok) out.push_back(pos);
  }
  return out;
}

}  // namespace

AstModule extract_module_from_completion(std::string_view raw) {
  auto starts = find_words(raw, "module");
  if (starts.empty()) throw ExtractError(ExtractError::Kind::NoModuleFound, "no module keyword in completion");
  std::string last_error;
  for (size_t start : starts) {
    auto ends = find_words(raw, "endmodule", start);
    if (ends.empty()) {
      last_error = "no endmodule after offset " + std::to_string(start);
      continue;
    }
    std::string_view span = raw.substr(start, ends.front() + 9 - start);
    try {
      return parse_module(span);
    } catch (const ParseError& e) {
      last_error = e.what();
    }
  }
  throw ExtractError(ExtractError::Kind::AllCandidatesFailedParse,
                     "no module span parsed (last error: " + last_error + ")");
}

}  // namespace rtlleak::hdl
