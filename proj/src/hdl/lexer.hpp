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

#ifndef RTLLEAK_SRC_HDL_LEXER_HPP
#define RTLLEAK_SRC_HDL_LEXER_HPP

#include <string>
#include <string_view>
#include <vector>

namespace rtlleak::hdl::detail {

enum class Tok { Ident, Number, Punct, SysIdent, Eof };

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  int line = 1;
  int col = 1;
  // Number parts. `size_text` is empty for unsized literals; `base` is 0 for
  // plain decimals.
  std::string size_text;
  char base = 0;
  std::string digits;
  // Comments seen between the previous token and this one.
  std::vector<std::string> comments;
};

// Throws ParseError on malformed input. Never reads past the buffer.
std::vector<Token> lex(std::string_view src);

}  // namespace rtlleak::hdl::detail

#endif  // RTLLEAK_SRC_HDL_LEXER_HPP
