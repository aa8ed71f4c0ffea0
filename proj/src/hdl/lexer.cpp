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

#include "lexer.hpp"

#include <array>
#include <cctype>

#include "rtlleak/hdl/front.hpp"

namespace rtlleak::hdl::detail {

namespace {

constexpr std::array<std::string_view, 21> kMultiPunct = {
    "<<<", ">>>", "===", "!==", "<<", ">>", "<=", ">=", "==", "!=", "&&",
    "||",  "~&",  "~|",  "~^",  "^~", "**", "+:", "-:", "->", "::"};

constexpr std::string_view kSinglePunct = "()[]{};,:.#@?+-*/%&|^~!<>=";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::vector<std::string> pending_comments;
    while (true) {
      skip_space_and_comments(pending_comments);
      Token t;
      t.line = line_;
      t.col = col_;
      t.comments = std::move(pending_comments);
      pending_comments.clear();
      if (pos_ >= src_.size()) {
        t.kind = Tok::Eof;
        out.push_back(std::move(t));
        return out;
      }
      char c = src_[pos_];
      if (c == '`') {
        directive();
        pending_comments = std::move(t.comments);
        continue;
      }
      if (ident_start(c)) {
        t.kind = Tok::Ident;
        while (pos_ < src_.size() && ident_char(src_[pos_])) t.text.push_back(advance());
      } else if (c == '$') {
        t.kind = Tok::SysIdent;
        t.text.push_back(advance());
        while (pos_ < src_.size() && ident_char(src_[pos_])) t.text.push_back(advance());
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
        number(t);
      } else if (c == '"') {
        throw ParseError(ParseError::Kind::Unsupported, line_, col_, "string", "string literals are not supported");
      } else if (c == '\\') {
        throw ParseError(ParseError::Kind::Unsupported, line_, col_, "escaped identifier",
                         "escaped identifiers are not supported");
      } else {
        t.kind = Tok::Punct;
        bool matched = false;
        for (auto p : kMultiPunct) {
          if (src_.substr(pos_, p.size()) == p) {
            for (size_t i = 0; i < p.size(); ++i) advance();
            t.text = std::string(p);
            matched = true;
            break;
          }
        }
        if (!matched) {
          if (kSinglePunct.find(c) == std::string_view::npos) {
            throw ParseError(ParseError::Kind::Syntax, line_, col_, std::string(1, c),
                             "unexpected character");
          }
          t.text.push_back(advance());
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  char peek(size_t off = 0) const { return pos_ + off < src_.size() ? src_[pos_ + off] : '\0'; }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  void skip_space_and_comments(std::vector<std::string>& comments) {
    while (true) {
      skip_ws();
      if (peek() == '/' && peek(1) == '/') {
        advance();
        advance();
        std::string text;
        while (pos_ < src_.size() && src_[pos_] != '\n') text.push_back(advance());
        comments.push_back(trim(text));
      } else if (peek() == '/' && peek(1) == '*') {
        int l = line_, c = col_;
        advance();
        advance();
        std::string text;
        while (true) {
          if (pos_ >= src_.size())
            throw ParseError(ParseError::Kind::Syntax, l, c, "/*", "unterminated block comment");
          if (peek() == '*' && peek(1) == '/') {
            advance();
            advance();
            break;
          }
          text.push_back(advance());
        }
        comments.push_back(trim(text));
      } else {
        return;
      }
    }
  }

  static std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n*");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  void directive() {
    int l = line_, c = col_;
    advance();
    std::string name;
    while (pos_ < src_.size() && ident_char(src_[pos_])) name.push_back(advance());
    if (name == "timescale" || name == "default_nettype" || name == "resetall" ||
        name == "celldefine" || name == "endcelldefine") {
      while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      return;
    }
    throw ParseError(ParseError::Kind::Unsupported, l, c, "`" + name,
                     "compiler directive `" + name + " is not supported");
  }

  void number(Token& t) {
    t.kind = Tok::Number;
    size_t start = pos_;
    std::string size_text;
    while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') size_text.push_back(advance());
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))
      throw ParseError(ParseError::Kind::Unsupported, t.line, t.col, "real", "real literals are not supported");
    // Look ahead across whitespace for a base specifier.
    size_t save_pos = pos_;
    int save_line = line_, save_col = col_;
    if (!size_text.empty()) skip_ws();
    if (peek() == '\'') {
      advance();
      if (peek() == 's' || peek() == 'S')
        throw ParseError(ParseError::Kind::Unsupported, t.line, t.col, "signed literal",
                         "signed literals are not supported");
      char b = static_cast<char>(std::tolower(static_cast<unsigned char>(peek())));
      if (b != 'b' && b != 'o' && b != 'd' && b != 'h')
        throw ParseError(ParseError::Kind::Unsupported, t.line, t.col, "fill literal",
                         "unbased fill literals are not supported");
      advance();
      skip_ws();
      std::string digits;
      while (std::isxdigit(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == 'x' ||
             peek() == 'X' || peek() == 'z' || peek() == 'Z' || peek() == '?') {
        char d = advance();
        if (d == 'x' || d == 'X' || d == 'z' || d == 'Z' || d == '?')
          throw ParseError(ParseError::Kind::Unsupported, t.line, t.col, "x/z literal",
                           "four-state literals are not supported");
        digits.push_back(d);
      }
      if (digits.empty())
        throw ParseError(ParseError::Kind::Syntax, t.line, t.col, "'", "missing literal digits");
      t.size_text = size_text;
      t.base = b;
      t.digits = digits;
    } else {
      pos_ = save_pos;
      line_ = save_line;
      col_ = save_col;
      t.digits = size_text;
      t.base = 0;
      if (std::isalpha(static_cast<unsigned char>(peek())))
        throw ParseError(ParseError::Kind::Syntax, t.line, t.col, size_text, "malformed number");
    }
    t.text = std::string(src_.substr(start, pos_ - start));
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> lex(std::string_view src) { return Lexer(src).run(); }

}  // namespace rtlleak::hdl::detail
