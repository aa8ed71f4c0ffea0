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

#ifndef RTLLEAK_HDL_FRONT_HPP
#define RTLLEAK_HDL_FRONT_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rtlleak/hdl/ast.hpp"

namespace rtlleak::hdl {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Unsupported, Syntax, Semantic };

  ParseError(Kind kind, int line, int col, std::string construct, const std::string& msg);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int col() const { return col_; }
  // Offending construct (keyword, operator, or identifier).
  const std::string& construct() const { return construct_; }

 private:
  Kind kind_;
  int line_;
  int col_;
  std::string construct_;
};

const char* to_string(ParseError::Kind k);

class ExtractError : public std::runtime_error {
 public:
  enum class Kind { NoModuleFound, AllCandidatesFailedParse };
  ExtractError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Parses exactly one module. Text outside the module is limited to comments
// and `timescale / `default_nettype directives.
AstModule parse_module(std::string_view source);

// Canonical text. Deterministic; parse_module(print_module(m)) == m.
std::string print_module(const AstModule& m);
std::string print_expr(const Expr& e);

// Finds the first `module ... endmodule` span in a model completion (fenced
// or bare) that parses.
AstModule extract_module_from_completion(std::string_view raw);

}  // namespace rtlleak::hdl

#endif  // RTLLEAK_HDL_FRONT_HPP
