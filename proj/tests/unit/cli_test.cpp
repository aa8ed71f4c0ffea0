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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include "test_util.hpp"

namespace {

namespace fs = std::filesystem;
using rtlleak::testing::read_file;
using rtlleak::testing::source_dir;

struct Run {
  int code;
  std::string out;
};

// Runs the CLI with stderr merged into stdout.
Run cli(const std::string& args) {
  std::string cmd = std::string(RTLLEAK_CLI_PATH) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  Run r{-1, ""};
  if (!p) return r;
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("rtlleak_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string mini() { return (source_dir() / "corpus" / "mini").string(); }

TEST(CliTest, NoSubcommandIsUsageError) { EXPECT_EQ(cli("").code, 1); }

TEST(CliTest, UnknownStrategyIsUsageError) {
  auto out = scratch("badstrat");
  auto r = cli("lock " + mini() + " -s all-150 -o " + out.string());
  EXPECT_EQ(r.code, 1) << r.out;
}

TEST(CliTest, UnreadableInputNamesFile) {
  auto r = cli("score /nonexistent/gen.v /nonexistent/ref.v");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("/nonexistent/gen.v"), std::string::npos);
}

TEST(CliTest, LockWritesTableAndArtifacts) {
  auto out = scratch("lock");
  auto r = cli("lock " + mini() + " --seed 3 -o " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.rfind("Strategy", 0), 0u);
  EXPECT_NE(r.out.find("const-100"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "compat.json"));
  EXPECT_TRUE(fs::exists(out / "all-50" / "adder8.v"));
  EXPECT_TRUE(fs::exists(out / "all-50" / "adder8.key.json"));
  EXPECT_EQ(read_file(out / "compat.txt"), r.out);
  fs::remove_all(out);
}

TEST(CliTest, ScoreSelfIsOne) {
  auto f = (source_dir() / "corpus" / "mini" / "adder8.v").string();
  auto r = cli("score " + f + " " + f);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out, "ss=1.0000 leaky=1\n");
}

TEST(CliTest, EquivSelfIsHundred) {
  auto f = (source_dir() / "corpus" / "mini" / "alu4.v").string();
  auto r = cli("equiv " + f + " " + f);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out, "eq=100.00 pass=1\n");
}

TEST(CliTest, GenOfflineMissIsEndpointExit) {
  auto cache = scratch("gencache");
  auto r = cli("gen --endpoint http://127.0.0.1:9/v1 -p hello --offline --cache-dir " + cache.string());
  EXPECT_EQ(r.code, 3) << r.out;
}

TEST(CliTest, GenMockReplay) {
  auto cache = scratch("genmock");
  auto r = cli("gen -n 2 -p hi --module inv --mock-corpus " + mini() + " --cache-dir " + cache.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("module inv"), std::string::npos);
  fs::remove_all(cache);
}

TEST(CliTest, DatasetRequiresKnownMode) {
  auto out = scratch("ds");
  auto r = cli("dataset --ip " + mini() + " --mode sideways -o " + (out / "d.jsonl").string());
  EXPECT_EQ(r.code, 1) << r.out;
}

TEST(CliTest, EvalMissingSpecNamesFile) {
  auto r = cli("eval-leakage /nonexistent/spec.json");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("/nonexistent/spec.json"), std::string::npos);
}

}  // namespace
