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

#include <cmath>
#include <filesystem>
#include <string>

#include "rtlleak/rtlleak.h"
#include "test_util.hpp"

namespace {

namespace fs = std::filesystem;
using rtlleak::testing::read_file;
using rtlleak::testing::source_dir;

std::string take(char* s) {
  std::string out = s ? s : "";
  rl_string_free(s);
  return out;
}

rl_module* parse(const std::string& src) {
  rl_module* m = nullptr;
  EXPECT_EQ(rl_module_parse(src.c_str(), &m), RL_OK) << rl_last_error();
  return m;
}

std::string json_string_field(const std::string& json, const std::string& name) {
  auto pos = json.find("\"" + name + "\"");
  if (pos == std::string::npos) return "";
  pos = json.find('"', json.find(':', pos)) + 1;
  return json.substr(pos, json.find('"', pos) - pos);
}

TEST(CApiTest, VersionAndStatusStrings) {
  EXPECT_STREQ(rl_version(), "0.1.0");
  EXPECT_STREQ(rl_status_string(RL_OK), "ok");
  EXPECT_STRNE(rl_status_string(RL_ERR_ENDPOINT), rl_status_string(RL_ERR_IO));
}

TEST(CApiTest, ParseErrorSetsLastError) {
  rl_module* m = nullptr;
  EXPECT_EQ(rl_module_parse("module broken(input a; endmodule", &m), RL_ERR_PARSE);
  EXPECT_EQ(m, nullptr);
  EXPECT_NE(std::string(rl_last_error()), "");
}

TEST(CApiTest, NullArgumentsRejected) {
  EXPECT_EQ(rl_module_parse(nullptr, nullptr), RL_ERR_INVALID_ARGUMENT);
  double v = 0;
  EXPECT_EQ(rl_pass_at_k(10, 3, 0, &v), RL_ERR_DATA);
}

TEST(CApiTest, LockThenApplyCorrectKeyIsEquivalent) {
  rl_module* gold = parse(read_file(source_dir() / "corpus" / "mini" / "adder8.v"));
  rl_lock_result* lr = nullptr;
  ASSERT_EQ(rl_lock(gold, "all-100", 7, "lock_key", &lr), RL_OK) << rl_last_error();
  int locked = 0;
  ASSERT_EQ(rl_lock_result_is_locked(lr, &locked), RL_OK);
  EXPECT_EQ(locked, 1);
  char* key = nullptr;
  ASSERT_EQ(rl_lock_result_key_json(lr, &key), RL_OK);
  std::string key_json = take(key);
  rl_module* locked_m = nullptr;
  ASSERT_EQ(rl_lock_result_module(lr, &locked_m), RL_OK);
  rl_module* unlocked = nullptr;
  ASSERT_EQ(rl_apply_key(locked_m, key_json.c_str(), json_string_field(key_json, "correct_value").c_str(), &unlocked),
            RL_OK)
      << rl_last_error();
  double eq = 0;
  char* report = nullptr;
  ASSERT_EQ(rl_equiv(unlocked, gold, 20, 1000, 1, &eq, &report), RL_OK) << rl_last_error();
  EXPECT_NE(take(report).find("\"eq\""), std::string::npos);
  EXPECT_DOUBLE_EQ(eq, 100.0);
  rl_module_free(unlocked);
  rl_module_free(locked_m);
  rl_lock_result_free(lr);
  rl_module_free(gold);
}

TEST(CApiTest, SimilarityAndThresholds) {
  rl_module* a = parse("module m(input a, output y); assign y = ~a; endmodule");
  double ss = 0;
  ASSERT_EQ(rl_similarity(a, a, "ident", "coverage", 5, 4, &ss), RL_OK) << rl_last_error();
  EXPECT_DOUBLE_EQ(ss, 1.0);
  EXPECT_EQ(rl_classify_leak(0.60, 0.6), 1);
  EXPECT_EQ(rl_classify_leak(0.59, 0.6), 0);
  EXPECT_EQ(rl_classify_pass(80.0, 80.0), 1);
  EXPECT_EQ(rl_classify_pass(79.9, 80.0), 0);
  EXPECT_DOUBLE_EQ(rl_delta_pp(55.0, 42.5), 12.5);
  char* fp = nullptr;
  ASSERT_EQ(rl_fingerprint_json(a, "raw", 5, 4, &fp), RL_OK);
  EXPECT_NE(take(fp).find("\"prints\""), std::string::npos);
  rl_module_free(a);
}

TEST(CApiTest, ExtractFromCompletion) {
  rl_module* m = nullptr;
  ASSERT_EQ(rl_module_extract("Here you go:\n```verilog\nmodule z(output y); assign y = 1'b0; endmodule\n```\n", &m),
            RL_OK);
  char* name = nullptr;
  ASSERT_EQ(rl_module_name(m, &name), RL_OK);
  EXPECT_EQ(take(name), "z");
  rl_module_free(m);
}

TEST(CApiTest, PassAtKExact) {
  double v = 0;
  ASSERT_EQ(rl_pass_at_k(10, 3, 1, &v), RL_OK);
  EXPECT_NEAR(v, 0.3, 1e-12);
  ASSERT_EQ(rl_pass_at_k(10, 0, 10, &v), RL_OK);
  EXPECT_EQ(v, 0.0);
}

TEST(CApiTest, MockGenerateOfflineMissIsEndpointError) {
  auto cache = fs::temp_directory_path() / "rtlleak_capi_cache";
  fs::remove_all(cache);
  std::string cfg = R"({"endpoint":"http://127.0.0.1:9/v1/chat/completions","model":"m","n_samples":2})";
  char* batch = nullptr;
  EXPECT_EQ(rl_generate(cfg.c_str(), "p", "id", "", nullptr, cache.c_str(), 1, &batch), RL_ERR_ENDPOINT);
  EXPECT_EQ(batch, nullptr);
  std::string mock = R"({"endpoint":"mock:replay","n_samples":2})";
  auto corpus = (source_dir() / "corpus" / "mini").string();
  ASSERT_EQ(rl_generate(mock.c_str(), "p", "id", "inv", corpus.c_str(), cache.c_str(), 0, &batch), RL_OK)
      << rl_last_error();
  EXPECT_NE(take(batch).find("module inv"), std::string::npos);
  fs::remove_all(cache);
}

TEST(CApiTest, CampaignLoadMissingFileIsIoError) {
  rl_campaign* c = nullptr;
  EXPECT_EQ(rl_campaign_load("/nonexistent/spec.json", &c), RL_ERR_IO);
  EXPECT_NE(std::string(rl_last_error()).find("/nonexistent/spec.json"), std::string::npos);
}

}  // namespace
