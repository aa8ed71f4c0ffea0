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

/* C interface to the rtlleak pipeline.
 *
 * Every function returns an rl_status. On failure rl_last_error() describes
 * the error for the calling thread. Strings returned through char** are
 * owned by the caller and released with rl_string_free. Handles are released
 * with their matching _free function; passing NULL to any _free is a no-op.
 */

#ifndef RTLLEAK_RTLLEAK_H
#define RTLLEAK_RTLLEAK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RL_API __declspec(dllexport)
#else
#define RL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rl_status {
  RL_OK = 0,
  RL_ERR_INVALID_ARGUMENT = 1, /* bad argument, flag or strategy tag */
  RL_ERR_PARSE = 2,            /* HDL source rejected by the front end */
  RL_ERR_IO = 3,               /* file missing, unreadable or unwritable */
  RL_ERR_DATA = 4,             /* schema, domain or consistency violation */
  RL_ERR_ENDPOINT = 5,         /* generation endpoint failure or offline cache miss */
  RL_ERR_INTERNAL = 6
} rl_status;

typedef struct rl_module rl_module;
typedef struct rl_lock_result rl_lock_result;
typedef struct rl_campaign rl_campaign;

RL_API const char* rl_version(void);
RL_API const char* rl_status_string(rl_status s);
/* Message of the last failure on this thread; empty after success. */
RL_API const char* rl_last_error(void);
RL_API void rl_string_free(char* s);

/* Modules. */
RL_API rl_status rl_module_parse(const char* source, rl_module** out);
/* First module in a model completion that parses. */
RL_API rl_status rl_module_extract(const char* completion, rl_module** out);
RL_API rl_status rl_module_print(const rl_module* m, char** out);
RL_API rl_status rl_module_name(const rl_module* m, char** out);
RL_API void rl_module_free(rl_module* m);

/* Locking. strategy is "all-50", "all-100", "const-50" or "const-100". */
RL_API rl_status rl_lock(const rl_module* m, const char* strategy, uint64_t seed, const char* key_port_name,
                         rl_lock_result** out);
/* 1 when locked, 0 on fallback to the original. */
RL_API rl_status rl_lock_result_is_locked(const rl_lock_result* r, int* locked);
RL_API rl_status rl_lock_result_module(const rl_lock_result* r, rl_module** out);
RL_API rl_status rl_lock_result_key_json(const rl_lock_result* r, char** out);
RL_API void rl_lock_result_free(rl_lock_result* r);
/* Substitutes a key value (hex, no prefix) using a key file. */
RL_API rl_status rl_apply_key(const rl_module* locked, const char* key_json, const char* value_hex, rl_module** out);

/* Similarity. normalization is "ident" or "raw"; mode is "coverage" or "jaccard". */
RL_API rl_status rl_fingerprint_json(const rl_module* m, const char* normalization, uint32_t k, uint32_t w,
                                     char** out);
RL_API rl_status rl_similarity(const rl_module* gen, const rl_module* ref, const char* normalization,
                               const char* mode, uint32_t k, uint32_t w, double* ss);
RL_API int rl_classify_leak(double ss, double threshold);

/* Equivalence. report_json may be NULL. */
RL_API rl_status rl_equiv(const rl_module* gen, const rl_module* gold, uint32_t budget_bits, uint64_t n_vectors,
                          uint64_t seed, double* eq, char** report_json);

/* Metrics. */
RL_API rl_status rl_pass_at_k(int64_t n, int64_t c, int64_t k, double* out);
RL_API int rl_classify_pass(double eq, double threshold);
RL_API double rl_delta_pp(double a, double b);

/* Corpus operations. Paths name a directory of .v files or a JSONL file.
 * Summaries are JSON documents. */
RL_API rl_status rl_lock_corpus(const char* input, const char* const* strategies, size_t n_strategies,
                                uint64_t seed, const char* key_port_name, const char* out_dir, char** compat_json);
RL_API rl_status rl_compat_table(const char* compat_json, char** table);
/* base may be NULL. strategy "none" keeps IP pairs unlocked. mode is "w/k" or "w/o-k". */
RL_API rl_status rl_build_dataset(const char* ip, const char* base, const char* strategy, const char* mode,
                                  uint64_t seed, const char* key_port_name, const char* out_file, char** summary);

/* Generation. config_json holds endpoint, model, temperature, top_p,
 * n_samples, max_tokens and seed. mock_corpus may be NULL; it names the
 * golden sources used by mock endpoints. */
RL_API rl_status rl_generate(const char* config_json, const char* prompt, const char* prompt_id,
                             const char* module, const char* mock_corpus, const char* cache_dir, int offline,
                             char** batch_json);

/* Campaigns. */
RL_API rl_status rl_campaign_load(const char* spec_path, rl_campaign** out);
RL_API rl_status rl_campaign_set_offline(rl_campaign* c, int offline);
/* Overrides the output or cache directory; NULL keeps the spec value. */
RL_API rl_status rl_campaign_set_dirs(rl_campaign* c, const char* output_dir, const char* cache_dir);
/* Results are written even when some prompts fail; RL_ERR_ENDPOINT then
 * reports the failures and summary still receives the run summary. */
RL_API rl_status rl_campaign_run_leakage(rl_campaign* c, char** summary);
RL_API rl_status rl_campaign_run_quality(rl_campaign* c, char** summary);
RL_API void rl_campaign_free(rl_campaign* c);

RL_API rl_status rl_report(const char* const* result_dirs, size_t n_dirs, const char* out_dir, char** summary);

#ifdef __cplusplus
}
#endif

#endif /* RTLLEAK_RTLLEAK_H */
