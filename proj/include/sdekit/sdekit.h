// Copyright 2026 The sdekit Authors.
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


#ifndef SDEKIT_SDEKIT_H_
#define SDEKIT_SDEKIT_H_

/* C interface to sdekit. Every call returns a status; on failure the message
 * is available from sde_last_error() on the same thread until the next call.
 * Strings returned through char** are owned by the caller and released with
 * sde_string_free(). Handles are released with their *_free function; passing
 * NULL to a free function is a no-op. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SDE_API __declspec(dllexport)
#else
#define SDE_API __attribute__((visibility("default")))
#endif

typedef enum sde_status {
  SDE_OK = 0,
  SDE_ERR_VALIDATION = 1,
  SDE_ERR_IO = 2,
  SDE_ERR_INVALID_ARGUMENT = 3,
  SDE_ERR_INTERNAL = 4
} sde_status;

typedef enum sde_task_kind { SDE_TASK_MASA = 0, SDE_TASK_SPAN = 1 } sde_task_kind;

typedef struct sde_schema sde_schema;
typedef struct sde_strategy sde_strategy;
typedef struct sde_template sde_template;
typedef struct sde_corpus sde_corpus;

SDE_API const char* sde_version(void);
SDE_API const char* sde_last_error(void);
SDE_API void sde_string_free(char* s);

/* Schemas: a built-in name ("d1", "d2", "genia") or a JSON file. */
SDE_API sde_status sde_schema_builtin(const char* name, sde_schema** out);
SDE_API sde_status sde_schema_load(const char* path, sde_schema** out);
SDE_API sde_status sde_schema_to_json(const sde_schema* schema, char** out);
SDE_API void sde_schema_free(sde_schema* schema);

/* Strategies: compact string or preset name. */
SDE_API sde_status sde_strategy_parse(const char* text, sde_strategy** out);
SDE_API sde_status sde_strategy_to_string(const sde_strategy* strategy, char** out);
SDE_API void sde_strategy_free(sde_strategy* strategy);

/* Templates: the built-in default for a task kind, or a JSON file merged
 * onto it. */
SDE_API sde_status sde_template_default(sde_task_kind kind, sde_template** out);
SDE_API sde_status sde_template_load(const char* path, sde_template** out);
SDE_API void sde_template_free(sde_template* tmpl);

/* Corpora. `schema` may be NULL for loading without schema checks. */
SDE_API sde_status sde_corpus_load(const char* path, sde_task_kind kind,
                                   const sde_schema* schema, sde_corpus** out);
/* `distribution` is a built-in name ("d1-train500", ...) or a JSON file. */
SDE_API sde_status sde_corpus_generate(const sde_schema* schema,
                                       const char* distribution, size_t n,
                                       uint64_t seed, sde_corpus** out);
SDE_API sde_status sde_corpus_save(const sde_corpus* corpus, const char* path);
SDE_API size_t sde_corpus_size(const sde_corpus* corpus);
SDE_API void sde_corpus_free(sde_corpus* corpus);

/* Training samples as JSON lines. `tmpl` may be NULL for the default. */
SDE_API sde_status sde_render_corpus(const sde_corpus* corpus,
                                     const sde_schema* schema,
                                     const sde_strategy* strategy,
                                     const sde_template* tmpl, size_t variant,
                                     char** out_jsonl);

/* Parses {"id","output"} JSON lines into outcome JSON lines. */
SDE_API sde_status sde_parse_predictions(const char* predictions_path,
                                         const sde_schema* schema,
                                         const sde_strategy* strategy,
                                         sde_task_kind kind, char** out_jsonl);

/* Turns rendered sample JSON lines into {"id","output"} prediction lines
 * whose outputs are the gold responses. */
SDE_API sde_status sde_echo_samples(const char* samples_path, char** out_jsonl);

/* Manifests for an ablation grid as a JSON array, baseline first.
 * `base_manifest_json` supplies every field except strategy and labels and
 * may be NULL; `group` is "input", "output" or "reasoning". */
SDE_API sde_status sde_grid(const sde_strategy* baseline, const char* group,
                            const char* base_manifest_json,
                            const char* run_id_prefix, char** out_json);

/* Writes the run's files into out_dir. `test_path` and `template_path` may
 * be NULL. */
SDE_API sde_status sde_emit_run(const char* manifest_path,
                                const char* corpus_path, const char* test_path,
                                const char* template_path, const char* out_dir);

/* Scores predictions against gold. The run is described either by a
 * manifest file or, when manifest_path is NULL, by strategy + schema + kind. */
SDE_API sde_status sde_score(const char* manifest_path,
                             const sde_strategy* strategy,
                             const sde_schema* schema, sde_task_kind kind,
                             const char* gold_path,
                             const char* predictions_path, char** out_json);

/* Aggregates *.report.json files in a directory. */
SDE_API sde_status sde_report(const char* reports_dir, char** out_json,
                              char** out_table);

typedef struct sde_kappa {
  double po;
  double pe;
  double kappa;
} sde_kappa;

/* counts[i*4+j]: gold i, predicted j, in Pos/Neu/Neg/Unm order. `weights`
 * uses the same layout and may be NULL for the default matrix. */
SDE_API sde_status sde_weighted_kappa(const uint64_t counts[16],
                                      const double* weights, sde_kappa* out);

typedef struct sde_perplexity {
  size_t token_count;
  double mean_nll;
  double ppl;
} sde_perplexity;

/* A negative boundary means no context. */
SDE_API sde_status sde_perplexity_of(const double* nlls, size_t n,
                                     long long context_boundary,
                                     sde_perplexity* out);

/* Perplexity per line of an {"id","nlls","context_boundary"} JSON-lines
 * file, as JSON lines. */
SDE_API sde_status sde_perplexity_file(const char* path, char** out_jsonl);

#ifdef __cplusplus
}
#endif

#endif  /* SDEKIT_SDEKIT_H_ */
