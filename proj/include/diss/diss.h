// Copyright 2026 The DISS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the DISS library. Every fallible call returns a
 * diss_status; on failure diss_last_error() describes the problem for the
 * calling thread. Handles are opaque and owned by the caller. Strings
 * returned through char** must be released with diss_string_free. */

#ifndef DISS_DISS_H_
#define DISS_DISS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(DISS_BUILDING_LIBRARY)
#define DISS_API __attribute__((visibility("default")))
#else
#define DISS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum diss_status {
  DISS_OK = 0,
  DISS_ERR_INVALID_ARGUMENT = 1, /* null handle or pointer */
  DISS_ERR_PARSE = 2,            /* malformed map, demo, DFA or config text */
  DISS_ERR_DOMAIN = 3,           /* well-formed input that violates a precondition */
  DISS_ERR_LIMIT = 4,            /* a configured budget was exhausted */
  DISS_ERR_IO = 5,
  DISS_ERR_INTERNAL = 6
} diss_status;

typedef struct diss_world diss_world;
typedef struct diss_demos diss_demos;
typedef struct diss_dfa diss_dfa;
typedef struct diss_experiment diss_experiment;
typedef struct diss_result diss_result;

DISS_API const char* diss_version(void);
/* Message of the last failed call on this thread, "" if none. */
DISS_API const char* diss_last_error(void);
DISS_API const char* diss_status_name(diss_status s);
DISS_API void diss_string_free(char* s);

/* Gridworld maps and demonstrations. */
DISS_API diss_status diss_world_load(const char* map_path, diss_world** out);
DISS_API diss_status diss_world_parse(const char* map_text, diss_world** out);
DISS_API diss_status diss_world_num_states(const diss_world* w, size_t* out);
DISS_API void diss_world_free(diss_world* w);

DISS_API diss_status diss_demos_load(const diss_world* w, const char* path, diss_demos** out);
DISS_API diss_status diss_demos_parse(const diss_world* w, const char* text, diss_demos** out);
DISS_API diss_status diss_demos_count(const diss_demos* d, size_t* out);
/* DISS_ERR_DOMAIN if some demonstration is not a feasible path; the message
 * names the first offending demonstration and step. */
DISS_API diss_status diss_demos_validate(const diss_world* w, const diss_demos* d);
/* Colour word traced by demonstration i, symbols separated by commas. */
DISS_API diss_status diss_demos_word(const diss_world* w, const diss_demos* d, size_t i, char** out);
DISS_API void diss_demos_free(diss_demos* d);

/* Deterministic finite automata. */
DISS_API diss_status diss_dfa_parse(const char* text, diss_dfa** out);
DISS_API diss_status diss_dfa_load(const char* path, diss_dfa** out);
DISS_API diss_status diss_dfa_num_states(const diss_dfa* d, size_t* out);
DISS_API diss_status diss_dfa_size_bits(const diss_dfa* d, double* out);
/* word: comma-separated symbol names; "" is the empty word. */
DISS_API diss_status diss_dfa_accepts(const diss_dfa* d, const char* word, int* out);
DISS_API diss_status diss_dfa_to_text(const diss_dfa* d, char** out);
DISS_API diss_status diss_dfa_to_dot(const diss_dfa* d, const char* name, char** out);
DISS_API void diss_dfa_free(diss_dfa* d);

/* Experiments. Config text is `key = value` lines; see README. */
DISS_API diss_status diss_experiment_load(const char* config_path, diss_experiment** out);
/* Relative paths in text resolve against base_dir (may be NULL). */
DISS_API diss_status diss_experiment_parse(const char* text, const char* base_dir, diss_experiment** out);
/* Overrides one setting; relative paths resolve against the working directory. */
DISS_API diss_status diss_experiment_set(diss_experiment* e, const char* key, const char* value);
DISS_API diss_status diss_experiment_config_text(const diss_experiment* e, char** out);
/* Runs every configured seed and writes the artifacts under `out`. */
DISS_API diss_status diss_experiment_run(const diss_experiment* e, diss_result** out);
/* Runs one seed in memory without touching the file system. */
DISS_API diss_status diss_experiment_run_seed(const diss_experiment* e, uint64_t seed, diss_result** out);
DISS_API void diss_experiment_free(diss_experiment* e);

DISS_API diss_status diss_result_num_runs(const diss_result* r, size_t* out);
DISS_API diss_status diss_result_seed(const diss_result* r, size_t run, uint64_t* out);
/* Best energy seen; +inf when no candidate was ever found. */
DISS_API diss_status diss_result_best_energy(const diss_result* r, size_t run, double* out);
/* *out is NULL when the run found no candidate. */
DISS_API diss_status diss_result_best_dfa(const diss_result* r, size_t run, diss_dfa** out);
/* Running minimum energy per iteration. Writes min(cap, n) values and
 * stores n in *len; pass buf = NULL to query n. */
DISS_API diss_status diss_result_min_energy(const diss_result* r, size_t run, double* buf, size_t cap, size_t* len);
DISS_API diss_status diss_result_trace_jsonl(const diss_result* r, size_t run, char** out);
DISS_API void diss_result_free(diss_result* r);

#ifdef __cplusplus
}
#endif

#endif /* DISS_DISS_H_ */
