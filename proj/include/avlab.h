// Copyright 2026 The avlab Authors. All Rights Reserved.
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

#ifndef AVLAB_H
#define AVLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(AVLAB_BUILDING_LIBRARY)
#define AVLAB_API __attribute__((visibility("default")))
#else
#define AVLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. The nonzero values double as process exit codes. */
typedef enum avlab_status {
  AVLAB_OK = 0,
  AVLAB_ERR_USAGE = 1,
  AVLAB_ERR_DATA = 2,
  AVLAB_ERR_NUMERICAL = 3,
  AVLAB_ERR_INTERNAL = 4
} avlab_status;

typedef struct avlab_context avlab_context;

/* Receives one line of text, without the trailing newline. */
typedef void (*avlab_line_fn)(void* user, const char* line);

typedef struct avlab_run_options {
  const char* command;  /* gen-data, gen-noise, pretrain, cluster, finetune, eval,
                           report, verify, experiment */
  const char* config;   /* experiment file; NULL for built-in defaults */
  int has_seed;         /* nonzero: seed overrides the file */
  uint64_t seed;
  const char* out;      /* NULL: "avlab-out" */
  const char* fixtures; /* report source or verify fixture directory; may be NULL */
  int dry_run;
  int plot;
} avlab_run_options;

AVLAB_API avlab_status avlab_context_create(avlab_context** out);
AVLAB_API void avlab_context_destroy(avlab_context* ctx);

/* Result lines go to the output sink, progress to the log sink. Unset sinks
   discard their lines. */
AVLAB_API void avlab_set_output(avlab_context* ctx, avlab_line_fn fn, void* user);
AVLAB_API void avlab_set_log(avlab_context* ctx, avlab_line_fn fn, void* user);

AVLAB_API avlab_status avlab_run(avlab_context* ctx, const avlab_run_options* options);

/* Message and kind name of the last failure on ctx; "" after a success.
   The pointers stay valid until the next call on ctx. */
AVLAB_API const char* avlab_last_error(const avlab_context* ctx);
AVLAB_API const char* avlab_last_error_kind(const avlab_context* ctx);

/* Word error rate of hyp against ref, in percent. Any out pointer may be NULL. */
AVLAB_API avlab_status avlab_wer(avlab_context* ctx, const char* ref, const char* hyp,
                                 double* wer_percent, size_t* errors, size_t* ref_words);

/* Gain g with 10*log10(P(signal) / P(g*noise)) == snr_db. */
AVLAB_API avlab_status avlab_mixing_gain(avlab_context* ctx, const double* signal, size_t n_signal,
                                         const double* noise, size_t n_noise, double snr_db,
                                         double* gain);

/* Fits noise to n_signal samples (seeded), scales it to snr_db and writes
   signal + scaled noise to out, which holds n_signal values. */
AVLAB_API avlab_status avlab_mix_at_snr(avlab_context* ctx, const double* signal, size_t n_signal,
                                        const double* noise, size_t n_noise, double snr_db,
                                        uint64_t seed, double* out);

/* 100 * (baseline - ours) / baseline. */
AVLAB_API avlab_status avlab_relative_reduction(avlab_context* ctx, double baseline, double ours,
                                                double* out);

AVLAB_API const char* avlab_version(void);

#ifdef __cplusplus
}
#endif

#endif
