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

#include "avlab.h"

#include <exception>
#include <new>
#include <string>

#include "avlab/common/error.hpp"
#include "avlab/evaluation/evaluation.hpp"
#include "avlab/runner/runner.hpp"
#include "avlab/signal/noise.hpp"

struct avlab_context {
  avlab_line_fn out_fn = nullptr;
  void* out_user = nullptr;
  avlab_line_fn log_fn = nullptr;
  void* log_user = nullptr;
  std::string error;
  std::string kind;
};

namespace {

avlab_status status_for(avlab::ErrorCategory c) {
  switch (c) {
    case avlab::ErrorCategory::Usage: return AVLAB_ERR_USAGE;
    case avlab::ErrorCategory::Data: return AVLAB_ERR_DATA;
    case avlab::ErrorCategory::Numerical: return AVLAB_ERR_NUMERICAL;
  }
  return AVLAB_ERR_INTERNAL;
}

template <class F>
avlab_status guarded(avlab_context* ctx, F&& body) {
  if (!ctx) return AVLAB_ERR_USAGE;
  ctx->error.clear();
  ctx->kind.clear();
  try {
    body();
    return AVLAB_OK;
  } catch (const avlab::Error& e) {
    ctx->error = e.what();
    ctx->kind = avlab::error_kind_name(e.kind());
    return status_for(e.category());
  } catch (const std::bad_alloc&) {
    ctx->error = "out of memory";
    ctx->kind = "Internal";
  } catch (const std::exception& e) {
    ctx->error = e.what();
    ctx->kind = "Internal";
  }
  return AVLAB_ERR_INTERNAL;
}

avlab::signal::Waveform wave(const double* p, size_t n, const char* what) {
  if (!p && n) avlab::fail(avlab::ErrorKind::Usage, std::string(what) + " is NULL");
  avlab::signal::Waveform w;
  w.samples.assign(p, p + n);
  return w;
}

}  // namespace

extern "C" {

avlab_status avlab_context_create(avlab_context** out) {
  if (!out) return AVLAB_ERR_USAGE;
  *out = new (std::nothrow) avlab_context();
  return *out ? AVLAB_OK : AVLAB_ERR_INTERNAL;
}

void avlab_context_destroy(avlab_context* ctx) { delete ctx; }

void avlab_set_output(avlab_context* ctx, avlab_line_fn fn, void* user) {
  if (!ctx) return;
  ctx->out_fn = fn;
  ctx->out_user = user;
}

void avlab_set_log(avlab_context* ctx, avlab_line_fn fn, void* user) {
  if (!ctx) return;
  ctx->log_fn = fn;
  ctx->log_user = user;
}

avlab_status avlab_run(avlab_context* ctx, const avlab_run_options* o) {
  return guarded(ctx, [&] {
    if (!o || !o->command) avlab::fail(avlab::ErrorKind::Usage, "no command given");
    avlab::runner::Options opt;
    opt.command = o->command;
    if (o->config) opt.config = o->config;
    if (o->has_seed) opt.seed = o->seed;
    if (o->out) opt.out = o->out;
    if (o->fixtures) opt.fixtures = o->fixtures;
    opt.dry_run = o->dry_run != 0;
    opt.plot = o->plot != 0;
    avlab::runner::Sinks sinks;
    if (ctx->out_fn)
      sinks.out = [ctx](const std::string& s) { ctx->out_fn(ctx->out_user, s.c_str()); };
    if (ctx->log_fn)
      sinks.log = [ctx](const std::string& s) { ctx->log_fn(ctx->log_user, s.c_str()); };
    avlab::runner::run(opt, sinks);
  });
}

const char* avlab_last_error(const avlab_context* ctx) { return ctx ? ctx->error.c_str() : ""; }

const char* avlab_last_error_kind(const avlab_context* ctx) { return ctx ? ctx->kind.c_str() : ""; }

avlab_status avlab_wer(avlab_context* ctx, const char* ref, const char* hyp, double* wer_percent,
                       size_t* errors, size_t* ref_words) {
  return guarded(ctx, [&] {
    if (!ref || !hyp) avlab::fail(avlab::ErrorKind::Usage, "reference and hypothesis are required");
    auto c = avlab::evaluation::wer_text(ref, hyp);
    if (wer_percent) *wer_percent = 100.0 * c.wer();
    if (errors) *errors = c.errors();
    if (ref_words) *ref_words = c.ref_words;
  });
}

avlab_status avlab_mixing_gain(avlab_context* ctx, const double* signal, size_t n_signal,
                               const double* noise, size_t n_noise, double snr_db, double* gain) {
  return guarded(ctx, [&] {
    if (!gain) avlab::fail(avlab::ErrorKind::Usage, "gain is NULL");
    *gain = avlab::signal::mixing_gain(wave(signal, n_signal, "signal"), wave(noise, n_noise, "noise"),
                                       snr_db);
  });
}

avlab_status avlab_mix_at_snr(avlab_context* ctx, const double* signal, size_t n_signal,
                              const double* noise, size_t n_noise, double snr_db, uint64_t seed,
                              double* out) {
  return guarded(ctx, [&] {
    if (!out) avlab::fail(avlab::ErrorKind::Usage, "out is NULL");
    auto r = avlab::signal::mix_components(wave(signal, n_signal, "signal"),
                                           wave(noise, n_noise, "noise"), snr_db, seed);
    for (size_t i = 0; i < n_signal; ++i) out[i] = r.mixed.samples[i];
  });
}

avlab_status avlab_relative_reduction(avlab_context* ctx, double baseline, double ours, double* out) {
  return guarded(ctx, [&] {
    if (!out) avlab::fail(avlab::ErrorKind::Usage, "out is NULL");
    *out = avlab::evaluation::relative_reduction(baseline, ours);
  });
}

const char* avlab_version(void) { return AVLAB_VERSION; }

}  // extern "C"
