// Copyright 2026 The streamcnn Authors
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

/*
 * streamcnn C API.
 *
 * Every fallible call returns an scnn_status; on failure a message for the
 * calling thread is available from scnn_last_error() until the next failing
 * call. Objects are opaque handles released with the matching *_free.
 * Tensors cross the boundary as contiguous float arrays in channel-major
 * order ([channel][time]).
 */
#ifndef STREAMCNN_STREAMCNN_H_
#define STREAMCNN_STREAMCNN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SCNN_BUILDING_LIBRARY)
#define SCNN_API __declspec(dllexport)
#else
#define SCNN_API __declspec(dllimport)
#endif
#else
#define SCNN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum scnn_status {
  SCNN_OK = 0,
  SCNN_ERR_INVALID_ARGUMENT = 1,
  SCNN_ERR_SHAPE = 2,
  SCNN_ERR_ALIGNMENT = 3,
  SCNN_ERR_STATE = 4,
  SCNN_ERR_EMPTY_INPUT = 5,
  SCNN_ERR_DIVISION_BY_ZERO = 6,
  SCNN_ERR_UNSUPPORTED = 7,
  SCNN_ERR_SCHEMA = 8,
  SCNN_ERR_IO = 9,
  SCNN_ERR_BUFFER_TOO_SMALL = 10,
  SCNN_ERR_INTERNAL = 11
} scnn_status;

typedef enum scnn_stream_mode { SCNN_MODE_EXACT = 0, SCNN_MODE_APPROXIMATE = 1 } scnn_stream_mode;

typedef enum scnn_pool_kind {
  SCNN_POOL_MAX = 0,
  SCNN_POOL_AVERAGE = 1,
  SCNN_POOL_FIRST = 2
} scnn_pool_kind;

typedef enum scnn_synthetic_kind { SCNN_SYNTH_MONO = 0, SCNN_SYNTH_MULTI = 1 } scnn_synthetic_kind;

typedef enum scnn_format { SCNN_FORMAT_CSV = 0, SCNN_FORMAT_JSON = 1 } scnn_format;

typedef enum scnn_recommendation {
  SCNN_RECOMMEND_EXACT_STREAMING = 0,
  SCNN_RECOMMEND_APPROXIMATE_STREAMING = 1,
  SCNN_RECOMMEND_RETRAIN_SIGNAL_PADDING = 2
} scnn_recommendation;

typedef struct scnn_signal scnn_signal;
typedef struct scnn_model scnn_model;
typedef struct scnn_session scnn_session;
typedef struct scnn_sweep scnn_sweep;
typedef struct scnn_probe_report scnn_probe_report;
typedef struct scnn_bench scnn_bench;

SCNN_API const char* scnn_version(void);
SCNN_API const char* scnn_status_string(scnn_status status);
SCNN_API const char* scnn_last_error(void);
/* Releases strings returned through char** out-parameters. */
SCNN_API void scnn_string_free(char* str);

/* ---- signals ------------------------------------------------------------ */

SCNN_API scnn_status scnn_signal_generate(scnn_synthetic_kind kind, double base_freq_hz,
                                          int harmonics, double duration_s,
                                          double sample_rate_hz, scnn_signal** out);
SCNN_API scnn_status scnn_signal_random(size_t channels, size_t length, double sample_rate_hz,
                                        uint64_t seed, scnn_signal** out);
SCNN_API scnn_status scnn_signal_from_data(const float* data, size_t channels, size_t length,
                                           double sample_rate_hz, scnn_signal** out);
SCNN_API scnn_status scnn_signal_load_csv(const char* path, double sample_rate_hz,
                                          scnn_signal** out);
SCNN_API scnn_status scnn_signal_load_raw(const char* path, scnn_signal** out);
SCNN_API scnn_status scnn_signal_save_csv(const scnn_signal* signal, const char* path);
/* Writes path and a "<path>.json" sidecar. */
SCNN_API scnn_status scnn_signal_save_raw(const scnn_signal* signal, const char* path);
SCNN_API size_t scnn_signal_channels(const scnn_signal* signal);
SCNN_API size_t scnn_signal_length(const scnn_signal* signal);
SCNN_API double scnn_signal_sample_rate(const scnn_signal* signal);
SCNN_API const float* scnn_signal_data(const scnn_signal* signal);
SCNN_API scnn_status scnn_signal_sup_amplitude(const scnn_signal* signal, double* out);
SCNN_API void scnn_signal_free(scnn_signal* signal);

SCNN_API scnn_status scnn_nrmse(const float* reference, const float* candidate, size_t n,
                                double* out);
SCNN_API scnn_status scnn_fit_line(const double* x, const double* y, size_t n, double* slope,
                                   double* intercept, double* r_squared);

/* ---- models ------------------------------------------------------------- */

typedef struct scnn_model_info {
  size_t input_channels;
  size_t embedding_channels;
  size_t output_units;
  size_t window_len;
  size_t step;
  size_t receptive_field;
  size_t pool_factor;
  size_t conv_count;
  size_t layer_count;
  size_t classifier_start;
  double sample_rate_hz;
} scnn_model_info;

typedef struct scnn_random_model_options {
  size_t min_depth;
  size_t max_depth;
  size_t input_channels;
  size_t window_len;
  size_t step;
  size_t output_units;
  double sample_rate_hz;
  const size_t* pool_lengths; /* may be NULL when pool_count == 0 */
  size_t pool_count;
} scnn_random_model_options;

SCNN_API scnn_status scnn_model_load(const char* manifest_path, scnn_model** out);
/* Writes the manifest and a sibling "<stem>.bin" weight blob. */
SCNN_API scnn_status scnn_model_save(const scnn_model* model, const char* manifest_path);
/* name: "ppg", "eeg" or "acc". */
SCNN_API scnn_status scnn_model_reference(const char* name, uint64_t seed, scnn_model** out);
SCNN_API void scnn_random_model_options_default(scnn_random_model_options* options);
SCNN_API scnn_status scnn_model_random(uint64_t seed, const scnn_random_model_options* options,
                                       scnn_model** out);
SCNN_API void scnn_model_free(scnn_model* model);

SCNN_API const char* scnn_model_name(const scnn_model* model);
SCNN_API scnn_status scnn_model_get_info(const scnn_model* model, scnn_model_info* out);

/* window: [input_channels x length]. embedding_out receives
 * [embedding_channels x length / pool_factor]; output_out receives
 * output_units values (both may be NULL to skip). */
SCNN_API scnn_status scnn_model_full_inference(const scnn_model* model, const float* window,
                                               size_t length, float* embedding_out,
                                               size_t embedding_capacity, float* output_out,
                                               size_t output_capacity);
SCNN_API scnn_status scnn_model_mac_count(const scnn_model* model, size_t input_len,
                                          int include_classifier, uint64_t* out);
/* *aligned is set to 1 or 0; when misaligned and message is non-NULL, a
 * description of the offending stages is returned (free with
 * scnn_string_free). */
SCNN_API scnn_status scnn_model_alignment_check(const scnn_model* model, size_t window_len,
                                                size_t step, int* aligned, char** message);

/* ---- streaming ---------------------------------------------------------- */

/* The session keeps its model alive; the model handle may be freed first. */
SCNN_API scnn_status scnn_session_new(const scnn_model* model, size_t window_len, size_t step,
                                      scnn_stream_mode mode, int force_misaligned,
                                      scnn_session** out);
/* chunk: [input_channels x step]. While *warmup is 1 the output buffers are
 * left untouched. */
SCNN_API scnn_status scnn_session_push(scnn_session* session, const float* chunk, size_t length,
                                       float* embedding_out, size_t embedding_capacity,
                                       float* output_out, size_t output_capacity, int* warmup);
SCNN_API scnn_status scnn_session_reset(scnn_session* session);
SCNN_API scnn_status scnn_session_memory_footprint(const scnn_session* session,
                                                   size_t* pad_bytes, size_t* ring_bytes);
SCNN_API size_t scnn_session_sub_windows_seen(const scnn_session* session);
SCNN_API void scnn_session_free(scnn_session* session);

/* Streams signal and compares each aggregated window to full inference.
 * output_nrmse receives one value per classifier unit (NaN where the
 * reference is constant). */
SCNN_API scnn_status scnn_stream_compare(const scnn_model* model, const scnn_signal* signal,
                                         size_t window_len, size_t step, scnn_stream_mode mode,
                                         int force_misaligned, double* embedding_nrmse,
                                         double* output_nrmse, size_t output_capacity,
                                         size_t* windows);

/* ---- analysis ----------------------------------------------------------- */

typedef struct scnn_bound_input {
  double amplitude;
  double f_max_hz;
  double f_s_hz;
  size_t pool_len;
} scnn_bound_input;

SCNN_API scnn_status scnn_consecutive_sample_bound(const scnn_bound_input* input, double* out);
SCNN_API scnn_status scnn_pooling_error_bound(const scnn_bound_input* input, double* out);

typedef struct scnn_sweep_row {
  double param;
  double mean_rel;
  double max_rel;
  double bound_rel;
} scnn_sweep_row;

SCNN_API scnn_status scnn_sweep_fs(scnn_synthetic_kind kind, double base_freq_hz, int harmonics,
                                   const double* fs_list, size_t count,
                                   double pool_window_seconds, scnn_pool_kind pool_kind,
                                   scnn_sweep** out);
SCNN_API scnn_status scnn_sweep_pool_len(scnn_synthetic_kind kind, double base_freq_hz,
                                         int harmonics, const size_t* lp_list, size_t count,
                                         double sample_rate_hz, scnn_pool_kind pool_kind,
                                         scnn_sweep** out);
SCNN_API size_t scnn_sweep_row_count(const scnn_sweep* sweep);
SCNN_API scnn_status scnn_sweep_get_row(const scnn_sweep* sweep, size_t index,
                                        scnn_sweep_row* out);
SCNN_API scnn_status scnn_sweep_write(const scnn_sweep* sweep, const char* path,
                                      scnn_format format);
SCNN_API void scnn_sweep_free(scnn_sweep* sweep);

typedef struct scnn_probe_row {
  size_t layer;
  int is_pool;
  size_t total;
  size_t affected;
  double fraction;
} scnn_probe_row;

/* input_len == 0 uses the model's window length. */
SCNN_API scnn_status scnn_probe(const scnn_model* model, size_t input_len,
                                scnn_probe_report** out);
SCNN_API size_t scnn_probe_row_count(const scnn_probe_report* report);
SCNN_API scnn_status scnn_probe_get_row(const scnn_probe_report* report, size_t index,
                                        scnn_probe_row* out);
SCNN_API scnn_status scnn_probe_write(const scnn_probe_report* report, const char* path,
                                      scnn_format format);
SCNN_API void scnn_probe_free(scnn_probe_report* report);

typedef struct scnn_shiftability {
  int aligned;
  double final_fraction;
  scnn_recommendation recommendation;
} scnn_shiftability;

/* input_f_max_hz < 0 assumes the input Nyquist frequency. json_out may be
 * NULL; otherwise it receives the full report (free with scnn_string_free). */
SCNN_API scnn_status scnn_shiftability_report(const scnn_model* model, size_t window_len,
                                              size_t step, double input_f_max_hz,
                                              scnn_shiftability* out, char** json_out);

/* ---- benchmarking ------------------------------------------------------- */

typedef struct scnn_bench_row {
  size_t step;
  size_t window_len;
  int mode; /* 0 full, 1 exact, 2 approximate */
  double ns_per_window;
  uint64_t mac_count;
} scnn_bench_row;

typedef struct scnn_line_fit {
  double slope;
  double intercept;
  double r_squared;
} scnn_line_fit;

SCNN_API scnn_status scnn_bench_speedup(const scnn_model* model, size_t window_len,
                                        const size_t* steps, size_t step_count,
                                        size_t repetitions, size_t warmup, uint64_t seed,
                                        scnn_bench** out);
SCNN_API size_t scnn_bench_row_count(const scnn_bench* bench);
SCNN_API scnn_status scnn_bench_get_row(const scnn_bench* bench, size_t index,
                                        scnn_bench_row* out);
SCNN_API scnn_status scnn_bench_get_fit(const scnn_bench* bench, scnn_stream_mode mode,
                                        scnn_line_fit* out);
/* Writes the per-row table and the fit table as CSV. */
SCNN_API scnn_status scnn_bench_write(const scnn_bench* bench, const char* rows_path,
                                      const char* fit_path);
SCNN_API void scnn_bench_free(scnn_bench* bench);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* STREAMCNN_STREAMCNN_H_ */
