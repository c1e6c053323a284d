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

#include "streamcnn/streamcnn.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "analysis.hpp"
#include "bench.hpp"
#include "binary_io.hpp"
#include "error.hpp"
#include "model.hpp"
#include "signal.hpp"
#include "streaming.hpp"

#include <nlohmann/json.hpp>

struct scnn_signal {
  streamcnn::Signal signal;
};

struct scnn_model {
  std::shared_ptr<const streamcnn::ModelSpec> spec;
};

struct scnn_session {
  streamcnn::StreamSession session;
};

struct scnn_sweep {
  streamcnn::SweepResult result;
};

struct scnn_probe_report {
  streamcnn::ProbeReport report;
};

struct scnn_bench {
  streamcnn::BenchResult result;
};

namespace {

using namespace streamcnn;

thread_local std::string g_last_error;

scnn_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return SCNN_ERR_INVALID_ARGUMENT;
    case ErrorCode::Shape: return SCNN_ERR_SHAPE;
    case ErrorCode::Alignment: return SCNN_ERR_ALIGNMENT;
    case ErrorCode::State: return SCNN_ERR_STATE;
    case ErrorCode::EmptyInput: return SCNN_ERR_EMPTY_INPUT;
    case ErrorCode::DivisionByZero: return SCNN_ERR_DIVISION_BY_ZERO;
    case ErrorCode::Unsupported: return SCNN_ERR_UNSUPPORTED;
    case ErrorCode::Schema: return SCNN_ERR_SCHEMA;
    case ErrorCode::Io: return SCNN_ERR_IO;
  }
  return SCNN_ERR_INTERNAL;
}

class BufferTooSmall : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename F>
scnn_status try_(F&& body) {
  try {
    body();
    return SCNN_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const BufferTooSmall& e) {
    g_last_error = e.what();
    return SCNN_ERR_BUFFER_TOO_SMALL;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SCNN_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SCNN_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return SCNN_ERR_INTERNAL;
  }
}

template <typename T>
T* not_null(T* ptr, const char* what) {
  if (ptr == nullptr) fail(ErrorCode::InvalidArgument, std::string("null ") + what);
  return ptr;
}

template <typename T>
T& deref(T* ptr, const char* what = "handle") {
  return *not_null(ptr, what);
}

void copy_out(std::span<const float> src, float* dst, std::size_t capacity, const char* what) {
  if (dst == nullptr) return;
  if (capacity < src.size()) {
    throw BufferTooSmall(std::string(what) + " buffer holds " + std::to_string(capacity) +
                         " values, " + std::to_string(src.size()) + " needed");
  }
  std::memcpy(dst, src.data(), src.size() * sizeof(float));
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

PoolKind to_pool_kind(scnn_pool_kind kind) {
  switch (kind) {
    case SCNN_POOL_MAX: return PoolKind::Max;
    case SCNN_POOL_AVERAGE: return PoolKind::Average;
    case SCNN_POOL_FIRST: return PoolKind::First;
  }
  fail(ErrorCode::InvalidArgument, "unknown pooling kind");
}

StreamMode to_mode(scnn_stream_mode mode) {
  switch (mode) {
    case SCNN_MODE_EXACT: return StreamMode::Exact;
    case SCNN_MODE_APPROXIMATE: return StreamMode::Approximate;
  }
  fail(ErrorCode::InvalidArgument, "unknown stream mode");
}

SyntheticSpec synthetic(scnn_synthetic_kind kind, double f0, int harmonics) {
  SyntheticSpec spec;
  spec.kind = kind == SCNN_SYNTH_MULTI ? SyntheticKind::Multi : SyntheticKind::Mono;
  spec.base_freq_hz = f0;
  spec.harmonics = harmonics;
  return spec;
}

PoolingBoundInput bound_input(const scnn_bound_input* in) {
  const auto& b = deref(in, "bound input");
  return {b.amplitude, b.f_max_hz, b.f_s_hz, b.pool_len};
}

void write_text(const char* path, const std::string& text) {
  write_file_text(not_null(path, "path"), text);
}

}  // namespace

extern "C" {

const char* scnn_version(void) { return "1.0.0"; }

const char* scnn_status_string(scnn_status status) {
  switch (status) {
    case SCNN_OK: return "ok";
    case SCNN_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SCNN_ERR_SHAPE: return "shape error";
    case SCNN_ERR_ALIGNMENT: return "alignment error";
    case SCNN_ERR_STATE: return "state error";
    case SCNN_ERR_EMPTY_INPUT: return "empty input";
    case SCNN_ERR_DIVISION_BY_ZERO: return "division by zero";
    case SCNN_ERR_UNSUPPORTED: return "unsupported";
    case SCNN_ERR_SCHEMA: return "schema error";
    case SCNN_ERR_IO: return "i/o error";
    case SCNN_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case SCNN_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* scnn_last_error(void) { return g_last_error.c_str(); }

void scnn_string_free(char* str) { std::free(str); }

// signals

scnn_status scnn_signal_generate(scnn_synthetic_kind kind, double base_freq_hz, int harmonics,
                                 double duration_s, double sample_rate_hz, scnn_signal** out) {
  return try_([&] {
    auto spec = synthetic(kind, base_freq_hz, harmonics);
    spec.duration_s = duration_s;
    deref(out) = new scnn_signal{gen_signal(spec, sample_rate_hz)};
  });
}

scnn_status scnn_signal_random(size_t channels, size_t length, double sample_rate_hz,
                               uint64_t seed, scnn_signal** out) {
  return try_([&] {
    require(channels > 0 && length > 0, ErrorCode::InvalidArgument,
            "random signal needs channels and samples");
    deref(out) = new scnn_signal{random_stream(channels, length, sample_rate_hz, seed)};
  });
}

scnn_status scnn_signal_from_data(const float* data, size_t channels, size_t length,
                                  double sample_rate_hz, scnn_signal** out) {
  return try_([&] {
    const float* src = not_null(data, "data");
    std::vector<float> values(src, src + channels * length);
    deref(out) = new scnn_signal{Signal(Tensor(channels, length, std::move(values)), sample_rate_hz)};
  });
}

scnn_status scnn_signal_load_csv(const char* path, double sample_rate_hz, scnn_signal** out) {
  return try_([&] {
    deref(out) = new scnn_signal{load_signal_csv(not_null(path, "path"), sample_rate_hz)};
  });
}

scnn_status scnn_signal_load_raw(const char* path, scnn_signal** out) {
  return try_([&] { deref(out) = new scnn_signal{load_signal_raw(not_null(path, "path"))}; });
}

scnn_status scnn_signal_save_csv(const scnn_signal* signal, const char* path) {
  return try_([&] { save_signal_csv(deref(signal).signal, not_null(path, "path")); });
}

scnn_status scnn_signal_save_raw(const scnn_signal* signal, const char* path) {
  return try_([&] { save_signal_raw(deref(signal).signal, not_null(path, "path")); });
}

size_t scnn_signal_channels(const scnn_signal* signal) {
  return signal ? signal->signal.channels() : 0;
}

size_t scnn_signal_length(const scnn_signal* signal) { return signal ? signal->signal.length() : 0; }

double scnn_signal_sample_rate(const scnn_signal* signal) {
  return signal ? signal->signal.sample_rate_hz() : 0.0;
}

const float* scnn_signal_data(const scnn_signal* signal) {
  return signal ? signal->signal.samples().data().data() : nullptr;
}

scnn_status scnn_signal_sup_amplitude(const scnn_signal* signal, double* out) {
  return try_([&] { deref(out, "output") = sup_amplitude(deref(signal).signal); });
}

void scnn_signal_free(scnn_signal* signal) { delete signal; }

scnn_status scnn_nrmse(const float* reference, const float* candidate, size_t n, double* out) {
  return try_([&] {
    deref(out, "output") =
        nrmse(std::span(not_null(reference, "reference"), n),
              std::span(not_null(candidate, "candidate"), n));
  });
}

scnn_status scnn_fit_line(const double* x, const double* y, size_t n, double* slope,
                          double* intercept, double* r_squared) {
  return try_([&] {
    const auto fit = fit_line(std::span(not_null(x, "x"), n), std::span(not_null(y, "y"), n));
    if (slope) *slope = fit.slope;
    if (intercept) *intercept = fit.intercept;
    if (r_squared) *r_squared = fit.r_squared;
  });
}

// models

scnn_status scnn_model_load(const char* manifest_path, scnn_model** out) {
  return try_([&] {
    auto spec = std::make_shared<const ModelSpec>(load_model(not_null(manifest_path, "path")));
    deref(out) = new scnn_model{std::move(spec)};
  });
}

scnn_status scnn_model_save(const scnn_model* model, const char* manifest_path) {
  return try_([&] { save_model(*deref(model).spec, not_null(manifest_path, "path")); });
}

scnn_status scnn_model_reference(const char* name, uint64_t seed, scnn_model** out) {
  return try_([&] {
    auto spec = std::make_shared<const ModelSpec>(reference_model(not_null(name, "name"), seed));
    deref(out) = new scnn_model{std::move(spec)};
  });
}

void scnn_random_model_options_default(scnn_random_model_options* options) {
  if (options == nullptr) return;
  const RandomModelOptions defaults;
  options->min_depth = defaults.min_depth;
  options->max_depth = defaults.max_depth;
  options->input_channels = defaults.input_channels;
  options->window_len = defaults.window_len;
  options->step = defaults.step;
  options->output_units = defaults.output_units;
  options->sample_rate_hz = defaults.sample_rate_hz;
  options->pool_lengths = nullptr;
  options->pool_count = 0;
}

scnn_status scnn_model_random(uint64_t seed, const scnn_random_model_options* options,
                              scnn_model** out) {
  return try_([&] {
    RandomModelOptions opts;
    if (options != nullptr) {
      opts.min_depth = options->min_depth;
      opts.max_depth = options->max_depth;
      opts.input_channels = options->input_channels;
      opts.window_len = options->window_len;
      opts.step = options->step;
      opts.output_units = options->output_units;
      opts.sample_rate_hz = options->sample_rate_hz;
      if (options->pool_count > 0) {
        const size_t* pools = not_null(options->pool_lengths, "pool_lengths");
        opts.pool_lengths.assign(pools, pools + options->pool_count);
      }
    }
    auto spec = std::make_shared<const ModelSpec>(random_model(seed, opts));
    deref(out) = new scnn_model{std::move(spec)};
  });
}

void scnn_model_free(scnn_model* model) { delete model; }

const char* scnn_model_name(const scnn_model* model) {
  return model ? model->spec->name.c_str() : "";
}

scnn_status scnn_model_get_info(const scnn_model* model, scnn_model_info* out) {
  return try_([&] {
    const ModelSpec& spec = *deref(model).spec;
    auto& info = deref(out, "output");
    info.input_channels = spec.input_channels;
    info.embedding_channels = spec.embedding_channels();
    info.output_units = spec.output_units();
    info.window_len = spec.window_len;
    info.step = spec.step;
    info.receptive_field = receptive_field(spec);
    info.pool_factor = cumulative_pool_factor(spec);
    info.conv_count = spec.conv_count();
    info.layer_count = spec.layers.size();
    info.classifier_start = spec.classifier_start;
    info.sample_rate_hz = spec.sample_rate_hz;
  });
}

scnn_status scnn_model_full_inference(const scnn_model* model, const float* window, size_t length,
                                      float* embedding_out, size_t embedding_capacity,
                                      float* output_out, size_t output_capacity) {
  return try_([&] {
    const ModelSpec& spec = *deref(model).spec;
    const float* src = not_null(window, "window");
    Tensor input(spec.input_channels, length,
                 std::vector<float>(src, src + spec.input_channels * length));
    const auto result = full_inference(spec, input);
    copy_out(result.embedding.data(), embedding_out, embedding_capacity, "embedding");
    copy_out(result.output, output_out, output_capacity, "output");
  });
}

scnn_status scnn_model_mac_count(const scnn_model* model, size_t input_len,
                                 int include_classifier, uint64_t* out) {
  return try_([&] {
    deref(out, "output") = mac_count(*deref(model).spec, input_len,
                                     include_classifier ? MacScope::Full
                                                        : MacScope::FeatureExtractor);
  });
}

scnn_status scnn_model_alignment_check(const scnn_model* model, size_t window_len, size_t step,
                                       int* aligned, char** message) {
  return try_([&] {
    const auto result = alignment_check({window_len, step}, *deref(model).spec);
    deref(aligned, "output") = result.aligned ? 1 : 0;
    if (message != nullptr) *message = result.aligned ? nullptr : dup_string(result.describe());
  });
}

// streaming

scnn_status scnn_session_new(const scnn_model* model, size_t window_len, size_t step,
                             scnn_stream_mode mode, int force_misaligned, scnn_session** out) {
  return try_([&] {
    deref(out) = new scnn_session{
        StreamSession(deref(model).spec, {window_len, step}, to_mode(mode), force_misaligned != 0)};
  });
}

scnn_status scnn_session_push(scnn_session* session, const float* chunk, size_t length,
                              float* embedding_out, size_t embedding_capacity, float* output_out,
                              size_t output_capacity, int* warmup) {
  return try_([&] {
    auto& s = deref(session).session;
    const std::size_t channels = s.spec().input_channels;
    const float* src = not_null(chunk, "chunk");
    Tensor input(channels, length, std::vector<float>(src, src + channels * length));
    const auto result = s.push(input);
    if (warmup) *warmup = result.warmup ? 1 : 0;
    if (result.warmup) return;
    copy_out(result.embedding.data(), embedding_out, embedding_capacity, "embedding");
    copy_out(*result.classifier_output, output_out, output_capacity, "output");
  });
}

scnn_status scnn_session_reset(scnn_session* session) {
  return try_([&] { deref(session).session.reset(); });
}

scnn_status scnn_session_memory_footprint(const scnn_session* session, size_t* pad_bytes,
                                          size_t* ring_bytes) {
  return try_([&] {
    const auto fp = deref(session).session.memory_footprint();
    if (pad_bytes) *pad_bytes = fp.pad_bytes;
    if (ring_bytes) *ring_bytes = fp.ring_bytes;
  });
}

size_t scnn_session_sub_windows_seen(const scnn_session* session) {
  return session ? session->session.sub_windows_seen() : 0;
}

void scnn_session_free(scnn_session* session) { delete session; }

scnn_status scnn_stream_compare(const scnn_model* model, const scnn_signal* signal,
                                size_t window_len, size_t step, scnn_stream_mode mode,
                                int force_misaligned, double* embedding_nrmse,
                                double* output_nrmse, size_t output_capacity, size_t* windows) {
  return try_([&] {
    const auto result = compare_streaming(*deref(model).spec, deref(signal).signal,
                                          {window_len, step}, to_mode(mode), force_misaligned != 0);
    if (embedding_nrmse) *embedding_nrmse = result.embedding_nrmse;
    if (windows) *windows = result.windows;
    if (output_nrmse != nullptr) {
      if (output_capacity < result.output_nrmse.size()) {
        throw BufferTooSmall("output_nrmse buffer too small");
      }
      std::copy(result.output_nrmse.begin(), result.output_nrmse.end(), output_nrmse);
    }
  });
}

// analysis

scnn_status scnn_consecutive_sample_bound(const scnn_bound_input* input, double* out) {
  return try_([&] { deref(out, "output") = consecutive_sample_bound(bound_input(input)); });
}

scnn_status scnn_pooling_error_bound(const scnn_bound_input* input, double* out) {
  return try_([&] { deref(out, "output") = pooling_error_bound(bound_input(input)); });
}

scnn_status scnn_sweep_fs(scnn_synthetic_kind kind, double base_freq_hz, int harmonics,
                          const double* fs_list, size_t count, double pool_window_seconds,
                          scnn_pool_kind pool_kind, scnn_sweep** out) {
  return try_([&] {
    const double* list = not_null(fs_list, "fs_list");
    deref(out) = new scnn_sweep{sweep_fs(synthetic(kind, base_freq_hz, harmonics),
                                         std::span(list, count), pool_window_seconds,
                                         to_pool_kind(pool_kind))};
  });
}

scnn_status scnn_sweep_pool_len(scnn_synthetic_kind kind, double base_freq_hz, int harmonics,
                                const size_t* lp_list, size_t count, double sample_rate_hz,
                                scnn_pool_kind pool_kind, scnn_sweep** out) {
  return try_([&] {
    const size_t* list = not_null(lp_list, "lp_list");
    std::vector<std::size_t> lps(list, list + count);
    deref(out) = new scnn_sweep{sweep_pool_len(synthetic(kind, base_freq_hz, harmonics), lps,
                                               sample_rate_hz, to_pool_kind(pool_kind))};
  });
}

size_t scnn_sweep_row_count(const scnn_sweep* sweep) {
  return sweep ? sweep->result.rows.size() : 0;
}

scnn_status scnn_sweep_get_row(const scnn_sweep* sweep, size_t index, scnn_sweep_row* out) {
  return try_([&] {
    const auto& rows = deref(sweep).result.rows;
    require(index < rows.size(), ErrorCode::InvalidArgument, "sweep row index out of range");
    const auto& r = rows[index];
    deref(out, "output") = {r.param, r.mean_rel, r.max_rel, r.bound_rel};
  });
}

scnn_status scnn_sweep_write(const scnn_sweep* sweep, const char* path, scnn_format format) {
  return try_([&] {
    const auto& result = deref(sweep).result;
    write_text(path, format == SCNN_FORMAT_JSON ? to_json(result) : to_csv(result));
  });
}

void scnn_sweep_free(scnn_sweep* sweep) { delete sweep; }

scnn_status scnn_probe(const scnn_model* model, size_t input_len, scnn_probe_report** out) {
  return try_([&] {
    deref(out) = new scnn_probe_report{zero_padding_probe(*deref(model).spec, input_len)};
  });
}

size_t scnn_probe_row_count(const scnn_probe_report* report) {
  return report ? report->report.rows.size() : 0;
}

scnn_status scnn_probe_get_row(const scnn_probe_report* report, size_t index,
                               scnn_probe_row* out) {
  return try_([&] {
    const auto& rows = deref(report).report.rows;
    require(index < rows.size(), ErrorCode::InvalidArgument, "probe row index out of range");
    const auto& r = rows[index];
    deref(out, "output") = {r.layer, r.kind == "pool" ? 1 : 0, r.total, r.affected, r.fraction};
  });
}

scnn_status scnn_probe_write(const scnn_probe_report* report, const char* path,
                             scnn_format format) {
  return try_([&] {
    const auto& r = deref(report).report;
    if (format == SCNN_FORMAT_JSON) {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& row : r.rows) {
        rows.push_back({{"layer", row.layer},
                        {"kind", row.kind},
                        {"total", row.total},
                        {"affected", row.affected},
                        {"fraction", row.fraction}});
      }
      write_text(path, rows.dump(2) + "\n");
    } else {
      write_text(path, to_csv(r));
    }
  });
}

void scnn_probe_free(scnn_probe_report* report) { delete report; }

scnn_status scnn_shiftability_report(const scnn_model* model, size_t window_len, size_t step,
                                     double input_f_max_hz, scnn_shiftability* out,
                                     char** json_out) {
  return try_([&] {
    const auto report = shiftability_report(*deref(model).spec, {window_len, step}, input_f_max_hz);
    if (out != nullptr) {
      out->aligned = report.alignment.aligned ? 1 : 0;
      out->final_fraction = report.final_fraction;
      out->recommendation = static_cast<scnn_recommendation>(report.recommendation);
    }
    if (json_out != nullptr) *json_out = dup_string(report.to_json());
  });
}

// benchmarking

scnn_status scnn_bench_speedup(const scnn_model* model, size_t window_len, const size_t* steps,
                               size_t step_count, size_t repetitions, size_t warmup,
                               uint64_t seed, scnn_bench** out) {
  return try_([&] {
    const size_t* list = not_null(steps, "steps");
    std::vector<std::size_t> s(list, list + step_count);
    BenchOptions options;
    options.repetitions = repetitions;
    options.warmup = warmup;
    options.seed = seed;
    deref(out) = new scnn_bench{run_speedup(*deref(model).spec, window_len, s, options)};
  });
}

size_t scnn_bench_row_count(const scnn_bench* bench) {
  return bench ? bench->result.rows.size() : 0;
}

scnn_status scnn_bench_get_row(const scnn_bench* bench, size_t index, scnn_bench_row* out) {
  return try_([&] {
    const auto& rows = deref(bench).result.rows;
    require(index < rows.size(), ErrorCode::InvalidArgument, "bench row index out of range");
    const auto& r = rows[index];
    const int mode = r.mode == "full" ? 0 : r.mode == "exact" ? 1 : 2;
    deref(out, "output") = {r.step, r.window_len, mode, r.ns_per_window, r.mac_count};
  });
}

scnn_status scnn_bench_get_fit(const scnn_bench* bench, scnn_stream_mode mode,
                               scnn_line_fit* out) {
  return try_([&] {
    const auto& result = deref(bench).result;
    const auto& fit = to_mode(mode) == StreamMode::Exact ? result.exact_fit : result.approximate_fit;
    deref(out, "output") = {fit.slope, fit.intercept, fit.r_squared};
  });
}

scnn_status scnn_bench_write(const scnn_bench* bench, const char* rows_path,
                             const char* fit_path) {
  return try_([&] {
    const auto& result = deref(bench).result;
    write_text(rows_path, to_csv(result));
    write_text(fit_path, fit_csv(result));
  });
}

void scnn_bench_free(scnn_bench* bench) { delete bench; }

}  // extern "C"
