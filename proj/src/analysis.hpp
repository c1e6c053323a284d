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

#pragma once

#include <span>
#include <string>
#include <vector>

#include "model.hpp"
#include "signal.hpp"

namespace streamcnn {

/// Inputs of the pooling shift-error bound. Requires f_max < f_s / 2.
struct PoolingBoundInput {
  double amplitude = 1.0;  // A = sup |x|
  double f_max_hz = 0.0;
  double f_s_hz = 1.0;
  std::size_t pool_len = 1;

  void validate() const;
};

/// Largest possible |x[i] - x[i-1]| for a signal band-limited to f_max:
/// min(2*pi*A*f_max/f_s, 2A).
double consecutive_sample_bound(const PoolingBoundInput& in);

/// (L_p - 1) * consecutive_sample_bound. The same for first-sample, max and
/// average pooling.
double pooling_error_bound(const PoolingBoundInput& in);

/// pooling_error_bound / A, capped at 2 (two signals bounded by A cannot
/// differ by more than 2A).
double relative_pooling_bound(const PoolingBoundInput& in);

struct ShiftError {
  double mean_rel = 0.0;
  double max_rel = 0.0;
};

/// Pools x[0, N) and x[S, S + N) for every S in `steps`, shifts the first
/// result by floor(S / L_p) outputs and compares the overlap. Errors are
/// relative to A = sup|x|; the worst mean and worst max over the sweep are
/// returned.
ShiftError empirical_pool_shift_error(const Signal& signal, const PoolLayer& pool,
                                      std::size_t window_len, std::span<const std::size_t> steps);

struct SweepRow {
  double param = 0.0;
  double mean_rel = 0.0;
  double max_rel = 0.0;
  double bound_rel = 0.0;
};

struct SweepResult {
  std::string param_name;
  std::vector<SweepRow> rows;
};

struct SweepOptions {
  double window_seconds = 8.0;  // length of each compared window
};

/// One row per sampling rate; L_p = pool_window_seconds * f_s.
SweepResult sweep_fs(const SyntheticSpec& spec, std::span<const double> fs_list,
                     double pool_window_seconds, PoolKind kind, const SweepOptions& options = {});

/// One row per pooling length at a fixed sampling rate.
SweepResult sweep_pool_len(const SyntheticSpec& spec, std::span<const std::size_t> lp_list,
                           double f_s, PoolKind kind, const SweepOptions& options = {});

/// Header: param,mean_rel,max_rel,bound
std::string to_csv(const SweepResult& result);
std::string to_json(const SweepResult& result);

struct ProbeRow {
  std::size_t layer = 0;  // index in the model's layer list
  std::string kind;       // "conv" or "pool"
  std::size_t total = 0;     // temporal positions in the layer output
  std::size_t affected = 0;  // positions where any channel deviates from 1
  double fraction = 0.0;
};

struct ProbeReport {
  std::vector<ProbeRow> rows;
  double final_fraction() const { return rows.empty() ? 0.0 : rows.back().fraction; }
};

/// Moving-average weights, identity batch norm, all-ones input of
/// `input_len` samples (0: the model's window length). A point is affected
/// when its value is below 1; the deficit 1 - value is tracked in double so
/// the comparison is exact.
ProbeReport zero_padding_probe(const ModelSpec& spec, std::size_t input_len = 0);

/// Header: layer,total,affected,fraction
std::string to_csv(const ProbeReport& report);

enum class Recommendation { ExactStreaming, ApproximateStreaming, RetrainSignalPadding };
const char* to_string(Recommendation r) noexcept;

struct PoolStageBound {
  std::size_t layer = 0;
  std::size_t pool_len = 0;
  double effective_fs_hz = 0.0;
  double f_max_hz = 0.0;
  double bound_rel = 0.0;
  bool aligned = true;
};

struct ShiftabilityReport {
  AlignmentResult alignment;
  bool alignment_blocking = false;
  double final_fraction = 0.0;
  std::vector<PoolStageBound> stages;
  Recommendation recommendation = Recommendation::ExactStreaming;

  std::string to_json() const;
};

// Contamination thresholds for the recommendation.
inline constexpr double kApproximateMaxFraction = 0.05;
inline constexpr double kExactMaxFraction = 0.25;

/// input_f_max_hz < 0 assumes the worst case (Nyquist of the input rate);
/// each stage clamps f_max to its own, pooled, Nyquist limit.
ShiftabilityReport shiftability_report(const ModelSpec& spec, const WindowConfig& cfg,
                                       double input_f_max_hz = -1.0);

}  // namespace streamcnn
