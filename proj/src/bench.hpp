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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "model.hpp"
#include "streaming.hpp"

namespace streamcnn {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Needs two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct CompareResult {
  std::string mode;            // exact | approximate
  bool aligned = true;
  std::size_t windows = 0;     // windows compared
  double embedding_nrmse = 0.0;
  std::vector<double> output_nrmse;  // one per classifier unit; empty if undefined
};

/// Streams `signal` through a session and compares every emitted aggregated
/// window against full inference of the same window, as NRMSE over all
/// windows. Output-unit NRMSE is reported for units whose reference varies.
CompareResult compare_streaming(const ModelSpec& spec, const Signal& signal,
                                const WindowConfig& cfg, StreamMode mode,
                                bool force_misaligned = false);

struct BenchRow {
  std::size_t step = 0;
  std::size_t window_len = 0;
  std::string mode;  // full | exact | approximate
  double ns_per_window = 0.0;
  std::uint64_t mac_count = 0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  LineFit exact_fit;        // ns per push vs S
  LineFit approximate_fit;
};

struct BenchOptions {
  std::size_t repetitions = 10;
  std::size_t warmup = 2;
  std::size_t pushes_per_repetition = 0;  // 0: L / S, one window's worth
  std::uint64_t seed = 0;
};

/// Median-of-repetitions timing of full inference per window versus one
/// streaming push per S-chunk, for every step in `steps`. Each repetition
/// processes the same samples in both paths.
BenchResult run_speedup(const ModelSpec& spec, std::size_t window_len,
                        std::span<const std::size_t> steps, const BenchOptions& options = {});

std::string to_csv(const BenchResult& result);
std::string fit_csv(const BenchResult& result);

}  // namespace streamcnn
