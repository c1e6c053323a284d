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
#include <filesystem>
#include <span>
#include <vector>

#include "tensor.hpp"

namespace streamcnn {

/// Sampled multi-channel time series.
class Signal {
 public:
  Signal() = default;
  Signal(Tensor samples, double sample_rate_hz);

  const Tensor& samples() const noexcept { return samples_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  std::size_t channels() const noexcept { return samples_.channels(); }
  std::size_t length() const noexcept { return samples_.length(); }

 private:
  Tensor samples_;
  double sample_rate_hz_ = 1.0;
};

/// Window length L and step S, both in samples. Requires 0 < S < L and S | L.
struct WindowConfig {
  std::size_t window_len = 0;
  std::size_t step = 0;

  void validate() const;
  std::size_t sub_windows() const noexcept { return window_len / step; }
};

enum class SyntheticKind { Mono, Multi };

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::Mono;
  double base_freq_hz = 1.0;
  int harmonics = 5;  // only used by Multi
  double duration_s = 16.0;

  /// Highest generated frequency: f0 for Mono, K*f0 for Multi.
  double max_frequency_hz() const noexcept;
};

/// Sliding windows of cfg.window_len taken every cfg.step samples; windows
/// overrunning the end of the signal are not emitted.
std::vector<Tensor> window_iter(const Signal& signal, const WindowConfig& cfg);

/// Single-channel sum-of-cosines test signal sampled from t = 0.
Signal gen_signal(const SyntheticSpec& spec, double sample_rate_hz);

/// Seeded band-limited random stream (random-phase sinusoids plus white
/// noise), used as input for model comparisons and benchmarks.
Signal random_stream(std::size_t channels, std::size_t length, double sample_rate_hz,
                     std::uint64_t seed);

double sup_amplitude(const Signal& signal);

/// sqrt(mean((reference - candidate)^2)) / (max(reference) - min(reference)).
double nrmse(std::span<const float> reference, std::span<const float> candidate);
double nrmse(std::span<const double> reference, std::span<const double> candidate);

// CSV: header "ch0,ch1,...", one row per sample.
void save_signal_csv(const Signal& signal, const std::filesystem::path& path);
Signal load_signal_csv(const std::filesystem::path& path, double sample_rate_hz);

// Raw little-endian float32, channel-major, with "<path>.json" sidecar
// holding {channels, length, sample_rate_hz}.
void save_signal_raw(const Signal& signal, const std::filesystem::path& path);
Signal load_signal_raw(const std::filesystem::path& path);

}  // namespace streamcnn
