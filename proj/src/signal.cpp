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

#include "signal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "error.hpp"

namespace streamcnn {

Signal::Signal(Tensor samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  require(std::isfinite(sample_rate_hz) && sample_rate_hz > 0.0, ErrorCode::InvalidArgument,
          "sample rate must be positive");
}

void WindowConfig::validate() const {
  require(step > 0 && step < window_len, ErrorCode::InvalidArgument,
          "window step must satisfy 0 < S < L (L=" + std::to_string(window_len) +
              ", S=" + std::to_string(step) + ")");
  require(window_len % step == 0, ErrorCode::InvalidArgument,
          "window length " + std::to_string(window_len) + " is not divisible by step " +
              std::to_string(step));
}

double SyntheticSpec::max_frequency_hz() const noexcept {
  return kind == SyntheticKind::Mono ? base_freq_hz : harmonics * base_freq_hz;
}

std::vector<Tensor> window_iter(const Signal& signal, const WindowConfig& cfg) {
  cfg.validate();
  require(signal.length() >= cfg.window_len, ErrorCode::EmptyInput,
          "signal of " + std::to_string(signal.length()) + " samples is shorter than one window of " +
              std::to_string(cfg.window_len));
  std::vector<Tensor> windows;
  for (std::size_t start = 0; start + cfg.window_len <= signal.length(); start += cfg.step) {
    windows.push_back(signal.samples().slice(start, cfg.window_len));
  }
  return windows;
}

Signal gen_signal(const SyntheticSpec& spec, double sample_rate_hz) {
  require(sample_rate_hz > 0.0, ErrorCode::InvalidArgument, "sample rate must be positive");
  require(spec.base_freq_hz > 0.0 && spec.duration_s > 0.0, ErrorCode::InvalidArgument,
          "base frequency and duration must be positive");
  require(spec.kind == SyntheticKind::Mono || spec.harmonics >= 1, ErrorCode::InvalidArgument,
          "multi-frequency signal needs at least one harmonic");
  require(spec.max_frequency_hz() < sample_rate_hz / 2.0, ErrorCode::InvalidArgument,
          "highest frequency " + std::to_string(spec.max_frequency_hz()) +
              " Hz violates Nyquist for f_s = " + std::to_string(sample_rate_hz));

  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * sample_rate_hz));
  require(n > 0, ErrorCode::EmptyInput, "signal duration rounds to zero samples");
  const int harmonics = spec.kind == SyntheticKind::Mono ? 1 : spec.harmonics;
  const double w = 2.0 * std::numbers::pi * spec.base_freq_hz / sample_rate_hz;

  Tensor samples(1, n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    for (int k = 1; k <= harmonics; ++k) v += std::cos(w * k * double(i));
    samples(0, i) = float(v);
  }
  return {std::move(samples), sample_rate_hz};
}

Signal random_stream(std::size_t channels, std::size_t length, double sample_rate_hz,
                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> freq(0.005, 0.2);
  std::uniform_real_distribution<double> amp(0.2, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, 0.1);

  Tensor samples(channels, length);
  for (std::size_t c = 0; c < channels; ++c) {
    double f[4], a[4], p[4];
    for (int k = 0; k < 4; ++k) {
      f[k] = 2.0 * std::numbers::pi * freq(rng);
      a[k] = amp(rng);
      p[k] = phase(rng);
    }
    for (std::size_t t = 0; t < length; ++t) {
      double v = noise(rng);
      for (int k = 0; k < 4; ++k) v += a[k] * std::sin(f[k] * double(t) + p[k]);
      samples(c, t) = float(v);
    }
  }
  return {std::move(samples), sample_rate_hz};
}

double sup_amplitude(const Signal& signal) {
  require(signal.length() > 0 && signal.channels() > 0, ErrorCode::EmptyInput,
          "sup_amplitude of an empty signal");
  double a = 0.0;
  for (float v : signal.samples().data()) a = std::max(a, std::fabs(double(v)));
  return a;
}

namespace {

template <typename T>
double nrmse_impl(std::span<const T> reference, std::span<const T> candidate) {
  require(reference.size() == candidate.size(), ErrorCode::Shape,
          "nrmse length mismatch: " + std::to_string(reference.size()) + " vs " +
              std::to_string(candidate.size()));
  require(reference.size() >= 2, ErrorCode::Shape, "nrmse needs at least two points");
  const auto [lo, hi] = std::minmax_element(reference.begin(), reference.end());
  const double range = double(*hi) - double(*lo);
  require(range > 0.0, ErrorCode::DivisionByZero, "nrmse reference is constant");
  double sq = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = double(reference[i]) - double(candidate[i]);
    sq += d * d;
  }
  return std::sqrt(sq / double(reference.size())) / range;
}

}  // namespace

double nrmse(std::span<const float> reference, std::span<const float> candidate) {
  return nrmse_impl(reference, candidate);
}

double nrmse(std::span<const double> reference, std::span<const double> candidate) {
  return nrmse_impl(reference, candidate);
}

void save_signal_csv(const Signal& signal, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  for (std::size_t c = 0; c < signal.channels(); ++c) out << (c ? "," : "") << "ch" << c;
  out << '\n';
  out.precision(9);
  for (std::size_t t = 0; t < signal.length(); ++t) {
    for (std::size_t c = 0; c < signal.channels(); ++c) {
      out << (c ? "," : "") << signal.samples()(c, t);
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::Io, "short write to " + path.string());
}

Signal load_signal_csv(const std::filesystem::path& path, double sample_rate_hz) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  require(bool(std::getline(in, line)), ErrorCode::EmptyInput, path.string() + " is empty");
  std::size_t channels = 0;
  {
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      require(cell == "ch" + std::to_string(channels), ErrorCode::Schema,
              "unexpected CSV header cell '" + cell + "'");
      ++channels;
    }
  }
  require(channels > 0, ErrorCode::Schema, "CSV header has no channels");

  std::vector<std::vector<float>> cols(channels);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      require(c < channels, ErrorCode::Schema, "too many cells on CSV row " + std::to_string(row));
      try {
        cols[c++].push_back(std::stof(cell));
      } catch (const std::exception&) {
        fail(ErrorCode::Schema, "non-numeric CSV cell on row " + std::to_string(row));
      }
    }
    require(c == channels, ErrorCode::Schema, "too few cells on CSV row " + std::to_string(row));
  }
  const std::size_t length = cols.front().size();
  require(length > 0, ErrorCode::EmptyInput, path.string() + " has no samples");
  Tensor samples(channels, length);
  for (std::size_t c = 0; c < channels; ++c) {
    std::copy(cols[c].begin(), cols[c].end(), samples.row(c).begin());
  }
  return {std::move(samples), sample_rate_hz};
}

void save_signal_raw(const Signal& signal, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  append_f32_le(bytes, signal.samples().data());
  write_file_bytes(path, bytes);
  nlohmann::json header = {{"channels", signal.channels()},
                           {"length", signal.length()},
                           {"sample_rate_hz", signal.sample_rate_hz()}};
  write_file_text(path.string() + ".json", header.dump(2) + "\n");
}

Signal load_signal_raw(const std::filesystem::path& path) {
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(read_file_text(path.string() + ".json"));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Schema, "bad signal sidecar: " + std::string(e.what()));
  }
  std::size_t channels = 0, length = 0;
  double rate = 0.0;
  try {
    channels = header.at("channels").get<std::size_t>();
    length = header.at("length").get<std::size_t>();
    rate = header.at("sample_rate_hz").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Schema, "bad signal sidecar: " + std::string(e.what()));
  }
  const auto bytes = read_file_bytes(path);
  require(bytes.size() == channels * length * 4, ErrorCode::Shape,
          "raw signal has " + std::to_string(bytes.size()) + " bytes, header declares " +
              std::to_string(channels * length * 4));
  return {Tensor(channels, length, decode_f32_le(bytes)), rate};
}

}  // namespace streamcnn
