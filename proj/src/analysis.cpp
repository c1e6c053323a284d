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

#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace streamcnn {

void PoolingBoundInput::validate() const {
  require(amplitude >= 0.0 && std::isfinite(amplitude), ErrorCode::InvalidArgument,
          "amplitude must be a finite value >= 0");
  require(f_s_hz > 0.0, ErrorCode::InvalidArgument, "sampling frequency must be positive");
  require(f_max_hz >= 0.0 && f_max_hz < f_s_hz / 2.0, ErrorCode::InvalidArgument,
          "f_max = " + std::to_string(f_max_hz) + " Hz violates Nyquist for f_s = " +
              std::to_string(f_s_hz) + " Hz");
  require(pool_len >= 1, ErrorCode::InvalidArgument, "pool length must be >= 1");
}

double consecutive_sample_bound(const PoolingBoundInput& in) {
  in.validate();
  return std::min(2.0 * std::numbers::pi * in.amplitude * in.f_max_hz / in.f_s_hz,
                  2.0 * in.amplitude);
}

double pooling_error_bound(const PoolingBoundInput& in) {
  return double(in.pool_len - 1) * consecutive_sample_bound(in);
}

double relative_pooling_bound(const PoolingBoundInput& in) {
  PoolingBoundInput unit = in;
  unit.amplitude = 1.0;
  return std::min(pooling_error_bound(unit), 2.0);
}

namespace {

// Pool value for a group starting at every position u in [0, n - len].
std::vector<double> sliding_pool(std::span<const float> x, std::size_t len, PoolKind kind) {
  const std::size_t count = x.size() - len + 1;
  std::vector<double> out(count);
  switch (kind) {
    case PoolKind::First:
      for (std::size_t u = 0; u < count; ++u) out[u] = x[u];
      break;
    case PoolKind::Average: {
      std::vector<double> prefix(x.size() + 1, 0.0);
      for (std::size_t i = 0; i < x.size(); ++i) prefix[i + 1] = prefix[i] + x[i];
      for (std::size_t u = 0; u < count; ++u) out[u] = (prefix[u + len] - prefix[u]) / double(len);
      break;
    }
    case PoolKind::Max: {
      std::deque<std::size_t> window;  // indices with decreasing values
      for (std::size_t i = 0; i < x.size(); ++i) {
        while (!window.empty() && x[window.back()] <= x[i]) window.pop_back();
        window.push_back(i);
        if (window.front() + len <= i) window.pop_front();
        if (i + 1 >= len) out[i + 1 - len] = x[window.front()];
      }
      break;
    }
  }
  return out;
}

}  // namespace

ShiftError empirical_pool_shift_error(const Signal& signal, const PoolLayer& pool,
                                      std::size_t window_len, std::span<const std::size_t> steps) {
  require(pool.length >= 1, ErrorCode::InvalidArgument, "pool length must be >= 1");
  require(window_len > 0 && window_len % pool.length == 0, ErrorCode::Alignment,
          "window length " + std::to_string(window_len) + " is not divisible by L_p = " +
              std::to_string(pool.length));
  require(!steps.empty(), ErrorCode::EmptyInput, "empty step sweep");
  const std::size_t max_step = *std::max_element(steps.begin(), steps.end());
  require(*std::min_element(steps.begin(), steps.end()) >= 1 && max_step < window_len,
          ErrorCode::InvalidArgument, "every step must satisfy 0 < S < window length");
  require(signal.length() >= window_len + max_step, ErrorCode::EmptyInput,
          "signal too short for two overlapping windows at S = " + std::to_string(max_step));

  const double amplitude = sup_amplitude(signal);
  ShiftError worst;
  if (amplitude == 0.0) return worst;

  const std::size_t groups = window_len / pool.length;
  for (std::size_t c = 0; c < signal.channels(); ++c) {
    const auto x = signal.samples().row(c).first(window_len + max_step);
    const auto slide = sliding_pool(x, pool.length, pool.kind);
    for (std::size_t step : steps) {
      const std::size_t shift = step / pool.length;
      const std::size_t compared = groups - shift;
      double sum = 0.0, peak = 0.0;
      for (std::size_t j = 0; j < compared; ++j) {
        const double d = std::fabs(slide[(j + shift) * pool.length] - slide[step + j * pool.length]);
        sum += d;
        peak = std::max(peak, d);
      }
      worst.mean_rel = std::max(worst.mean_rel, sum / double(compared) / amplitude);
      worst.max_rel = std::max(worst.max_rel, peak / amplitude);
    }
  }
  return worst;
}

namespace {

SweepRow sweep_row(const SyntheticSpec& spec, double f_s, std::size_t pool_len, PoolKind kind,
                   const SweepOptions& options) {
  require(pool_len >= 1, ErrorCode::InvalidArgument, "pool length must be >= 1");
  auto window_len = std::max<std::size_t>(std::size_t(std::llround(options.window_seconds * f_s)),
                                          pool_len);
  window_len = (window_len + pool_len - 1) / pool_len * pool_len;

  SyntheticSpec gen = spec;
  gen.duration_s = double(2 * window_len) / f_s;
  const Signal signal = gen_signal(gen, f_s);

  std::vector<std::size_t> steps(window_len - 1);
  for (std::size_t s = 1; s < window_len; ++s) steps[s - 1] = s;
  const auto err = empirical_pool_shift_error(signal, PoolLayer{kind, pool_len}, window_len, steps);

  PoolingBoundInput bound{sup_amplitude(signal), spec.max_frequency_hz(), f_s, pool_len};
  return {0.0, err.mean_rel, err.max_rel, relative_pooling_bound(bound)};
}

}  // namespace

SweepResult sweep_fs(const SyntheticSpec& spec, std::span<const double> fs_list,
                     double pool_window_seconds, PoolKind kind, const SweepOptions& options) {
  SweepResult result{"f_s", {}};
  for (double f_s : fs_list) {
    const auto pool_len = std::size_t(std::llround(pool_window_seconds * f_s));
    auto row = sweep_row(spec, f_s, pool_len, kind, options);
    row.param = f_s;
    result.rows.push_back(row);
  }
  return result;
}

SweepResult sweep_pool_len(const SyntheticSpec& spec, std::span<const std::size_t> lp_list,
                           double f_s, PoolKind kind, const SweepOptions& options) {
  SweepResult result{"L_p", {}};
  for (std::size_t lp : lp_list) {
    auto row = sweep_row(spec, f_s, lp, kind, options);
    row.param = double(lp);
    result.rows.push_back(row);
  }
  return result;
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream ss;
  ss.precision(17);
  ss << "param,mean_rel,max_rel,bound\n";
  for (const auto& r : result.rows) {
    ss << r.param << ',' << r.mean_rel << ',' << r.max_rel << ',' << r.bound_rel << '\n';
  }
  return ss.str();
}

std::string to_json(const SweepResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"param", r.param},
                    {"mean_rel", r.mean_rel},
                    {"max_rel", r.max_rel},
                    {"bound", r.bound_rel}});
  }
  return nlohmann::json{{"param_name", result.param_name}, {"rows", rows}}.dump(2) + "\n";
}

ProbeReport zero_padding_probe(const ModelSpec& spec, std::size_t input_len) {
  if (input_len == 0) input_len = spec.window_len;
  require(input_len > 0, ErrorCode::InvalidArgument, "probe needs an input length");

  // Tracks the deficit 1 - value instead of the value. With all-ones input
  // and averaging taps every channel carries the same value, and deficits
  // only ever get averaged or selected, so a deficit too small to survive
  // 1 - deficit in float stays nonzero here.
  ProbeReport report;
  std::vector<double> deficit(input_len, 0.0);
  const auto h = spec.feature_extractor();
  auto record = [&](std::size_t layer, const char* kind) {
    const auto affected = std::size_t(std::count_if(deficit.begin(), deficit.end(),
                                                    [](double d) { return d > 0.0; }));
    report.rows.push_back(
        {layer, kind, deficit.size(), affected, double(affected) / double(deficit.size())});
  };

  for (std::size_t i = 0; i < h.size(); ++i) {
    if (const auto* conv = std::get_if<ConvLayer>(&h[i])) {
      const std::size_t m = conv->kernel_size, d = conv->dilation;
      std::vector<double> out(deficit.size());
      for (std::size_t t = 0; t < out.size(); ++t) {
        double sum = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          const std::size_t back = (m - 1 - k) * d;
          sum += back > t ? 1.0 : deficit[t - back];
        }
        out[t] = sum / double(m);
      }
      deficit = std::move(out);
      record(i, "conv");
    } else if (const auto* p = std::get_if<PoolLayer>(&h[i])) {
      require(deficit.size() % p->length == 0, ErrorCode::Alignment,
              "pool length " + std::to_string(p->length) + " does not divide input length " +
                  std::to_string(deficit.size()));
      std::vector<double> out(deficit.size() / p->length);
      for (std::size_t g = 0; g < out.size(); ++g) {
        const auto first = deficit.begin() + std::ptrdiff_t(g * p->length);
        const auto last = first + std::ptrdiff_t(p->length);
        switch (p->kind) {
          case PoolKind::Max: out[g] = *std::min_element(first, last); break;
          case PoolKind::Average:
            out[g] = std::accumulate(first, last, 0.0) / double(p->length);
            break;
          case PoolKind::First: out[g] = *first; break;
        }
      }
      deficit = std::move(out);
      record(i, "pool");
    } else if (std::holds_alternative<ReluLayer>(h[i]) ||
               std::holds_alternative<BatchNormParams>(h[i])) {
      // values stay in [0, 1], so ReLU is the identity; batch norm is set to identity
    } else {
      fail(ErrorCode::Unsupported, std::string(layer_kind_name(h[i])) + " layer at index " +
                                       std::to_string(i) + " cannot be probed inside h");
    }
  }
  return report;
}

std::string to_csv(const ProbeReport& report) {
  std::ostringstream ss;
  ss.precision(17);
  ss << "layer,total,affected,fraction\n";
  for (const auto& r : report.rows) {
    ss << r.layer << ',' << r.total << ',' << r.affected << ',' << r.fraction << '\n';
  }
  return ss.str();
}

const char* to_string(Recommendation r) noexcept {
  switch (r) {
    case Recommendation::ExactStreaming: return "exact_streaming";
    case Recommendation::ApproximateStreaming: return "approximate_streaming";
    case Recommendation::RetrainSignalPadding: return "retrain_signal_padding";
  }
  return "?";
}

ShiftabilityReport shiftability_report(const ModelSpec& spec, const WindowConfig& cfg,
                                       double input_f_max_hz) {
  ShiftabilityReport report;
  report.alignment = alignment_check(cfg, spec);
  report.alignment_blocking = !report.alignment.aligned;
  report.final_fraction = zero_padding_probe(spec, cfg.window_len).final_fraction();

  const double nyquist_margin = 1.0 - 1e-9;
  double f_max = input_f_max_hz < 0.0 ? spec.sample_rate_hz / 2.0 : input_f_max_hz;
  double factor = 1.0;
  const auto h = spec.feature_extractor();
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto* p = std::get_if<PoolLayer>(&h[i]);
    if (!p) continue;
    PoolStageBound stage;
    stage.layer = i;
    stage.pool_len = p->length;
    stage.effective_fs_hz = spec.sample_rate_hz / factor;
    f_max = std::min(f_max, stage.effective_fs_hz / 2.0 * nyquist_margin);
    stage.f_max_hz = f_max;
    stage.bound_rel =
        relative_pooling_bound({1.0, stage.f_max_hz, stage.effective_fs_hz, stage.pool_len});
    stage.aligned = std::none_of(report.alignment.stages.begin(), report.alignment.stages.end(),
                                 [&](const MisalignedStage& m) { return m.layer_index == i; });
    report.stages.push_back(stage);
    factor *= double(p->length);
  }

  if (report.final_fraction <= kApproximateMaxFraction) {
    report.recommendation = Recommendation::ApproximateStreaming;
  } else if (report.final_fraction <= kExactMaxFraction) {
    report.recommendation = Recommendation::ExactStreaming;
  } else {
    report.recommendation = Recommendation::RetrainSignalPadding;
  }
  return report;
}

std::string ShiftabilityReport::to_json() const {
  nlohmann::json j;
  j["aligned"] = alignment.aligned;
  j["alignment_blocking"] = alignment_blocking;
  j["alignment"] = alignment.describe();
  j["final_contaminated_fraction"] = final_fraction;
  j["recommendation"] = to_string(recommendation);
  j["pool_stages"] = nlohmann::json::array();
  for (const auto& s : stages) {
    j["pool_stages"].push_back({{"layer", s.layer},
                                {"pool_len", s.pool_len},
                                {"effective_fs_hz", s.effective_fs_hz},
                                {"f_max_hz", s.f_max_hz},
                                {"bound_rel", s.bound_rel},
                                {"aligned", s.aligned}});
  }
  return j.dump(2) + "\n";
}

}  // namespace streamcnn
