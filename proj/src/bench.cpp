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

#include "bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace streamcnn {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorCode::Shape, "fit_line needs equally long x and y");
  require(x.size() >= 2, ErrorCode::InvalidArgument, "fit_line needs at least two points");
  const double n = double(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorCode::InvalidArgument, "fit_line needs at least two distinct x values");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // a constant y is fitted perfectly by the horizontal line
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

CompareResult compare_streaming(const ModelSpec& spec, const Signal& signal,
                                const WindowConfig& cfg, StreamMode mode, bool force_misaligned) {
  require(signal.channels() == spec.input_channels, ErrorCode::Shape,
          "signal channel count does not match the model");
  auto shared = std::make_shared<const ModelSpec>(spec);
  StreamSession session(shared, cfg, mode, force_misaligned);

  CompareResult result;
  result.mode = to_string(mode);
  result.aligned = session.aligned();

  std::vector<float> ref_embedding, got_embedding;
  const std::size_t units = spec.output_units();
  std::vector<std::vector<double>> ref_out(units), got_out(units);

  const std::size_t chunks = signal.length() / cfg.step;
  for (std::size_t j = 0; j < chunks; ++j) {
    const auto out = session.push(signal.samples().slice(j * cfg.step, cfg.step));
    if (out.warmup) continue;
    const std::size_t start = (j + 1) * cfg.step - cfg.window_len;
    const auto full = full_inference(spec, signal.samples().slice(start, cfg.window_len));
    ref_embedding.insert(ref_embedding.end(), full.embedding.data().begin(),
                         full.embedding.data().end());
    got_embedding.insert(got_embedding.end(), out.embedding.data().begin(),
                         out.embedding.data().end());
    for (std::size_t u = 0; u < units; ++u) {
      ref_out[u].push_back(full.output[u]);
      got_out[u].push_back((*out.classifier_output)[u]);
    }
    ++result.windows;
  }
  require(result.windows > 0, ErrorCode::EmptyInput, "signal is shorter than one window");
  result.embedding_nrmse = nrmse(ref_embedding, got_embedding);
  for (std::size_t u = 0; u < units; ++u) {
    const auto [lo, hi] = std::minmax_element(ref_out[u].begin(), ref_out[u].end());
    result.output_nrmse.push_back(ref_out[u].size() >= 2 && *hi > *lo
                                      ? nrmse(ref_out[u], got_out[u])
                                      : std::numeric_limits<double>::quiet_NaN());
  }
  return result;
}

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename F>
double time_ns(F&& body) {
  const auto t0 = Clock::now();
  body();
  return double(std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count());
}

volatile float g_sink = 0.0f;

}  // namespace

BenchResult run_speedup(const ModelSpec& spec, std::size_t window_len,
                        std::span<const std::size_t> steps, const BenchOptions& options) {
  require(options.repetitions >= 10, ErrorCode::InvalidArgument,
          "timing needs at least 10 repetitions");
  require(steps.size() >= 2, ErrorCode::InvalidArgument, "speedup needs at least two steps");
  auto shared = std::make_shared<const ModelSpec>(spec);
  const std::size_t total_reps = options.warmup + options.repetitions;

  struct StepRun {
    WindowConfig cfg;
    std::size_t pushes = 0;
    std::vector<Tensor> chunks;
    Tensor window;
    StreamSession exact;
    StreamSession approx;
    std::size_t next = 0;
    std::vector<double> full_t, exact_t, approx_t;
  };
  std::vector<StepRun> runs;
  runs.reserve(steps.size());
  for (std::size_t step : steps) {
    const WindowConfig cfg{window_len, step};
    cfg.validate();
    const std::size_t pushes =
        options.pushes_per_repetition ? options.pushes_per_repetition : cfg.sub_windows();
    const Signal stream = random_stream(spec.input_channels,
                                        window_len + total_reps * pushes * step,
                                        spec.sample_rate_hz, options.seed + step);
    StepRun run{cfg,
                pushes,
                {},
                stream.samples().slice(0, window_len),
                StreamSession(shared, cfg, StreamMode::Exact),
                StreamSession(shared, cfg, StreamMode::Approximate),
                0,
                {},
                {},
                {}};
    for (std::size_t p = 0; p * step + step <= stream.length(); ++p) {
      run.chunks.push_back(stream.samples().slice(p * step, step));
    }
    // fill the ring so every timed push runs the classifier
    for (; run.next < cfg.sub_windows(); ++run.next) {
      run.exact.push(run.chunks[run.next]);
      run.approx.push(run.chunks[run.next]);
    }
    runs.push_back(std::move(run));
  }

  // Repetitions are the outer loop so slow phases of the machine spread over
  // all steps; exact and approximate alternate which one goes first.
  for (std::size_t rep = 0; rep < total_reps; ++rep) {
    for (auto& run : runs) {
      const double tf =
          time_ns([&] { g_sink = full_inference(spec, run.window).embedding.data()[0]; });
      const std::size_t begin = run.next;
      auto time_pushes = [&](StreamSession& session) {
        return time_ns([&] {
                 for (std::size_t p = 0; p < run.pushes; ++p) {
                   g_sink = session.push(run.chunks[begin + p]).embedding.data()[0];
                 }
               }) /
               double(run.pushes);
      };
      double te = 0.0, ta = 0.0;
      if (rep % 2 == 0) {
        te = time_pushes(run.exact);
        ta = time_pushes(run.approx);
      } else {
        ta = time_pushes(run.approx);
        te = time_pushes(run.exact);
      }
      run.next += run.pushes;
      if (rep < options.warmup) continue;
      run.full_t.push_back(tf);
      run.exact_t.push_back(te);
      run.approx_t.push_back(ta);
    }
  }

  BenchResult result;
  std::vector<double> xs, exact_ns, approx_ns;
  for (const auto& run : runs) {
    const std::size_t step = run.cfg.step;
    const auto full_macs = mac_count(spec, window_len, MacScope::FeatureExtractor);
    const auto chunk_macs = mac_count(spec, step, MacScope::FeatureExtractor);
    result.rows.push_back({step, window_len, "full", median(run.full_t), full_macs});
    result.rows.push_back({step, window_len, "exact", median(run.exact_t), chunk_macs});
    result.rows.push_back({step, window_len, "approximate", median(run.approx_t), chunk_macs});
    xs.push_back(double(step));
    exact_ns.push_back(median(run.exact_t));
    approx_ns.push_back(median(run.approx_t));
  }
  result.exact_fit = fit_line(xs, exact_ns);
  result.approximate_fit = fit_line(xs, approx_ns);
  return result;
}

std::string to_csv(const BenchResult& result) {
  std::ostringstream ss;
  ss << "step,window,mode,ns_per_window,mac_count\n";
  for (const auto& r : result.rows) {
    ss << r.step << ',' << r.window_len << ',' << r.mode << ',' << std::llround(r.ns_per_window)
       << ',' << r.mac_count << '\n';
  }
  return ss.str();
}

std::string fit_csv(const BenchResult& result) {
  std::ostringstream ss;
  ss.precision(10);
  ss << "mode,slope,intercept,r_squared\n";
  ss << "exact," << result.exact_fit.slope << ',' << result.exact_fit.intercept << ','
     << result.exact_fit.r_squared << '\n';
  ss << "approximate," << result.approximate_fit.slope << ',' << result.approximate_fit.intercept
     << ',' << result.approximate_fit.r_squared << '\n';
  return ss.str();
}

}  // namespace streamcnn
