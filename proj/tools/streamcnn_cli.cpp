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

// streamcnn command-line front end. Talks to the library only through the C API.

#include <streamcnn/streamcnn.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct Failure : std::runtime_error {
  Failure(int exit_code, const std::string& msg) : std::runtime_error(msg), code(exit_code) {}
  int code;
};

void check(scnn_status status, const std::string& context) {
  if (status == SCNN_OK) return;
  const int code = status == SCNN_ERR_IO ? kExitIo : kExitValidation;
  throw Failure(code, context + ": " + scnn_status_string(status) + ": " + scnn_last_error());
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};

using SignalPtr = std::unique_ptr<scnn_signal, Deleter<scnn_signal, scnn_signal_free>>;
using ModelPtr = std::unique_ptr<scnn_model, Deleter<scnn_model, scnn_model_free>>;
using SweepPtr = std::unique_ptr<scnn_sweep, Deleter<scnn_sweep, scnn_sweep_free>>;
using ProbePtr = std::unique_ptr<scnn_probe_report, Deleter<scnn_probe_report, scnn_probe_free>>;
using BenchPtr = std::unique_ptr<scnn_bench, Deleter<scnn_bench, scnn_bench_free>>;

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { scnn_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string format = "csv";

  bool json() const { return format == "json"; }
  scnn_format c_format() const { return json() ? SCNN_FORMAT_JSON : SCNN_FORMAT_CSV; }
  std::string ext() const { return json() ? ".json" : ".csv"; }
  std::string path(const std::string& stem) const { return (fs::path(out_dir) / stem).string(); }
};

void ensure_out_dir(const Globals& g) {
  std::error_code ec;
  fs::create_directories(g.out_dir, ec);
  if (ec) throw Failure(kExitIo, "cannot create output directory " + g.out_dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure(kExitIo, "cannot open " + path + " for writing");
  out << text;
  if (!out) throw Failure(kExitIo, "write failed: " + path);
}

scnn_pool_kind parse_pool_kind(const std::string& kind) {
  if (kind == "max") return SCNN_POOL_MAX;
  if (kind == "avg") return SCNN_POOL_AVERAGE;
  return SCNN_POOL_FIRST;
}

// Model selection shared by probe, stream-compare and speedup.
struct ModelSource {
  std::string manifest;
  std::string reference;
  std::size_t min_depth = 3;
  std::size_t max_depth = 9;
  std::size_t input_channels = 1;
  std::vector<std::size_t> pools;

  void add_options(CLI::App* cmd) {
    auto* m = cmd->add_option("--model", manifest, "Model manifest (JSON)");
    auto* r = cmd->add_option("--reference", reference, "Built-in reference model")
                  ->check(CLI::IsMember({"ppg", "eeg", "acc"}));
    m->excludes(r);
    cmd->add_option("--min-depth", min_depth, "Random model: minimum conv count")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-depth", max_depth, "Random model: maximum conv count")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--input-channels", input_channels, "Random model: input channels")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--pools", pools, "Random model: pooling lengths")->delimiter(',');
  }

  // Random models need the window geometry up front; manifests and
  // references carry their own.
  ModelPtr load(std::uint64_t seed, std::size_t window_len, std::size_t step) const {
    scnn_model* raw = nullptr;
    if (!manifest.empty()) {
      check(scnn_model_load(manifest.c_str(), &raw), "loading " + manifest);
    } else if (!reference.empty()) {
      check(scnn_model_reference(reference.c_str(), seed, &raw), "building reference " + reference);
    } else {
      scnn_random_model_options opts;
      scnn_random_model_options_default(&opts);
      opts.min_depth = min_depth;
      opts.max_depth = max_depth;
      opts.input_channels = input_channels;
      if (window_len) opts.window_len = window_len;
      if (step) opts.step = step;
      opts.pool_lengths = pools.empty() ? nullptr : pools.data();
      opts.pool_count = pools.size();
      check(scnn_model_random(seed, &opts, &raw), "building random model");
    }
    return ModelPtr(raw);
  }
};

scnn_model_info info_of(const scnn_model* model) {
  scnn_model_info info{};
  check(scnn_model_get_info(model, &info), "model info");
  return info;
}

// ---- pool-bounds ----------------------------------------------------------

struct PoolBoundsArgs {
  std::string kind = "max";
  double f0 = 1.0;
  int harmonics = 5;
  std::vector<double> fs_list{32, 64, 128, 256, 512, 1024};
  std::vector<std::size_t> lp_list;
  double lp_fs = 256.0;
  double window_seconds = 8.0;
};

int cmd_pool_bounds(const Globals& g, PoolBoundsArgs a) {
  if (a.lp_list.empty()) {
    for (std::size_t p = 1; p <= 16; ++p) a.lp_list.push_back(std::size_t{1} << p);
  }
  ensure_out_dir(g);
  const scnn_pool_kind kind = parse_pool_kind(a.kind);
  struct Job {
    scnn_synthetic_kind synth;
    const char* name;
  };
  for (const Job job : {Job{SCNN_SYNTH_MONO, "mono"}, Job{SCNN_SYNTH_MULTI, "multi"}}) {
    scnn_sweep* raw = nullptr;
    check(scnn_sweep_fs(job.synth, a.f0, a.harmonics, a.fs_list.data(), a.fs_list.size(),
                        a.window_seconds, kind, &raw),
          std::string("fs sweep (") + job.name + ")");
    SweepPtr by_fs(raw);
    const std::string fs_path = g.path(std::string("bounds_fs_") + job.name + g.ext());
    check(scnn_sweep_write(by_fs.get(), fs_path.c_str(), g.c_format()), fs_path);

    check(scnn_sweep_pool_len(job.synth, a.f0, a.harmonics, a.lp_list.data(), a.lp_list.size(),
                              a.lp_fs, kind, &raw),
          std::string("pool length sweep (") + job.name + ")");
    SweepPtr by_lp(raw);
    const std::string lp_path = g.path(std::string("bounds_lp_") + job.name + g.ext());
    check(scnn_sweep_write(by_lp.get(), lp_path.c_str(), g.c_format()), lp_path);

    std::cout << fs_path << "\n" << lp_path << "\n";
  }
  return kExitOk;
}

// ---- probe ----------------------------------------------------------------

struct ProbeArgs {
  ModelSource source;
  std::size_t input_len = 0;
  std::size_t window_len = 0;
  std::size_t step = 0;
  double f_max = -1.0;
};

int cmd_probe(const Globals& g, const ProbeArgs& a) {
  const ModelPtr model = a.source.load(g.seed, a.window_len, a.step);
  const scnn_model_info info = info_of(model.get());
  ensure_out_dir(g);

  scnn_probe_report* raw = nullptr;
  check(scnn_probe(model.get(), a.input_len, &raw), "probe");
  ProbePtr report(raw);
  const std::string probe_path = g.path("probe" + g.ext());
  check(scnn_probe_write(report.get(), probe_path.c_str(), g.c_format()), probe_path);

  const std::size_t L = a.window_len ? a.window_len : info.window_len;
  const std::size_t S = a.step ? a.step : info.step;
  scnn_shiftability summary{};
  OwnedString json;
  check(scnn_shiftability_report(model.get(), L, S, a.f_max, &summary, &json.ptr),
        "shiftability report");
  const std::string report_path = g.path("shiftability.json");
  write_text(report_path, json.str() + "\n");

  std::cout << "model " << scnn_model_name(model.get()) << ": L=" << L << " S=" << S
            << " receptive_field=" << info.receptive_field << " pool_factor=" << info.pool_factor
            << "\n";
  std::cout << "layer  kind  affected/total  fraction\n";
  const std::size_t rows = scnn_probe_row_count(report.get());
  for (std::size_t i = 0; i < rows; ++i) {
    scnn_probe_row row{};
    check(scnn_probe_get_row(report.get(), i, &row), "probe row");
    std::printf("%5zu  %-4s  %8zu/%-6zu  %.4f\n", row.layer, row.is_pool ? "pool" : "conv",
                row.affected, row.total, row.fraction);
  }
  const auto rec = nlohmann::json::parse(json.str());
  std::cout << "aligned: " << (summary.aligned ? "yes" : "no")
            << "  final fraction: " << summary.final_fraction
            << "  recommendation: " << rec.value("recommendation", "") << "\n";
  std::cout << probe_path << "\n" << report_path << "\n";
  return kExitOk;
}

// ---- stream-compare -------------------------------------------------------

struct CompareArgs {
  ModelSource source;
  std::string signal_path;
  double signal_rate = 0.0;
  std::size_t signal_len = 0;
  std::size_t window_len = 0;
  std::size_t step = 0;
  std::string mode = "both";
  bool force_misaligned = false;
};

SignalPtr load_signal(const std::string& path, double rate) {
  scnn_signal* raw = nullptr;
  if (fs::path(path).extension() == ".csv") {
    if (rate <= 0.0) throw Failure(kExitValidation, "--signal-rate is required for CSV signals");
    check(scnn_signal_load_csv(path.c_str(), rate, &raw), "loading " + path);
  } else {
    check(scnn_signal_load_raw(path.c_str(), &raw), "loading " + path);
  }
  return SignalPtr(raw);
}

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream ss;
  ss.precision(9);
  ss << v;
  return ss.str();
}

int cmd_stream_compare(const Globals& g, const CompareArgs& a) {
  const ModelPtr model = a.source.load(g.seed, a.window_len, a.step);
  const scnn_model_info info = info_of(model.get());
  const std::size_t L = a.window_len ? a.window_len : info.window_len;
  const std::size_t S = a.step ? a.step : info.step;

  SignalPtr signal;
  if (!a.signal_path.empty()) {
    signal = load_signal(a.signal_path, a.signal_rate);
  } else {
    const std::size_t length = a.signal_len ? a.signal_len : 16 * L;
    scnn_signal* raw = nullptr;
    check(scnn_signal_random(info.input_channels, length, info.sample_rate_hz, g.seed, &raw),
          "random signal");
    signal.reset(raw);
  }

  std::vector<scnn_stream_mode> modes;
  if (a.mode != "approximate") modes.push_back(SCNN_MODE_EXACT);
  if (a.mode != "exact") modes.push_back(SCNN_MODE_APPROXIMATE);

  int aligned = 0;
  OwnedString why;
  check(scnn_model_alignment_check(model.get(), L, S, &aligned, &why.ptr), "alignment check");
  if (!aligned && !a.force_misaligned) {
    throw Failure(kExitValidation, "step is not aligned with pooling (" + why.str() +
                                       "); pass --force-misaligned to stream anyway");
  }

  ensure_out_dir(g);
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream csv;
  csv << "mode,aligned,windows,quantity,nrmse\n";
  for (const auto mode : modes) {
    double emb = 0.0;
    std::vector<double> out(info.output_units, 0.0);
    std::size_t windows = 0;
    check(scnn_stream_compare(model.get(), signal.get(), L, S, mode, a.force_misaligned ? 1 : 0,
                              &emb, out.data(), out.size(), &windows),
          "stream compare");
    const char* name = mode == SCNN_MODE_EXACT ? "exact" : "approximate";
    auto emit = [&](const std::string& quantity, double value) {
      csv << name << ',' << aligned << ',' << windows << ',' << quantity << ','
          << fmt_double(value) << '\n';
      rows.push_back({{"mode", name},
                      {"aligned", aligned != 0},
                      {"windows", windows},
                      {"quantity", quantity},
                      {"nrmse", std::isnan(value) ? nlohmann::json(nullptr) : nlohmann::json(value)}});
    };
    emit("embedding", emb);
    for (std::size_t u = 0; u < out.size(); ++u) emit("output" + std::to_string(u), out[u]);
  }
  const std::string path = g.path("stream_compare" + g.ext());
  write_text(path, g.json() ? rows.dump(2) + "\n" : csv.str());
  std::cout << (g.json() ? rows.dump(2) + "\n" : csv.str()) << path << "\n";
  return kExitOk;
}

// ---- speedup --------------------------------------------------------------

struct SpeedupArgs {
  ModelSource source;
  std::size_t window_len = 0;
  std::vector<std::size_t> steps;
  std::size_t repetitions = 10;
  std::size_t warmup = 2;
};

int cmd_speedup(const Globals& g, SpeedupArgs a) {
  const ModelPtr model = a.source.load(g.seed, a.window_len, 0);
  const scnn_model_info info = info_of(model.get());
  const std::size_t L = a.window_len ? a.window_len : info.window_len;
  if (a.steps.empty()) {
    for (std::size_t s = info.pool_factor; s < L; s *= 2) {
      if (L % s == 0) a.steps.push_back(s);
    }
  }
  for (const std::size_t s : a.steps) {
    int aligned = 0;
    OwnedString why;
    check(scnn_model_alignment_check(model.get(), L, s, &aligned, &why.ptr), "alignment check");
    if (!aligned) {
      throw Failure(kExitValidation, "step " + std::to_string(s) + " is not aligned: " + why.str());
    }
  }

  scnn_bench* raw = nullptr;
  check(scnn_bench_speedup(model.get(), L, a.steps.data(), a.steps.size(), a.repetitions, a.warmup,
                           g.seed, &raw),
        "speedup benchmark");
  BenchPtr bench(raw);
  ensure_out_dir(g);

  const std::size_t n = scnn_bench_row_count(bench.get());
  for (std::size_t i = 0; i < n; ++i) {
    scnn_bench_row row{};
    check(scnn_bench_get_row(bench.get(), i, &row), "bench row");
    if (row.ns_per_window < 1000.0) {
      std::cerr << "warning: median below 1 us (step " << row.step
                << "); timer resolution may dominate\n";
      break;
    }
  }

  const std::string rows_path = g.path("speedup.csv");
  const std::string fit_path = g.path("speedup_fit.csv");
  if (g.json()) {
    nlohmann::json out;
    const char* modes[] = {"full", "exact", "approximate"};
    for (std::size_t i = 0; i < n; ++i) {
      scnn_bench_row row{};
      check(scnn_bench_get_row(bench.get(), i, &row), "bench row");
      out["rows"].push_back({{"step", row.step},
                             {"window", row.window_len},
                             {"mode", modes[row.mode]},
                             {"ns_per_window", row.ns_per_window},
                             {"mac_count", row.mac_count}});
    }
    for (const auto mode : {SCNN_MODE_EXACT, SCNN_MODE_APPROXIMATE}) {
      scnn_line_fit fit{};
      check(scnn_bench_get_fit(bench.get(), mode, &fit), "bench fit");
      out["fit"][mode == SCNN_MODE_EXACT ? "exact" : "approximate"] = {
          {"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
    }
    const std::string path = g.path("speedup.json");
    write_text(path, out.dump(2) + "\n");
    std::cout << path << "\n";
  } else {
    check(scnn_bench_write(bench.get(), rows_path.c_str(), fit_path.c_str()), "writing speedup");
    std::cout << rows_path << "\n" << fit_path << "\n";
  }
  return kExitOk;
}

// ---- gen-model ------------------------------------------------------------

struct GenModelArgs {
  ModelSource source;
  std::size_t window_len = 0;
  std::size_t step = 0;
  std::string name;
};

int cmd_gen_model(const Globals& g, const GenModelArgs& a) {
  const ModelPtr model = a.source.load(g.seed, a.window_len, a.step);
  ensure_out_dir(g);
  std::string stem = a.name;
  if (stem.empty()) {
    stem = a.source.reference.empty() ? "model_" + std::to_string(g.seed)
                                      : "h_" + a.source.reference;
  }
  const std::string path = g.path(stem + ".json");
  check(scnn_model_save(model.get(), path.c_str()), "saving " + path);
  std::cout << path << "\n";
  return kExitOk;
}

// ---- gen-signal -----------------------------------------------------------

struct GenSignalArgs {
  std::string kind = "mono";
  double f0 = 1.0;
  int harmonics = 5;
  double duration = 16.0;
  double rate = 256.0;
  std::size_t channels = 1;
  std::size_t length = 0;
  bool raw = false;
  std::string name = "signal";
};

int cmd_gen_signal(const Globals& g, const GenSignalArgs& a) {
  scnn_signal* raw = nullptr;
  if (a.kind == "random") {
    const std::size_t length =
        a.length ? a.length : static_cast<std::size_t>(std::llround(a.duration * a.rate));
    check(scnn_signal_random(a.channels, length, a.rate, g.seed, &raw), "random signal");
  } else {
    check(scnn_signal_generate(a.kind == "multi" ? SCNN_SYNTH_MULTI : SCNN_SYNTH_MONO, a.f0,
                               a.harmonics, a.duration, a.rate, &raw),
          "synthetic signal");
  }
  SignalPtr signal(raw);
  ensure_out_dir(g);
  const std::string path = g.path(a.name + (a.raw ? ".f32" : ".csv"));
  if (a.raw) {
    check(scnn_signal_save_raw(signal.get(), path.c_str()), "saving " + path);
  } else {
    check(scnn_signal_save_csv(signal.get(), path.c_str()), "saving " + path);
  }
  std::cout << path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming inference and zero-padding analysis for 1D temporal CNNs"};
  app.set_version_flag("--version", std::string(scnn_version()));
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "Seed for random models and signals");
  app.add_option("--out-dir", g.out_dir, "Directory for output files");
  app.add_option("--format", g.format, "Table format")->check(CLI::IsMember({"csv", "json"}));

  PoolBoundsArgs pb;
  auto* pool_bounds = app.add_subcommand("pool-bounds", "Pooling shift error vs analytic bound");
  pool_bounds->add_option("--kind", pb.kind, "Pooling kind")
      ->check(CLI::IsMember({"max", "avg", "first"}));
  pool_bounds->add_option("--f0", pb.f0, "Base frequency in Hz")->check(CLI::PositiveNumber);
  pool_bounds->add_option("--harmonics", pb.harmonics, "Harmonics of the multi-frequency signal")
      ->check(CLI::PositiveNumber);
  pool_bounds->add_option("--fs", pb.fs_list, "Sampling rates for the fs sweep")->delimiter(',');
  pool_bounds->add_option("--lp", pb.lp_list, "Pool lengths for the pool length sweep")
      ->delimiter(',');
  pool_bounds->add_option("--lp-fs", pb.lp_fs, "Sampling rate of the pool length sweep")
      ->check(CLI::PositiveNumber);
  pool_bounds->add_option("--window-seconds", pb.window_seconds,
                          "Pooling window of the fs sweep in seconds")
      ->check(CLI::PositiveNumber);

  ProbeArgs pr;
  auto* probe = app.add_subcommand("probe", "Zero-padding contamination probe");
  pr.source.add_options(probe);
  probe->add_option("--input-len", pr.input_len, "Probe input length (default: window)");
  probe->add_option("--window", pr.window_len, "Window length L");
  probe->add_option("--step", pr.step, "Step S");
  probe->add_option("--f-max", pr.f_max, "Input maximum frequency in Hz (default: Nyquist)");

  CompareArgs cp;
  auto* compare = app.add_subcommand("stream-compare", "Streaming vs full inference NRMSE");
  cp.source.add_options(compare);
  compare->add_option("--signal", cp.signal_path, "Signal file (.csv or raw float32)");
  compare->add_option("--signal-rate", cp.signal_rate, "Sampling rate of a CSV signal");
  compare->add_option("--signal-len", cp.signal_len, "Random signal length (default: 16 windows)");
  compare->add_option("--window", cp.window_len, "Window length L");
  compare->add_option("--step", cp.step, "Step S");
  compare->add_option("--mode", cp.mode, "Streaming mode")
      ->check(CLI::IsMember({"exact", "approximate", "both"}));
  compare->add_flag("--force-misaligned", cp.force_misaligned,
                    "Stream even when S is not aligned with pooling");

  SpeedupArgs sp;
  auto* speedup = app.add_subcommand("speedup", "Wall-clock and MAC speedup benchmark");
  sp.source.add_options(speedup);
  speedup->add_option("--window", sp.window_len, "Window length L");
  speedup->add_option("--steps", sp.steps, "Steps S (default: powers of two)")->delimiter(',');
  speedup->add_option("--repetitions", sp.repetitions, "Timed repetitions (>= 10)");
  speedup->add_option("--warmup", sp.warmup, "Untimed warmup repetitions");

  GenModelArgs gm;
  auto* gen_model = app.add_subcommand("gen-model", "Write a model manifest and weight blob");
  gm.source.add_options(gen_model);
  gen_model->add_option("--window", gm.window_len, "Random model window length");
  gen_model->add_option("--step", gm.step, "Random model step");
  gen_model->add_option("--name", gm.name, "Output file stem");

  GenSignalArgs gs;
  auto* gen_signal = app.add_subcommand("gen-signal", "Write a test signal");
  gen_signal->add_option("--kind", gs.kind, "Signal kind")
      ->check(CLI::IsMember({"mono", "multi", "random"}));
  gen_signal->add_option("--f0", gs.f0, "Base frequency in Hz");
  gen_signal->add_option("--harmonics", gs.harmonics, "Harmonics for multi");
  gen_signal->add_option("--duration", gs.duration, "Duration in seconds");
  gen_signal->add_option("--rate", gs.rate, "Sampling rate in Hz");
  gen_signal->add_option("--channels", gs.channels, "Channels for random");
  gen_signal->add_option("--length", gs.length, "Samples for random (overrides duration)");
  gen_signal->add_flag("--raw", gs.raw, "Write raw float32 with a JSON sidecar");
  gen_signal->add_option("--name", gs.name, "Output file stem");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*pool_bounds) return cmd_pool_bounds(g, pb);
    if (*probe) return cmd_probe(g, pr);
    if (*compare) return cmd_stream_compare(g, cp);
    if (*speedup) return cmd_speedup(g, sp);
    if (*gen_model) return cmd_gen_model(g, gm);
    if (*gen_signal) return cmd_gen_signal(g, gs);
  } catch (const Failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
