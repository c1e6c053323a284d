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

// Exercises the shared library through the C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <streamcnn/streamcnn.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

namespace {

std::filesystem::path scratch(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / "streamcnn_capi" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

scnn_model* reference(const char* name) {
  scnn_model* m = nullptr;
  REQUIRE(scnn_model_reference(name, 0, &m) == SCNN_OK);
  return m;
}

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::string(scnn_version()) == "1.0.0");
  CHECK(std::string(scnn_status_string(SCNN_OK)).size() > 0);
  CHECK(std::string(scnn_status_string(SCNN_ERR_ALIGNMENT)) !=
        std::string(scnn_status_string(SCNN_ERR_SHAPE)));
}

TEST_CASE("null handles and the last error") {
  scnn_model* m = nullptr;
  CHECK(scnn_model_reference(nullptr, 0, &m) == SCNN_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(scnn_last_error()) > 0);
  CHECK(scnn_model_reference("ecg", 0, &m) != SCNN_OK);
  CHECK(m == nullptr);
  CHECK(scnn_model_load("/nonexistent/streamcnn.json", &m) == SCNN_ERR_IO);
  scnn_model_free(nullptr);
  scnn_signal_free(nullptr);
  scnn_session_free(nullptr);
}

TEST_CASE("model info, inference and buffer sizes") {
  scnn_model* acc = reference("acc");
  scnn_model_info info{};
  REQUIRE(scnn_model_get_info(acc, &info) == SCNN_OK);
  CHECK(info.input_channels == 3);
  CHECK(info.receptive_field == 13);
  CHECK(info.pool_factor == 1);
  CHECK(info.conv_count == 6);

  std::vector<float> window(info.input_channels * info.window_len, 0.5f);
  std::vector<float> emb(info.embedding_channels * info.window_len);
  std::vector<float> out(info.output_units);
  CHECK(scnn_model_full_inference(acc, window.data(), info.window_len, emb.data(), emb.size(),
                                  out.data(), out.size()) == SCNN_OK);
  CHECK(scnn_model_full_inference(acc, window.data(), info.window_len, emb.data(),
                                  emb.size() - 1, nullptr, 0) == SCNN_ERR_BUFFER_TOO_SMALL);
  CHECK(scnn_model_full_inference(acc, window.data(), info.window_len, nullptr, 0, nullptr, 0) ==
        SCNN_OK);

  std::uint64_t full = 0, chunk = 0;
  REQUIRE(scnn_model_mac_count(acc, 960, 0, &full) == SCNN_OK);
  REQUIRE(scnn_model_mac_count(acc, 160, 0, &chunk) == SCNN_OK);
  CHECK(full == 6 * chunk);
  scnn_model_free(acc);
}

TEST_CASE("alignment check") {
  scnn_random_model_options opts;
  scnn_random_model_options_default(&opts);
  const size_t pools[] = {2, 2, 2};
  opts.pool_lengths = pools;
  opts.pool_count = 3;
  scnn_model* m = nullptr;
  REQUIRE(scnn_model_random(1, &opts, &m) == SCNN_OK);
  int aligned = -1;
  char* msg = nullptr;
  REQUIRE(scnn_model_alignment_check(m, 256, 64, &aligned, &msg) == SCNN_OK);
  CHECK(aligned == 1);
  REQUIRE(scnn_model_alignment_check(m, 240, 60, &aligned, &msg) == SCNN_OK);
  CHECK(aligned == 0);
  REQUIRE(msg != nullptr);
  CHECK(std::string(msg).find("15") != std::string::npos);
  scnn_string_free(msg);

  scnn_session* s = nullptr;
  CHECK(scnn_session_new(m, 240, 60, SCNN_MODE_EXACT, 0, &s) == SCNN_ERR_ALIGNMENT);
  CHECK(scnn_session_new(m, 240, 60, SCNN_MODE_EXACT, 1, &s) == SCNN_OK);
  scnn_session_free(s);
  scnn_model_free(m);
}

TEST_CASE("session outlives its model handle and matches full inference on the first window") {
  scnn_model* acc = reference("acc");
  scnn_model_info info{};
  REQUIRE(scnn_model_get_info(acc, &info) == SCNN_OK);
  const size_t L = info.window_len, S = 160, C = info.input_channels;

  scnn_signal* sig = nullptr;
  REQUIRE(scnn_signal_random(C, L, 32.0, 5, &sig) == SCNN_OK);
  const float* data = scnn_signal_data(sig);
  std::vector<float> expected(info.embedding_channels * L);
  REQUIRE(scnn_model_full_inference(acc, data, L, expected.data(), expected.size(), nullptr, 0) ==
          SCNN_OK);

  scnn_session* s = nullptr;
  REQUIRE(scnn_session_new(acc, L, S, SCNN_MODE_EXACT, 0, &s) == SCNN_OK);
  scnn_model_free(acc);

  std::vector<float> emb(expected.size()), chunk(C * S);
  int warmup = -1;
  for (size_t k = 0; k < L / S; ++k) {
    for (size_t c = 0; c < C; ++c) {
      std::memcpy(&chunk[c * S], data + c * L + k * S, S * sizeof(float));
    }
    REQUIRE(scnn_session_push(s, chunk.data(), S, emb.data(), emb.size(), nullptr, 0, &warmup) ==
            SCNN_OK);
  }
  CHECK(warmup == 0);
  double worst = 0.0;
  for (size_t i = 0; i < emb.size(); ++i) worst = std::max(worst, double(std::fabs(emb[i] - expected[i])));
  CHECK(worst <= 1e-5);
  CHECK(scnn_session_sub_windows_seen(s) == L / S);
  CHECK(scnn_session_push(s, chunk.data(), S - 1, nullptr, 0, nullptr, 0, &warmup) ==
        SCNN_ERR_SHAPE);

  size_t pad = 0, ring = 0;
  REQUIRE(scnn_session_memory_footprint(s, &pad, &ring) == SCNN_OK);
  CHECK(pad > 0);
  CHECK(ring > 0);
  REQUIRE(scnn_session_reset(s) == SCNN_OK);
  CHECK(scnn_session_sub_windows_seen(s) == 0);
  scnn_session_free(s);
  scnn_signal_free(sig);
}

TEST_CASE("bounds, probe and files") {
  scnn_bound_input in{1.0, 1.0, 256.0, 2};
  double b = 0.0;
  REQUIRE(scnn_pooling_error_bound(&in, &b) == SCNN_OK);
  CHECK(b == doctest::Approx(2.0 * std::numbers::pi / 256.0));
  in.f_max_hz = 200.0;
  CHECK(scnn_pooling_error_bound(&in, &b) == SCNN_ERR_INVALID_ARGUMENT);

  scnn_model* acc = reference("acc");
  scnn_probe_report* report = nullptr;
  REQUIRE(scnn_probe(acc, 0, &report) == SCNN_OK);
  const size_t n = scnn_probe_row_count(report);
  REQUIRE(n == 6);
  scnn_probe_row row{};
  REQUIRE(scnn_probe_get_row(report, n - 1, &row) == SCNN_OK);
  CHECK(row.affected == 12);
  CHECK(row.total == 960);
  CHECK(scnn_probe_get_row(report, n, &row) != SCNN_OK);

  const auto dir = scratch("files");
  CHECK(scnn_probe_write(report, (dir / "probe.json").c_str(), SCNN_FORMAT_JSON) == SCNN_OK);
  CHECK(std::filesystem::file_size(dir / "probe.json") > 0);
  CHECK(scnn_probe_write(report, "/nonexistent/dir/probe.csv", SCNN_FORMAT_CSV) == SCNN_ERR_IO);
  scnn_probe_free(report);

  scnn_shiftability sh{};
  char* json = nullptr;
  REQUIRE(scnn_shiftability_report(acc, 960, 160, -1.0, &sh, &json) == SCNN_OK);
  CHECK(sh.recommendation == SCNN_RECOMMEND_APPROXIMATE_STREAMING);
  CHECK(std::string(json).find("approximate_streaming") != std::string::npos);
  scnn_string_free(json);

  REQUIRE(scnn_model_save(acc, (dir / "acc.json").c_str()) == SCNN_OK);
  CHECK(std::filesystem::exists(dir / "acc.bin"));
  scnn_model* loaded = nullptr;
  REQUIRE(scnn_model_load((dir / "acc.json").c_str(), &loaded) == SCNN_OK);
  scnn_model_info a{}, c{};
  scnn_model_get_info(acc, &a);
  scnn_model_get_info(loaded, &c);
  CHECK(a.layer_count == c.layer_count);
  scnn_model_free(loaded);
  scnn_model_free(acc);

  scnn_signal* sig = nullptr;
  REQUIRE(scnn_signal_generate(SCNN_SYNTH_MULTI, 1.0, 5, 2.0, 64.0, &sig) == SCNN_OK);
  CHECK(scnn_signal_length(sig) == 128);
  REQUIRE(scnn_signal_save_raw(sig, (dir / "x.f32").c_str()) == SCNN_OK);
  scnn_signal* back = nullptr;
  REQUIRE(scnn_signal_load_raw((dir / "x.f32").c_str(), &back) == SCNN_OK);
  CHECK(std::memcmp(scnn_signal_data(sig), scnn_signal_data(back), 128 * sizeof(float)) == 0);
  CHECK(scnn_signal_sample_rate(back) == 64.0);
  scnn_signal_free(back);
  scnn_signal_free(sig);
}

TEST_CASE("sweeps through the C API") {
  const double fs[] = {32.0, 64.0};
  scnn_sweep* sweep = nullptr;
  REQUIRE(scnn_sweep_fs(SCNN_SYNTH_MONO, 1.0, 5, fs, 2, 1.0, SCNN_POOL_MAX, &sweep) ==
          SCNN_OK);
  REQUIRE(scnn_sweep_row_count(sweep) == 2);
  scnn_sweep_row row{};
  REQUIRE(scnn_sweep_get_row(sweep, 1, &row) == SCNN_OK);
  CHECK(row.param == 64.0);
  CHECK(row.max_rel <= row.bound_rel + 1e-9);
  scnn_sweep_free(sweep);

  double nrmse = -1.0;
  const float ref[] = {0, 2}, cand[] = {1, 1};
  REQUIRE(scnn_nrmse(ref, cand, 2, &nrmse) == SCNN_OK);
  CHECK(nrmse == doctest::Approx(0.5));
  const float flat[] = {1, 1};
  CHECK(scnn_nrmse(flat, cand, 2, &nrmse) == SCNN_ERR_DIVISION_BY_ZERO);
}
