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

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bench.hpp"
#include "error.hpp"
#include "test_support.hpp"

using namespace streamcnn;

TEST_CASE("fit_line") {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{1, 3, 5, 7};
  const auto f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r_squared == doctest::Approx(1.0));

  const std::vector<double> flat{4, 4, 4, 4};
  CHECK(fit_line(x, flat).slope == doctest::Approx(0.0));
  CHECK(fit_line(x, flat).intercept == doctest::Approx(4.0));

  const std::vector<double> x3{0, 1, 2}, sq{0, 1, 4};
  const auto q = fit_line(x3, sq);
  CHECK(q.slope == doctest::Approx(2.0));
  CHECK(q.intercept == doctest::Approx(-1.0 / 3.0));
  // residuals 1/3, -2/3, 1/3 against total variance 26/3
  CHECK(q.r_squared == doctest::Approx(1.0 - (2.0 / 3.0) / (26.0 / 3.0)));

  const std::vector<double> same{2, 2, 2};
  CHECK_THROWS_AS(fit_line(same, sq), Error);
  CHECK_THROWS_AS(fit_line(x, sq), Error);
  const std::vector<double> one{1};
  CHECK_THROWS_AS(fit_line(one, one), Error);
}

TEST_CASE("compare_streaming") {
  std::mt19937_64 rng(10);
  SUBCASE("pointwise convs have no padding, so both modes are exact") {
    const ModelSpec spec = testing::make_spec(
        2, {ConvLayer(testing::random_conv(2, 3, 1, 1, rng)), ReluLayer{},
            PoolLayer{PoolKind::Average, 2}, ConvLayer(testing::random_conv(3, 2, 1, 1, rng))},
        64, 16, 1, rng);
    const Signal s(testing::random_tensor(2, 64 * 8, rng), 32.0);
    for (StreamMode mode : {StreamMode::Exact, StreamMode::Approximate}) {
      const auto r = compare_streaming(spec, s, {64, 16}, mode);
      CHECK(r.windows == 512 / 16 - 3);
      CHECK(r.aligned);
      CHECK(r.embedding_nrmse < 1e-6);
    }
  }
  SUBCASE("padding makes approximate mode differ") {
    RandomModelOptions opts;
    opts.pool_lengths = {2};
    const ModelSpec spec = random_model(4, opts);
    const Signal s = random_stream(1, spec.window_len * 6, spec.sample_rate_hz, 3);
    const auto r = compare_streaming(spec, s, {spec.window_len, spec.step},
                                     StreamMode::Approximate);
    CHECK(r.mode == "approximate");
    CHECK(r.embedding_nrmse > 0.0);
    CHECK(r.output_nrmse.size() <= spec.output_units());
  }
  SUBCASE("short signals are rejected") {
    const ModelSpec spec = random_model(1);
    const Signal s = random_stream(1, spec.window_len - 1, spec.sample_rate_hz, 1);
    CHECK_THROWS_AS(compare_streaming(spec, s, {spec.window_len, spec.step}, StreamMode::Exact),
                    Error);
  }
}

TEST_CASE("run_speedup reports MAC ratio L/S for pooling-free extractors") {
  const ModelSpec acc = reference_model("acc");
  const std::vector<std::size_t> steps{96, 192, 480};
  BenchOptions options;
  options.repetitions = 10;
  options.warmup = 1;
  const auto result = run_speedup(acc, 960, steps, options);
  REQUIRE(result.rows.size() == 9);
  for (std::size_t i = 0; i < result.rows.size(); i += 3) {
    const auto& full = result.rows[i];
    const auto& exact = result.rows[i + 1];
    CHECK(full.mode == "full");
    CHECK(exact.mode == "exact");
    CHECK(result.rows[i + 2].mode == "approximate");
    CHECK(full.mac_count * full.step == exact.mac_count * 960);
    CHECK(full.ns_per_window > 0.0);
  }
  CHECK(to_csv(result).rfind("step,window,mode,ns_per_window,mac_count\n", 0) == 0);

  const std::vector<std::size_t> single{96};
  CHECK_THROWS_AS(run_speedup(acc, 960, single, options), Error);
  options.repetitions = 3;
  CHECK_THROWS_AS(run_speedup(acc, 960, steps, options), Error);
}
