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

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "analysis.hpp"
#include "error.hpp"
#include "test_support.hpp"

using namespace streamcnn;

namespace {

constexpr double kPi = std::numbers::pi;

// Pools both windows from scratch and compares the shifted overlap.
ShiftError brute_force_shift_error(const Signal& s, const PoolLayer& p, std::size_t n,
                                   const std::vector<std::size_t>& steps) {
  double amplitude = 0.0;
  for (float v : s.samples().data()) amplitude = std::max(amplitude, std::abs(double(v)));
  ShiftError worst;
  for (std::size_t c = 0; c < s.channels(); ++c) {
    const auto row = testing::to_grid(s.samples())[c];
    for (std::size_t step : steps) {
      const testing::Grid a{{row.begin(), row.begin() + std::ptrdiff_t(n)}};
      const testing::Grid b{{row.begin() + std::ptrdiff_t(step),
                             row.begin() + std::ptrdiff_t(step + n)}};
      const auto pa = testing::naive_pool(a, p)[0];
      const auto pb = testing::naive_pool(b, p)[0];
      const std::size_t shift = step / p.length;
      double sum = 0.0, peak = 0.0;
      for (std::size_t j = 0; j + shift < pa.size(); ++j) {
        const double d = std::abs(pa[j + shift] - pb[j]);
        sum += d;
        peak = std::max(peak, d);
      }
      worst.mean_rel = std::max(worst.mean_rel, sum / double(pa.size() - shift) / amplitude);
      worst.max_rel = std::max(worst.max_rel, peak / amplitude);
    }
  }
  return worst;
}

Signal mono(double f0, double fs, double seconds) {
  SyntheticSpec spec;
  spec.base_freq_hz = f0;
  spec.duration_s = seconds;
  return gen_signal(spec, fs);
}

ModelSpec extractor(std::size_t channels, std::vector<Layer> h, std::size_t window = 256,
                    std::size_t step = 64) {
  ModelSpec spec;
  spec.input_channels = channels;
  spec.sample_rate_hz = 32.0;
  spec.window_len = window;
  spec.step = step;
  spec.layers = std::move(h);
  spec.classifier_start = spec.layers.size();
  return spec;
}

}  // namespace

TEST_CASE("consecutive sample bound") {
  CHECK(consecutive_sample_bound({1.0, 0.0, 256.0, 2}) == 0.0);
  CHECK(consecutive_sample_bound({1.0, 4.0, 256.0, 2}) ==
        doctest::Approx(0.09817477042468103).epsilon(1e-12));
  CHECK(consecutive_sample_bound({1.0, 0.4 * 256.0, 256.0, 2}) == 2.0);
  CHECK(consecutive_sample_bound({3.0, 0.4 * 256.0, 256.0, 2}) == 6.0);
  CHECK_THROWS_AS(consecutive_sample_bound({1.0, 128.0, 256.0, 2}), Error);
  CHECK_THROWS_AS(consecutive_sample_bound({1.0, 1.0, 0.0, 2}), Error);
  CHECK_THROWS_AS(consecutive_sample_bound({-1.0, 1.0, 256.0, 2}), Error);
}

TEST_CASE("pooling error bound") {
  CHECK(pooling_error_bound({1.0, 10.0, 256.0, 1}) == 0.0);
  CHECK(pooling_error_bound({1.0, 1.0, 256.0, 4}) ==
        doctest::Approx(3.0 * 2.0 * kPi / 256.0).epsilon(1e-12));
  // saturated: 2A(L_p - 1), relative form capped at 2
  CHECK(pooling_error_bound({0.5, 100.0, 256.0, 5}) == doctest::Approx(2.0 * 0.5 * 4.0));
  CHECK(relative_pooling_bound({0.5, 100.0, 256.0, 5}) == 2.0);
  CHECK(relative_pooling_bound({1.0, 1.0, 256.0, 2}) == doctest::Approx(2.0 * kPi / 256.0));
  // the unsaturated expression grows with L_p; the relative bound never passes 2
  double previous = 0.0;
  for (std::size_t lp = 1; lp <= 1 << 16; lp *= 2) {
    const double b = relative_pooling_bound({1.0, 1.0, 256.0, lp});
    CHECK(b >= previous);
    CHECK(b <= 2.0);
    previous = b;
  }
}

TEST_CASE("empirical shift error matches the brute-force oracle") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t lp = 1 + rng() % 6;
    const std::size_t n = lp * (2 + rng() % 10);
    const Signal s(testing::random_tensor(1 + trial % 2, 2 * n, rng), 64.0);
    const PoolLayer p{PoolKind(trial % 3), lp};
    std::vector<std::size_t> steps;
    for (std::size_t st = 1; st < n; ++st) steps.push_back(st);
    const auto got = empirical_pool_shift_error(s, p, n, steps);
    const auto want = brute_force_shift_error(s, p, n, steps);
    CHECK(got.mean_rel == doctest::Approx(want.mean_rel).epsilon(1e-9));
    CHECK(got.max_rel == doctest::Approx(want.max_rel).epsilon(1e-9));
  }
}

TEST_CASE("empirical shift error special cases") {
  const Signal constant(Tensor(1, 64, 0.7f), 32.0);
  const std::vector<std::size_t> all{1, 2, 3, 5, 7, 11};
  for (PoolKind k : {PoolKind::Max, PoolKind::Average, PoolKind::First}) {
    const auto e = empirical_pool_shift_error(constant, {k, 4}, 32, all);
    CHECK(e.mean_rel == 0.0);
    CHECK(e.max_rel == 0.0);
  }
  const Signal s = mono(1.0, 32.0, 4.0);
  const std::vector<std::size_t> aligned{4, 8, 12, 16};
  for (PoolKind k : {PoolKind::Max, PoolKind::Average, PoolKind::First}) {
    CHECK(empirical_pool_shift_error(s, {k, 4}, 32, aligned).max_rel == 0.0);
  }
  const std::vector<std::size_t> too_far{40};
  CHECK_THROWS_AS(empirical_pool_shift_error(s, {PoolKind::Max, 4}, 32, too_far), Error);
  CHECK_THROWS_AS(empirical_pool_shift_error(s, {PoolKind::Max, 3}, 32, aligned), Error);
}

TEST_CASE("mono L_p = 2 sweep over odd steps is near the bound") {
  const Signal s = mono(1.0, 256.0, 16.0);
  std::vector<std::size_t> odd;
  for (std::size_t st = 1; st < 2048; st += 2) odd.push_back(st);
  const double bound = relative_pooling_bound({1.0, 1.0, 256.0, 2});
  const auto e = empirical_pool_shift_error(s, {PoolKind::First, 2}, 2048, odd);
  CHECK(e.max_rel <= bound + 1e-9);
  CHECK(e.max_rel >= 0.9 * bound);
}

TEST_CASE("sweeps") {
  SyntheticSpec multi;
  multi.kind = SyntheticKind::Multi;
  const std::vector<double> fs{32, 64, 128};
  const auto by_fs = sweep_fs(multi, fs, 1.0, PoolKind::Average);
  REQUIRE(by_fs.rows.size() == 3);
  for (const auto& r : by_fs.rows) {
    CHECK(r.mean_rel <= r.max_rel);
    CHECK(r.max_rel <= r.bound_rel + 1e-9);
  }
  CHECK(by_fs.rows[1].param == 64.0);

  const std::vector<std::size_t> lps{2, 4, 8, 16};
  const auto by_lp = sweep_pool_len(SyntheticSpec{}, lps, 256.0, PoolKind::Max);
  for (std::size_t i = 0; i < by_lp.rows.size(); ++i) {
    const auto& r = by_lp.rows[i];
    CHECK(r.max_rel <= r.bound_rel + 1e-9);
    CHECK(r.max_rel <= 2.0);
    if (i > 0) CHECK(r.bound_rel >= by_lp.rows[i - 1].bound_rel);
  }
  CHECK(by_lp.rows[0].bound_rel == doctest::Approx(2.0 * kPi / 256.0));

  const std::string csv = to_csv(by_lp);
  CHECK(csv.rfind("param,mean_rel,max_rel,bound\n", 0) == 0);
  const auto j = nlohmann::json::parse(to_json(by_lp));
  CHECK(j["rows"].size() == 4);
  CHECK(j["param_name"] == "L_p");

  // Nyquist violation propagates
  const std::vector<double> low{8};
  CHECK_THROWS_AS(sweep_fs(multi, low, 1.0, PoolKind::Max), Error);
}

TEST_CASE("probe examples") {
  SUBCASE("single conv M=5 d=2 on 256 samples") {
    const auto r = zero_padding_probe(extractor(1, {ConvLayer(1, 1, 5, 2)}));
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].affected == 8);
    CHECK(r.rows[0].total == 256);
    CHECK(r.final_fraction() == doctest::Approx(8.0 / 256.0));
  }
  SUBCASE("reconstructed acc model") {
    const auto r = zero_padding_probe(reference_model("acc"));
    REQUIRE(r.rows.size() == 6);
    CHECK(r.rows.back().affected == 12);
    CHECK(r.rows.back().total == 960);
    CHECK(r.final_fraction() == doctest::Approx(0.0125));
  }
  SUBCASE("dense inside h is rejected") {
    try {
      zero_padding_probe(extractor(4, {DenseLayer(4, 4)}));
      FAIL("expected an unsupported error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Unsupported);
    }
  }
  SUBCASE("average pooling of contaminated points stays contaminated") {
    const auto r = zero_padding_probe(
        extractor(1, {ConvLayer(1, 1, 3, 1), PoolLayer{PoolKind::Average, 4}}, 64));
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[1].kind == "pool");
    CHECK(r.rows[1].affected == 1);
    CHECK(r.rows[1].total == 16);
  }
}

TEST_CASE("probe count equals the analytic contamination on pooling-free stacks") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Layer> h;
    std::size_t ch = 1 + rng() % 3, analytic = 0;
    const std::size_t in = ch;
    std::vector<std::size_t> expected;
    for (std::size_t k = 0, depth = 1 + rng() % 8; k < depth; ++k) {
      const std::size_t out = 1 + rng() % 4, m = 1 + rng() % 5, d = 1 + rng() % 3;
      h.emplace_back(testing::random_conv(ch, out, m, d, rng));
      h.emplace_back(ReluLayer{});
      analytic += (m - 1) * d;
      expected.push_back(analytic);
      ch = out;
    }
    const auto r = zero_padding_probe(extractor(in, std::move(h), 512));
    REQUIRE(r.rows.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(r.rows[i].affected == expected[i]);
      if (i > 0) CHECK(r.rows[i].fraction >= r.rows[i - 1].fraction);
    }
  }
}

TEST_CASE("probe agrees with all-ones inference through moving-average convs") {
  std::vector<Layer> h;
  for (std::size_t m : {3, 5, 2}) {
    ConvLayer conv(2, 2, m, 2);
    std::fill(conv.weights.begin(), conv.weights.end(), float(1.0 / double(2 * m)));
    h.emplace_back(std::move(conv));
  }
  const ModelSpec spec = extractor(2, h, 64);
  const Tensor y = run_feature_extractor(spec, Tensor(2, 64, 1.0f));
  const auto r = zero_padding_probe(spec);
  std::size_t below = 0;
  for (std::size_t t = 0; t < y.length(); ++t) {
    CHECK(y(0, t) <= 1.0f + 1e-6f);
    below += y(0, t) < 1.0f - 1e-6f;
  }
  CHECK(below == r.rows.back().affected);
}

TEST_CASE("shiftability report") {
  const ModelSpec acc = reference_model("acc");
  const auto a = shiftability_report(acc, {960, 160});
  CHECK(a.recommendation == Recommendation::ApproximateStreaming);
  CHECK(a.final_fraction == doctest::Approx(0.0125));
  CHECK_FALSE(a.alignment_blocking);

  const ModelSpec ppg = reference_model("ppg");
  CHECK(shiftability_report(ppg, {256, 64}).recommendation ==
        Recommendation::RetrainSignalPadding);

  const auto mis = shiftability_report(ppg, {256, 16});
  CHECK(mis.alignment_blocking);
  CHECK_FALSE(mis.alignment.aligned);

  // three pools, effective rates 32, 4 and 2 Hz after pooling 8 and 2
  const auto stages = shiftability_report(ppg, {256, 64}, 1.0).stages;
  REQUIRE(stages.size() == 3);
  CHECK(stages[0].effective_fs_hz == 32.0);
  CHECK(stages[1].effective_fs_hz == 4.0);
  CHECK(stages[2].effective_fs_hz == 2.0);
  CHECK(stages[0].bound_rel == doctest::Approx(7.0 * 2.0 * kPi * 1.0 / 32.0));
  for (const auto& st : stages) CHECK(st.f_max_hz < st.effective_fs_hz / 2.0);

  const auto j = nlohmann::json::parse(a.to_json());
  CHECK(j["recommendation"] == "approximate_streaming");

  // 10% contamination falls between the two thresholds
  const auto r = zero_padding_probe(extractor(1, {ConvLayer(1, 1, 11, 1)}, 100, 20));
  CHECK(r.final_fraction() == doctest::Approx(0.1));
  CHECK(shiftability_report(extractor(1, {ConvLayer(1, 1, 11, 1)}, 100, 20), {100, 20})
            .recommendation == Recommendation::ExactStreaming);
}

TEST_CASE("probe counts contamination too small for a float threshold") {
  // ten M=7 layers: the last contaminated point deviates from 1 by 7^-10
  std::vector<Layer> h;
  for (int i = 0; i < 10; ++i) h.emplace_back(ConvLayer(1, 1, 7, 1));
  const auto r = zero_padding_probe(extractor(1, std::move(h), 128));
  CHECK(r.rows.back().affected == 60);
}
