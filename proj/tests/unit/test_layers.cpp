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

#include "error.hpp"
#include "layers.hpp"
#include "test_support.hpp"

using namespace streamcnn;

TEST_CASE("causal conv hand case") {
  // taps [1, 2, 3]: y[t] = 1*x[t-2] + 2*x[t-1] + 3*x[t]
  ConvLayer conv(1, 1, 3, 1);
  conv.weights = {1, 2, 3};
  conv.bias = {0};
  const Tensor y = conv1d_causal(Tensor(1, 4, std::vector<float>{1, 2, 3, 4}), conv);
  CHECK(y.values() == std::vector<float>{3, 8, 14, 20});
}

TEST_CASE("dilated conv hand case") {
  // M = 2, d = 3: y[t] = w0*x[t-3] + w1*x[t]
  ConvLayer conv(1, 1, 2, 3);
  conv.weights = {10, 1};
  conv.bias = {0.5f};
  const Tensor y = conv1d_causal(Tensor(1, 5, std::vector<float>{1, 2, 3, 4, 5}), conv);
  CHECK(y.values() == std::vector<float>{1.5f, 2.5f, 3.5f, 14.5f, 25.5f});
}

TEST_CASE("conv matches the naive zero-padded oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t in = 1 + rng() % 4, out = 1 + rng() % 4;
    const std::size_t m = 1 + rng() % 5, d = 1 + rng() % 3, len = 8 + rng() % 40;
    const ConvLayer conv = testing::random_conv(in, out, m, d, rng);
    const Tensor x = testing::random_tensor(in, len, rng);
    const Tensor y = conv1d_causal(x, conv);
    CHECK(testing::max_abs_diff(testing::naive_conv(testing::to_grid(x), conv), y) < 1e-6);
  }
}

TEST_CASE("moving-average conv on ones contaminates exactly pad_len leading outputs") {
  ConvLayer conv(2, 3, 5, 2);
  std::fill(conv.weights.begin(), conv.weights.end(), 1.0f / 10.0f);
  const Tensor y = conv1d_causal(Tensor(2, 32, 1.0f), conv);
  for (std::size_t t = 0; t < 32; ++t) {
    if (t < conv.pad_len()) {
      CHECK(y(0, t) < 1.0f - 1e-6f);
    } else {
      CHECK(y(0, t) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("chunked signal-padded conv equals whole-sequence conv") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t in = 1 + rng() % 3, out = 1 + rng() % 3;
    const std::size_t m = 1 + rng() % 5, d = 1 + rng() % 3;
    const std::size_t chunk = 1 + rng() % 9, chunks = 2 + rng() % 6;
    const ConvLayer conv = testing::random_conv(in, out, m, d, rng);
    const Tensor x = testing::random_tensor(in, chunk * chunks, rng);
    PadState state(conv);
    std::vector<Tensor> parts;
    for (std::size_t i = 0; i < chunks; ++i) {
      parts.push_back(conv1d_causal(x.slice(i * chunk, chunk), conv, state));
    }
    // same accumulation order and zero initial state: bit-identical
    CHECK(concat_time(parts) == conv1d_causal(x, conv));
  }
}

TEST_CASE("conv shape and state errors") {
  ConvLayer conv(2, 1, 3, 1);
  CHECK_THROWS_AS(conv1d_causal(Tensor(3, 4), conv), Error);
  PadState wrong(ConvLayer(2, 1, 5, 1));
  try {
    conv1d_causal(Tensor(2, 4), conv, wrong);
    FAIL("expected a state error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::State);
  }
  PadState state(conv);
  conv1d_causal(Tensor(2, 4, 1.0f), conv, state);
  CHECK(state.buffer == Tensor(2, 2, 1.0f));
  state.clear();
  CHECK(state.buffer == Tensor(2, 2, 0.0f));
}

TEST_CASE("pooling examples") {
  const Tensor seq(1, 6, std::vector<float>{1, 2, 3, 4, 5, 6});
  CHECK(pool(seq, {PoolKind::Max, 2}).values() == std::vector<float>{2, 4, 6});
  CHECK(pool(Tensor(1, 6, std::vector<float>{3, 3, 3, 6, 6, 6}), {PoolKind::Average, 3}).values() ==
        std::vector<float>{3, 6});
  CHECK(pool(Tensor(1, 4, std::vector<float>{7, 9, 1, 5}), {PoolKind::First, 2}).values() ==
        std::vector<float>{7, 1});
  CHECK(pool(seq, {PoolKind::Max, 1}) == seq);
}

TEST_CASE("pooling refuses to truncate") {
  try {
    pool(Tensor(1, 5), {PoolKind::Max, 2});
    FAIL("expected an alignment error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Alignment);
  }
  const Tensor partial = pool_partial(Tensor(1, 5, std::vector<float>{1, 2, 3, 4, 5}),
                                      {PoolKind::Average, 2});
  CHECK(partial.values() == std::vector<float>{1.5f, 3.5f, 5.0f});
}

TEST_CASE("relu and batch norm") {
  CHECK(relu(Tensor(1, 3, std::vector<float>{-1, 0, 2})).values() == std::vector<float>{0, 0, 2});
  BatchNormParams bn{{2.0f}, {1.0f}};
  CHECK(batchnorm_apply(Tensor(1, 1, 3.0f), bn).values() == std::vector<float>{7.0f});
  const Tensor x(2, 3, std::vector<float>{1, -2, 3, 4, 5, -6});
  CHECK(batchnorm_apply(x, BatchNormParams::identity(2)) == x);
  CHECK_THROWS_AS(batchnorm_apply(x, BatchNormParams::identity(3)), Error);
}

TEST_CASE("batch norm folding") {
  const double one[] = {1.0}, zero[] = {0.0};
  const auto identity = BatchNormParams::fold(one, zero, zero, one, 0.0);
  CHECK(identity.scale[0] == 1.0f);
  CHECK(identity.shift[0] == 0.0f);
  // gamma 2, beta 1, mean 0.5, var 3, eps 1: scale = 2 / 2 = 1, shift = 1 - 0.5
  const double gamma[] = {2.0}, beta[] = {1.0}, mean[] = {0.5}, var[] = {3.0};
  const auto folded = BatchNormParams::fold(gamma, beta, mean, var, 1.0);
  CHECK(folded.scale[0] == doctest::Approx(1.0));
  CHECK(folded.shift[0] == doctest::Approx(0.5));
}

TEST_CASE("dense examples") {
  DenseLayer dense(2, 2);
  dense.weights = {1, 2, 3, 4};
  dense.bias = {0, 0};
  const std::vector<float> ones{1, 1};
  CHECK(dense_apply(ones, dense) == std::vector<float>{3, 7});
  DenseLayer zero(2, 2);
  zero.bias = {5, -5};
  CHECK(dense_apply(ones, zero) == std::vector<float>{5, -5});
  const std::vector<float> three{1, 2, 3};
  CHECK_THROWS_AS(dense_apply(three, dense), Error);
}

TEST_CASE("pool kind names") {
  CHECK(parse_pool_kind("max") == PoolKind::Max);
  CHECK(parse_pool_kind("avg") == PoolKind::Average);
  CHECK(parse_pool_kind("first") == PoolKind::First);
  CHECK(std::string(to_string(PoolKind::Average)) == "avg");
  CHECK_THROWS_AS(parse_pool_kind("median"), Error);
}
