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

#include <cmath>
#include <random>

#include "error.hpp"
#include "model.hpp"

namespace streamcnn {

namespace {

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& options) {
  std::uniform_int_distribution<std::size_t> idx(0, options.size() - 1);
  return options[idx(rng)];
}

void fill_uniform(std::mt19937_64& rng, std::vector<float>& values, double bound) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (float& v : values) v = float(dist(rng));
}

void append_classifier(ModelSpec& spec, std::size_t output_units) {
  spec.classifier_start = spec.layers.size();
  spec.layers.emplace_back(FlattenLayer{});
  const std::size_t factor = cumulative_pool_factor(spec);
  spec.layers.emplace_back(
      DenseLayer(spec.embedding_channels() * (spec.window_len / factor), output_units));
}

}  // namespace

void randomize_weights(ModelSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& layer : spec.layers) {
    if (auto* conv = std::get_if<ConvLayer>(&layer)) {
      fill_uniform(rng, conv->weights, std::sqrt(6.0 / double(conv->in_channels * conv->kernel_size)));
      fill_uniform(rng, conv->bias, 0.1);
    } else if (auto* bn = std::get_if<BatchNormParams>(&layer)) {
      std::uniform_real_distribution<double> scale(0.5, 1.5);
      for (float& v : bn->scale) v = float(scale(rng));
      fill_uniform(rng, bn->shift, 0.1);
    } else if (auto* dense = std::get_if<DenseLayer>(&layer)) {
      fill_uniform(rng, dense->weights, std::sqrt(6.0 / double(dense->in_units)));
      fill_uniform(rng, dense->bias, 0.1);
    }
  }
}

ModelSpec random_model(std::uint64_t seed, const RandomModelOptions& options) {
  require(options.min_depth >= 1 && options.min_depth <= options.max_depth,
          ErrorCode::InvalidArgument, "random model depth range is empty");
  require(!options.widths.empty() && !options.kernels.empty() && !options.dilations.empty(),
          ErrorCode::InvalidArgument, "random model option lists must be non-empty");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> depth_dist(
      std::max(options.min_depth, options.pool_lengths.size()), options.max_depth);
  const std::size_t depth = depth_dist(rng);
  const std::size_t pools = options.pool_lengths.size();

  ModelSpec spec;
  spec.name = "random-" + std::to_string(seed);
  spec.input_channels = options.input_channels;
  spec.sample_rate_hz = options.sample_rate_hz;
  spec.window_len = options.window_len;
  spec.step = options.step;

  std::size_t channels = options.input_channels;
  std::size_t next_pool = 0;
  for (std::size_t i = 0; i < depth; ++i) {
    ConvLayer conv(channels, pick(rng, options.widths), pick(rng, options.kernels),
                   pick(rng, options.dilations));
    channels = conv.out_channels;
    spec.layers.emplace_back(std::move(conv));
    spec.layers.emplace_back(ReluLayer{});
    // pool j closes block j of an even split of the conv stack
    while (next_pool < pools && (i + 1) * pools >= (next_pool + 1) * depth) {
      spec.layers.emplace_back(PoolLayer{PoolKind::Average, options.pool_lengths[next_pool]});
      ++next_pool;
    }
  }
  append_classifier(spec, options.output_units);
  randomize_weights(spec, seed ^ 0x9E3779B97F4A7C15ULL);
  spec.validate();
  return spec;
}

// Reconstructions of three published biomedical extractors. Channel widths
// and pool lengths are not published; widths default to 32 and the pool
// lengths are chosen to match the reported zero-padding contamination.
ModelSpec reference_model(std::string_view name, std::uint64_t seed) {
  ModelSpec spec;
  constexpr std::size_t kWidth = 32;
  if (name == "ppg") {
    // heart rate from PPG: 3 blocks of 3 dilated convs + average pooling
    spec.name = "h_ppg";
    spec.input_channels = 1;
    spec.sample_rate_hz = 32.0;
    spec.window_len = 256;
    spec.step = 64;
    std::size_t channels = spec.input_channels;
    for (std::size_t pool_len : {8, 2, 2}) {
      for (int c = 0; c < 3; ++c) {
        spec.layers.emplace_back(ConvLayer(channels, kWidth, 5, 2));
        spec.layers.emplace_back(ReluLayer{});
        channels = kWidth;
      }
      spec.layers.emplace_back(PoolLayer{PoolKind::Average, pool_len});
    }
    append_classifier(spec, 1);
  } else if (name == "eeg") {
    // seizure detection from EEG: 3 x (conv, ReLU, batch norm, max pool)
    spec.name = "h_eeg";
    spec.input_channels = 18;
    spec.sample_rate_hz = 256.0;
    spec.window_len = 1024;
    spec.step = 256;
    std::size_t channels = spec.input_channels;
    for (std::size_t pool_len : {4, 4, 2}) {
      spec.layers.emplace_back(ConvLayer(channels, kWidth, 3, 1));
      spec.layers.emplace_back(ReluLayer{});
      spec.layers.emplace_back(BatchNormParams::identity(kWidth));
      spec.layers.emplace_back(PoolLayer{PoolKind::Max, pool_len});
      channels = kWidth;
    }
    append_classifier(spec, 2);
  } else if (name == "acc") {
    // seizure detection from wrist acceleration: 6 ReLU convs + batch norm
    spec.name = "h_acc";
    spec.input_channels = 3;
    spec.sample_rate_hz = 32.0;
    spec.window_len = 960;
    spec.step = 160;
    std::size_t channels = spec.input_channels;
    for (int c = 0; c < 6; ++c) {
      spec.layers.emplace_back(ConvLayer(channels, kWidth, 3, 1));
      spec.layers.emplace_back(ReluLayer{});
      channels = kWidth;
    }
    spec.layers.emplace_back(BatchNormParams::identity(kWidth));
    append_classifier(spec, 2);
  } else {
    fail(ErrorCode::InvalidArgument,
         "unknown reference model '" + std::string(name) + "' (expected ppg, eeg or acc)");
  }
  randomize_weights(spec, seed);
  spec.validate();
  return spec;
}

}  // namespace streamcnn
