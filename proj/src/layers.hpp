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

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "tensor.hpp"

namespace streamcnn {

/// Causal, stride-1, same-length 1D convolution. Weights are [out][in][tap];
/// tap k reads the input (M - 1 - k) * dilation samples in the past.
struct ConvLayer {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel_size = 1;
  std::size_t dilation = 1;
  std::vector<float> weights;
  std::vector<float> bias;

  ConvLayer() = default;
  ConvLayer(std::size_t in, std::size_t out, std::size_t kernel, std::size_t dilation);

  /// Left-context samples the layer needs: (M - 1) * dilation.
  std::size_t pad_len() const noexcept { return (kernel_size - 1) * dilation; }
  float weight(std::size_t o, std::size_t i, std::size_t k) const {
    return weights[(o * in_channels + i) * kernel_size + k];
  }
  void validate() const;

  friend bool operator==(const ConvLayer&, const ConvLayer&) = default;
};

/// Most recent pad_len inputs seen by one convolution; zero at session start.
struct PadState {
  Tensor buffer;

  PadState() = default;
  explicit PadState(const ConvLayer& layer) : buffer(layer.in_channels, layer.pad_len()) {}
  void clear();
};

enum class PoolKind { Max, Average, First };

/// Non-overlapping pooling, stride == length.
struct PoolLayer {
  PoolKind kind = PoolKind::Max;
  std::size_t length = 1;

  friend bool operator==(const PoolLayer&, const PoolLayer&) = default;
};

struct ReluLayer {
  friend bool operator==(const ReluLayer&, const ReluLayer&) = default;
};

/// Inference-mode batch norm, folded to per-channel scale and shift.
struct BatchNormParams {
  std::vector<float> scale;
  std::vector<float> shift;

  static BatchNormParams identity(std::size_t channels);
  /// scale = gamma / sqrt(var + eps), shift = beta - mean * scale.
  static BatchNormParams fold(std::span<const double> gamma, std::span<const double> beta,
                              std::span<const double> mean, std::span<const double> var,
                              double eps);
  std::size_t channels() const noexcept { return scale.size(); }
  void validate() const;

  friend bool operator==(const BatchNormParams&, const BatchNormParams&) = default;
};

/// Marks the extractor/classifier boundary; flattens [C x T] channel-major.
struct FlattenLayer {
  friend bool operator==(const FlattenLayer&, const FlattenLayer&) = default;
};

struct DenseLayer {
  std::size_t in_units = 0;
  std::size_t out_units = 0;
  std::vector<float> weights;  // [out][in]
  std::vector<float> bias;

  DenseLayer() = default;
  DenseLayer(std::size_t in, std::size_t out);
  void validate() const;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

using Layer =
    std::variant<ConvLayer, ReluLayer, BatchNormParams, PoolLayer, FlattenLayer, DenseLayer>;

const char* layer_kind_name(const Layer& layer);
const char* to_string(PoolKind kind) noexcept;
PoolKind parse_pool_kind(std::string_view name);

Tensor conv1d_causal(const Tensor& input, const ConvLayer& layer);
Tensor conv1d_causal(const Tensor& input, const ConvLayer& layer, PadState& state);

/// Requires input.length() % layer.length == 0.
Tensor pool(const Tensor& input, const PoolLayer& layer);
/// Pools a trailing partial group over whatever samples it has; used only
/// by deliberately misaligned streaming.
Tensor pool_partial(const Tensor& input, const PoolLayer& layer);

Tensor relu(Tensor input);
Tensor batchnorm_apply(Tensor input, const BatchNormParams& params);
std::vector<float> dense_apply(std::span<const float> input, const DenseLayer& layer);

}  // namespace streamcnn
