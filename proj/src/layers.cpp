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

#include "layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace streamcnn {

ConvLayer::ConvLayer(std::size_t in, std::size_t out, std::size_t kernel, std::size_t dil)
    : in_channels(in),
      out_channels(out),
      kernel_size(kernel),
      dilation(dil),
      weights(in * out * kernel, 0.0f),
      bias(out, 0.0f) {}

void ConvLayer::validate() const {
  require(in_channels > 0 && out_channels > 0, ErrorCode::Shape, "conv needs channels");
  require(kernel_size >= 1 && dilation >= 1, ErrorCode::InvalidArgument,
          "conv kernel size and dilation must be >= 1");
  require(weights.size() == in_channels * out_channels * kernel_size, ErrorCode::Shape,
          "conv weight count does not match [out][in][tap]");
  require(bias.size() == out_channels, ErrorCode::Shape, "conv bias count mismatch");
}

void PadState::clear() { std::fill(buffer.data().begin(), buffer.data().end(), 0.0f); }

BatchNormParams BatchNormParams::identity(std::size_t channels) {
  return {std::vector<float>(channels, 1.0f), std::vector<float>(channels, 0.0f)};
}

BatchNormParams BatchNormParams::fold(std::span<const double> gamma, std::span<const double> beta,
                                      std::span<const double> mean, std::span<const double> var,
                                      double eps) {
  const std::size_t n = gamma.size();
  require(beta.size() == n && mean.size() == n && var.size() == n, ErrorCode::Shape,
          "batch-norm statistics have different lengths");
  BatchNormParams out;
  out.scale.resize(n);
  out.shift.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    require(var[c] + eps > 0.0, ErrorCode::DivisionByZero, "batch-norm variance + eps <= 0");
    const double s = gamma[c] / std::sqrt(var[c] + eps);
    out.scale[c] = float(s);
    out.shift[c] = float(beta[c] - mean[c] * s);
  }
  return out;
}

void BatchNormParams::validate() const {
  require(!scale.empty() && scale.size() == shift.size(), ErrorCode::Shape,
          "batch-norm scale/shift length mismatch");
  for (std::size_t c = 0; c < scale.size(); ++c) {
    require(std::isfinite(scale[c]) && std::isfinite(shift[c]), ErrorCode::InvalidArgument,
            "batch-norm parameters must be finite");
  }
}

DenseLayer::DenseLayer(std::size_t in, std::size_t out)
    : in_units(in), out_units(out), weights(in * out, 0.0f), bias(out, 0.0f) {}

void DenseLayer::validate() const {
  require(in_units > 0 && out_units > 0, ErrorCode::Shape, "dense layer needs units");
  require(weights.size() == in_units * out_units && bias.size() == out_units, ErrorCode::Shape,
          "dense parameter shapes inconsistent");
}

const char* layer_kind_name(const Layer& layer) {
  static constexpr const char* kNames[] = {"conv", "relu", "batchnorm", "pool", "flatten", "dense"};
  return kNames[layer.index()];
}

const char* to_string(PoolKind kind) noexcept {
  switch (kind) {
    case PoolKind::Max: return "max";
    case PoolKind::Average: return "avg";
    case PoolKind::First: return "first";
  }
  return "?";
}

PoolKind parse_pool_kind(std::string_view name) {
  if (name == "max") return PoolKind::Max;
  if (name == "avg" || name == "average") return PoolKind::Average;
  if (name == "first") return PoolKind::First;
  fail(ErrorCode::InvalidArgument, "unknown pooling kind '" + std::string(name) + "'");
}

namespace {

// Accumulates one output channel over an input whose column `offset` is the
// first real sample; taps that would land before column 0 are skipped, which
// is exactly zero padding when offset == 0.
void conv_accumulate(const Tensor& input, std::size_t offset, const ConvLayer& layer,
                     std::size_t o, std::span<double> acc) {
  const std::size_t out_len = acc.size();
  const std::size_t m = layer.kernel_size;
  std::fill(acc.begin(), acc.end(), double(layer.bias[o]));
  for (std::size_t i = 0; i < layer.in_channels; ++i) {
    const float* x = input.row(i).data();
    for (std::size_t k = 0; k < m; ++k) {
      const double w = layer.weight(o, i, k);
      const std::size_t back = (m - 1 - k) * layer.dilation;
      // output t reads input column offset + t - back
      std::size_t t0 = back > offset ? back - offset : 0;
      const float* src = x + offset + t0 - back;
      for (std::size_t t = t0; t < out_len; ++t) acc[t] += w * double(*src++);
    }
  }
}

void check_conv_input(const Tensor& input, const ConvLayer& layer) {
  require(input.channels() == layer.in_channels, ErrorCode::Shape,
          "conv expects " + std::to_string(layer.in_channels) + " input channels, got " +
              std::to_string(input.channels()));
}

}  // namespace

Tensor conv1d_causal(const Tensor& input, const ConvLayer& layer) {
  check_conv_input(input, layer);
  const std::size_t len = input.length();
  Tensor out(layer.out_channels, len);
  std::vector<double> acc(len);
  for (std::size_t o = 0; o < layer.out_channels; ++o) {
    conv_accumulate(input, 0, layer, o, acc);
    std::copy(acc.begin(), acc.end(), out.row(o).begin());
  }
  return out;
}

Tensor conv1d_causal(const Tensor& input, const ConvLayer& layer, PadState& state) {
  check_conv_input(input, layer);
  const std::size_t pad = layer.pad_len();
  require(state.buffer.channels() == layer.in_channels && state.buffer.length() == pad,
          ErrorCode::State,
          "pad state is [" + std::to_string(state.buffer.channels()) + " x " +
              std::to_string(state.buffer.length()) + "], layer needs [" +
              std::to_string(layer.in_channels) + " x " + std::to_string(pad) + "]");
  if (pad == 0) return conv1d_causal(input, layer);

  const Tensor extended = concat_time(state.buffer, input);
  const std::size_t len = input.length();
  Tensor out(layer.out_channels, len);
  std::vector<double> acc(len);
  for (std::size_t o = 0; o < layer.out_channels; ++o) {
    conv_accumulate(extended, pad, layer, o, acc);
    std::copy(acc.begin(), acc.end(), out.row(o).begin());
  }
  state.buffer = extended.slice(extended.length() - pad, pad);
  return out;
}

namespace {

float pool_group(std::span<const float> group, PoolKind kind) {
  switch (kind) {
    case PoolKind::Max: return *std::max_element(group.begin(), group.end());
    case PoolKind::First: return group.front();
    case PoolKind::Average: {
      double sum = 0.0;
      for (float v : group) sum += v;
      return float(sum / double(group.size()));
    }
  }
  return 0.0f;
}

Tensor pool_impl(const Tensor& input, const PoolLayer& layer, std::size_t groups) {
  Tensor out(input.channels(), groups);
  for (std::size_t c = 0; c < input.channels(); ++c) {
    auto row = input.row(c);
    for (std::size_t g = 0; g < groups; ++g) {
      const std::size_t begin = g * layer.length;
      const std::size_t count = std::min(layer.length, row.size() - begin);
      out(c, g) = pool_group(row.subspan(begin, count), layer.kind);
    }
  }
  return out;
}

}  // namespace

Tensor pool(const Tensor& input, const PoolLayer& layer) {
  require(layer.length >= 1, ErrorCode::InvalidArgument, "pool length must be >= 1");
  require(input.length() % layer.length == 0, ErrorCode::Alignment,
          "pool length " + std::to_string(layer.length) + " does not divide input length " +
              std::to_string(input.length()));
  return pool_impl(input, layer, input.length() / layer.length);
}

Tensor pool_partial(const Tensor& input, const PoolLayer& layer) {
  require(layer.length >= 1, ErrorCode::InvalidArgument, "pool length must be >= 1");
  return pool_impl(input, layer, (input.length() + layer.length - 1) / layer.length);
}

Tensor relu(Tensor input) {
  for (float& v : input.data()) v = std::max(v, 0.0f);
  return input;
}

Tensor batchnorm_apply(Tensor input, const BatchNormParams& params) {
  require(input.channels() == params.channels(), ErrorCode::Shape,
          "batch-norm expects " + std::to_string(params.channels()) + " channels, got " +
              std::to_string(input.channels()));
  for (std::size_t c = 0; c < input.channels(); ++c) {
    const float s = params.scale[c], b = params.shift[c];
    for (float& v : input.row(c)) v = s * v + b;
  }
  return input;
}

std::vector<float> dense_apply(std::span<const float> input, const DenseLayer& layer) {
  require(input.size() == layer.in_units, ErrorCode::Shape,
          "dense expects " + std::to_string(layer.in_units) + " inputs, got " +
              std::to_string(input.size()));
  std::vector<float> out(layer.out_units);
  for (std::size_t o = 0; o < layer.out_units; ++o) {
    const float* w = layer.weights.data() + o * layer.in_units;
    double acc = layer.bias[o];
    for (std::size_t i = 0; i < layer.in_units; ++i) acc += double(w[i]) * double(input[i]);
    out[o] = float(acc);
  }
  return out;
}

}  // namespace streamcnn
