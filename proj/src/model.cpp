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

#include "model.hpp"

#include <sstream>

#include "error.hpp"

namespace streamcnn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::size_t ModelSpec::embedding_channels() const {
  std::size_t channels = input_channels;
  for (const auto& layer : feature_extractor()) {
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) channels = conv->out_channels;
  }
  return channels;
}

std::size_t ModelSpec::output_units() const {
  std::size_t units = 0;
  for (const auto& layer : classifier()) {
    if (const auto* dense = std::get_if<DenseLayer>(&layer)) units = dense->out_units;
  }
  return units;
}

std::size_t ModelSpec::conv_count() const {
  std::size_t n = 0;
  for (const auto& layer : feature_extractor()) n += std::holds_alternative<ConvLayer>(layer);
  return n;
}

void ModelSpec::validate() const {
  require(input_channels > 0, ErrorCode::Schema, "model needs at least one input channel");
  require(sample_rate_hz > 0.0, ErrorCode::Schema, "model sample rate must be positive");
  require(classifier_start <= layers.size(), ErrorCode::Schema,
          "classifier_start beyond the layer list");

  std::size_t channels = input_channels;
  std::size_t pool_factor = 1;
  for (std::size_t i = 0; i < classifier_start; ++i) {
    const std::string where = "layer " + std::to_string(i) + ": ";
    std::visit(overloaded{
                   [&](const ConvLayer& conv) {
                     conv.validate();
                     require(conv.in_channels == channels, ErrorCode::Shape,
                             where + "conv expects " + std::to_string(conv.in_channels) +
                                 " channels but receives " + std::to_string(channels));
                     channels = conv.out_channels;
                   },
                   [&](const BatchNormParams& bn) {
                     bn.validate();
                     require(bn.channels() == channels, ErrorCode::Shape,
                             where + "batch-norm channel count mismatch");
                   },
                   [&](const PoolLayer& p) {
                     require(p.length >= 1, ErrorCode::Schema, where + "pool length must be >= 1");
                     pool_factor *= p.length;
                   },
                   [](const ReluLayer&) {},
                   [&](const FlattenLayer&) {
                     fail(ErrorCode::Schema, where + "flatten must sit at classifier_start");
                   },
                   [&](const DenseLayer&) {
                     fail(ErrorCode::Schema, where + "dense layer inside the feature extractor");
                   },
               },
               layers[i]);
  }

  if (!has_classifier()) return;
  require(std::holds_alternative<FlattenLayer>(layers[classifier_start]), ErrorCode::Schema,
          "layer at classifier_start must be a flatten layer");
  std::size_t units = 0;
  if (window_len > 0) {
    require(window_len % pool_factor == 0, ErrorCode::Alignment,
            "window length " + std::to_string(window_len) +
                " is not divisible by the cumulative pooling factor " +
                std::to_string(pool_factor));
    units = channels * (window_len / pool_factor);
  }
  for (std::size_t i = classifier_start + 1; i < layers.size(); ++i) {
    const std::string where = "layer " + std::to_string(i) + ": ";
    if (const auto* dense = std::get_if<DenseLayer>(&layers[i])) {
      dense->validate();
      require(units == 0 || dense->in_units == units, ErrorCode::Shape,
              where + "dense expects " + std::to_string(dense->in_units) +
                  " inputs but receives " + std::to_string(units));
      units = dense->out_units;
    } else {
      require(std::holds_alternative<ReluLayer>(layers[i]), ErrorCode::Schema,
              where + std::string(layer_kind_name(layers[i])) +
                  " is not allowed in the classifier");
    }
  }
}

Tensor run_feature_extractor(const ModelSpec& spec, const Tensor& input) {
  require(input.channels() == spec.input_channels, ErrorCode::Shape,
          "model expects " + std::to_string(spec.input_channels) + " input channels, got " +
              std::to_string(input.channels()));
  Tensor x = input;
  for (const auto& layer : spec.feature_extractor()) {
    x = std::visit(overloaded{
                       [&](const ConvLayer& conv) { return conv1d_causal(x, conv); },
                       [&](const ReluLayer&) { return relu(std::move(x)); },
                       [&](const BatchNormParams& bn) { return batchnorm_apply(std::move(x), bn); },
                       [&](const PoolLayer& p) { return pool(x, p); },
                       [&](const auto&) -> Tensor {
                         fail(ErrorCode::Unsupported, "classifier layer inside h");
                       },
                   },
                   layer);
  }
  return x;
}

std::vector<float> run_classifier(const ModelSpec& spec, const Tensor& embedding) {
  if (!spec.has_classifier()) return {};
  std::vector<float> x = embedding.values();
  for (const auto& layer : spec.classifier().subspan(1)) {
    if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
      x = dense_apply(x, *dense);
    } else if (std::holds_alternative<ReluLayer>(layer)) {
      for (float& v : x) v = std::max(v, 0.0f);
    } else {
      fail(ErrorCode::Unsupported,
           std::string(layer_kind_name(layer)) + " is not supported in the classifier");
    }
  }
  return x;
}

InferenceResult full_inference(const ModelSpec& spec, const Tensor& window) {
  InferenceResult result;
  result.embedding = run_feature_extractor(spec, window);
  result.output = run_classifier(spec, result.embedding);
  return result;
}

std::size_t receptive_field(const ModelSpec& spec) {
  std::size_t field = 1;
  std::size_t factor = 1;
  for (const auto& layer : spec.feature_extractor()) {
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
      field += conv->pad_len() * factor;
    } else if (const auto* p = std::get_if<PoolLayer>(&layer)) {
      factor *= p->length;
    }
  }
  return field;
}

std::vector<std::size_t> pool_lengths(const ModelSpec& spec) {
  std::vector<std::size_t> out;
  for (const auto& layer : spec.feature_extractor()) {
    if (const auto* p = std::get_if<PoolLayer>(&layer)) out.push_back(p->length);
  }
  return out;
}

std::size_t cumulative_pool_factor(const ModelSpec& spec) {
  std::size_t factor = 1;
  for (std::size_t len : pool_lengths(spec)) factor *= len;
  return factor;
}

std::string AlignmentResult::describe() const {
  if (aligned) return "aligned";
  std::ostringstream ss;
  ss << "misaligned:";
  for (const auto& s : stages) {
    ss << " pool at layer " << s.layer_index << " (L_p=" << s.pool_len << ") receives "
       << s.incoming_len << " samples per sub-window;";
  }
  return ss.str();
}

AlignmentResult alignment_check(const WindowConfig& cfg, const ModelSpec& spec) {
  AlignmentResult result;
  std::size_t incoming = cfg.step;
  const auto h = spec.feature_extractor();
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto* p = std::get_if<PoolLayer>(&h[i]);
    if (!p) continue;
    if (incoming % p->length != 0) {
      result.aligned = false;
      result.stages.push_back({i, p->length, incoming});
    }
    incoming = (incoming + p->length - 1) / p->length;
  }
  return result;
}

std::size_t oracle_context_len(const ModelSpec& spec) {
  const std::size_t p = cumulative_pool_factor(spec);
  const std::size_t need = receptive_field(spec) - 1;
  return (need + p - 1) / p * p;
}

Tensor extended_window_oracle(const ModelSpec& spec, const Tensor& context, const Tensor& window) {
  const std::size_t p = cumulative_pool_factor(spec);
  const std::size_t r0 = receptive_field(spec);
  require(context.length() + 1 >= r0, ErrorCode::InvalidArgument,
          "oracle context of " + std::to_string(context.length()) +
              " samples is shorter than receptive field - 1 = " + std::to_string(r0 - 1));
  require(context.length() % p == 0, ErrorCode::Alignment,
          "oracle context length must be a multiple of the pooling factor " + std::to_string(p));
  const Tensor embedding = run_feature_extractor(spec, concat_time(context, window));
  const std::size_t skip = context.length() / p;
  return embedding.slice(skip, embedding.length() - skip);
}

std::uint64_t mac_count(const ModelSpec& spec, std::size_t input_len, MacScope scope) {
  const std::size_t p = cumulative_pool_factor(spec);
  require(input_len % p == 0, ErrorCode::Alignment,
          "input length " + std::to_string(input_len) + " not aligned to pooling factor " +
              std::to_string(p));
  std::uint64_t macs = 0;
  std::uint64_t len = input_len;
  for (const auto& layer : spec.feature_extractor()) {
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
      macs += std::uint64_t(conv->out_channels) * conv->in_channels * conv->kernel_size * len;
    } else if (const auto* pl = std::get_if<PoolLayer>(&layer)) {
      len /= pl->length;
    }
  }
  if (scope == MacScope::Full) {
    for (const auto& layer : spec.classifier()) {
      if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
        macs += std::uint64_t(dense->in_units) * dense->out_units;
      }
    }
  }
  return macs;
}

}  // namespace streamcnn
