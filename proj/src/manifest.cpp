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

// Model manifest (JSON) and weight blob (raw little-endian float32).
//
// Blob layout, in manifest layer order:
//   conv       weights [out][in][tap], then bias [out]
//   batchnorm  scale [channels], then shift [channels]
//   dense      weights [out][in], then bias [out]
// Other layer kinds own no parameters.

#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "error.hpp"
#include "model.hpp"

namespace streamcnn {

using nlohmann::json;

namespace {

json layer_to_json(const Layer& layer) {
  if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
    return {{"type", "conv"},         {"kernel", conv->kernel_size},
            {"dilation", conv->dilation}, {"in_ch", conv->in_channels},
            {"out_ch", conv->out_channels}};
  }
  if (const auto* bn = std::get_if<BatchNormParams>(&layer)) {
    return {{"type", "batchnorm"}, {"channels", bn->channels()}};
  }
  if (const auto* p = std::get_if<PoolLayer>(&layer)) {
    return {{"type", "pool"}, {"kind", to_string(p->kind)}, {"len", p->length}};
  }
  if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
    return {{"type", "dense"}, {"in_units", dense->in_units}, {"out_units", dense->out_units}};
  }
  return {{"type", layer_kind_name(layer)}};
}

class BlobReader {
 public:
  explicit BlobReader(std::vector<float> values) : values_(std::move(values)) {}

  std::vector<float> take(std::size_t n, const std::string& what) {
    require(pos_ + n <= values_.size(), ErrorCode::Shape,
            "weight blob too short while reading " + what + ": need " +
                std::to_string((pos_ + n) * 4) + " bytes, have " +
                std::to_string(values_.size() * 4));
    std::vector<float> out(values_.begin() + std::ptrdiff_t(pos_),
                           values_.begin() + std::ptrdiff_t(pos_ + n));
    pos_ += n;
    return out;
  }

  void expect_consumed() const {
    require(pos_ == values_.size(), ErrorCode::Shape,
            "weight blob has " + std::to_string((values_.size() - pos_) * 4) +
                " trailing bytes beyond the declared shapes");
  }

 private:
  std::vector<float> values_;
  std::size_t pos_ = 0;
};

Layer layer_from_json(const json& j, BlobReader& blob, std::size_t index) {
  const std::string where = "layer " + std::to_string(index);
  const auto type = j.at("type").get<std::string>();
  if (type == "conv") {
    ConvLayer conv(j.at("in_ch").get<std::size_t>(), j.at("out_ch").get<std::size_t>(),
                   j.at("kernel").get<std::size_t>(), j.value("dilation", std::size_t{1}));
    require(conv.kernel_size >= 1 && conv.dilation >= 1 && conv.in_channels > 0 &&
                conv.out_channels > 0,
            ErrorCode::Schema, where + ": conv fields must be positive");
    conv.weights = blob.take(conv.weights.size(), where + " conv weights");
    conv.bias = blob.take(conv.bias.size(), where + " conv bias");
    return conv;
  }
  if (type == "relu") return ReluLayer{};
  if (type == "flatten") return FlattenLayer{};
  if (type == "batchnorm") {
    const auto channels = j.at("channels").get<std::size_t>();
    BatchNormParams bn;
    bn.scale = blob.take(channels, where + " batch-norm scale");
    bn.shift = blob.take(channels, where + " batch-norm shift");
    return bn;
  }
  if (type == "pool") {
    PoolLayer p;
    p.kind = parse_pool_kind(j.at("kind").get<std::string>());
    p.length = j.at("len").get<std::size_t>();
    if (j.contains("stride")) {
      require(j.at("stride").get<std::size_t>() == p.length, ErrorCode::Unsupported,
              where + ": overlapping pooling (stride != len) is not supported");
    }
    return p;
  }
  if (type == "dense") {
    DenseLayer dense(j.at("in_units").get<std::size_t>(), j.at("out_units").get<std::size_t>());
    dense.weights = blob.take(dense.weights.size(), where + " dense weights");
    dense.bias = blob.take(dense.bias.size(), where + " dense bias");
    return dense;
  }
  fail(ErrorCode::Unsupported, where + ": unsupported layer type '" + type + "'");
}

}  // namespace

std::vector<std::uint8_t> encode_weights(const ModelSpec& spec) {
  std::vector<std::uint8_t> bytes;
  for (const auto& layer : spec.layers) {
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
      append_f32_le(bytes, conv->weights);
      append_f32_le(bytes, conv->bias);
    } else if (const auto* bn = std::get_if<BatchNormParams>(&layer)) {
      append_f32_le(bytes, bn->scale);
      append_f32_le(bytes, bn->shift);
    } else if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
      append_f32_le(bytes, dense->weights);
      append_f32_le(bytes, dense->bias);
    }
  }
  return bytes;
}

void save_model(const ModelSpec& spec, const std::filesystem::path& manifest_path) {
  spec.validate();
  const auto blob = encode_weights(spec);
  const std::string weights_name = manifest_path.stem().string() + ".bin";
  json layers = json::array();
  for (const auto& layer : spec.layers) layers.push_back(layer_to_json(layer));
  json manifest = {{"name", spec.name},
                   {"input_channels", spec.input_channels},
                   {"sample_rate_hz", spec.sample_rate_hz},
                   {"window_len", spec.window_len},
                   {"step", spec.step},
                   {"classifier_start", spec.classifier_start},
                   {"layers", std::move(layers)},
                   {"weights_file", weights_name},
                   {"weights_sha256", sha256_hex(blob)}};
  write_file_bytes(manifest_path.parent_path() / weights_name, blob);
  write_file_text(manifest_path, manifest.dump(2) + "\n");
}

ModelSpec load_model(const std::filesystem::path& manifest_path) {
  json manifest;
  try {
    manifest = json::parse(read_file_text(manifest_path));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Schema, manifest_path.string() + ": " + e.what());
  }

  ModelSpec spec;
  try {
    spec.name = manifest.value("name", manifest_path.stem().string());
    spec.input_channels = manifest.at("input_channels").get<std::size_t>();
    spec.sample_rate_hz = manifest.value("sample_rate_hz", 1.0);
    spec.window_len = manifest.value("window_len", std::size_t{0});
    spec.step = manifest.value("step", std::size_t{0});
    const auto& layers = manifest.at("layers");
    require(layers.is_array(), ErrorCode::Schema, "'layers' must be an array");
    spec.classifier_start = manifest.value("classifier_start", layers.size());

    const auto weights_path =
        manifest_path.parent_path() / manifest.at("weights_file").get<std::string>();
    const auto bytes = read_file_bytes(weights_path);
    const auto expected_sha = manifest.value("weights_sha256", std::string{});
    if (!expected_sha.empty()) {
      require(sha256_hex(bytes) == expected_sha, ErrorCode::Schema,
              weights_path.string() + ": sha256 does not match the manifest");
    }
    require(bytes.size() % 4 == 0, ErrorCode::Shape,
            weights_path.string() + ": byte count is not a multiple of 4");
    BlobReader blob(decode_f32_le(bytes));
    for (std::size_t i = 0; i < layers.size(); ++i) {
      spec.layers.push_back(layer_from_json(layers[i], blob, i));
    }
    blob.expect_consumed();
  } catch (const json::exception& e) {
    fail(ErrorCode::Schema, manifest_path.string() + ": " + e.what());
  }
  spec.validate();
  return spec;
}

}  // namespace streamcnn
