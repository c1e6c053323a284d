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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "layers.hpp"
#include "signal.hpp"
#include "tensor.hpp"

namespace streamcnn {

/// Sequential network f = g(h(x)). Layers [0, classifier_start) form the
/// feature extractor h; when a classifier exists, layers[classifier_start]
/// is a Flatten and the rest is g.
struct ModelSpec {
  std::string name;
  std::size_t input_channels = 1;
  double sample_rate_hz = 1.0;
  std::size_t window_len = 0;
  std::size_t step = 0;
  std::size_t classifier_start = 0;
  std::vector<Layer> layers;

  std::span<const Layer> feature_extractor() const {
    return std::span(layers).first(classifier_start);
  }
  std::span<const Layer> classifier() const {
    return std::span(layers).subspan(classifier_start);
  }
  bool has_classifier() const noexcept { return classifier_start < layers.size(); }

  /// Channel count of h's output.
  std::size_t embedding_channels() const;
  /// Output width of g, 0 if there is no classifier.
  std::size_t output_units() const;
  std::size_t conv_count() const;

  /// Throws on broken channel chaining or misplaced layers.
  void validate() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct InferenceResult {
  Tensor embedding;
  std::vector<float> output;
};

/// Runs h with zero padding on `input` of any pooling-aligned length.
Tensor run_feature_extractor(const ModelSpec& spec, const Tensor& input);
/// Runs g on an embedding; empty if the model has no classifier.
std::vector<float> run_classifier(const ModelSpec& spec, const Tensor& embedding);
InferenceResult full_inference(const ModelSpec& spec, const Tensor& window);

/// 1 + sum over convs in h of (M - 1) * d * (product of pool lengths before it).
std::size_t receptive_field(const ModelSpec& spec);
/// Product of every pooling length in h.
std::size_t cumulative_pool_factor(const ModelSpec& spec);
/// Pool lengths of h, in order.
std::vector<std::size_t> pool_lengths(const ModelSpec& spec);

struct MisalignedStage {
  std::size_t layer_index;
  std::size_t pool_len;
  std::size_t incoming_len;  // sub-window length reaching the stage
};

struct AlignmentResult {
  bool aligned = true;
  std::vector<MisalignedStage> stages;
  std::string describe() const;
};

AlignmentResult alignment_check(const WindowConfig& cfg, const ModelSpec& spec);

/// Context length used by the extended-window oracle: r0 - 1 rounded up to a
/// multiple of the cumulative pooling factor.
std::size_t oracle_context_len(const ModelSpec& spec);

/// Zero-padded h over [context | window] with the context's embedding columns
/// discarded: the signal-padded embedding of `window`.
Tensor extended_window_oracle(const ModelSpec& spec, const Tensor& context, const Tensor& window);

enum class MacScope { FeatureExtractor, Full };
std::uint64_t mac_count(const ModelSpec& spec, std::size_t input_len,
                        MacScope scope = MacScope::Full);

// Manifest (JSON) plus raw little-endian float32 weight blob.
ModelSpec load_model(const std::filesystem::path& manifest_path);
/// Writes the manifest and a sibling "<stem>.bin" weight blob.
void save_model(const ModelSpec& spec, const std::filesystem::path& manifest_path);
std::vector<std::uint8_t> encode_weights(const ModelSpec& spec);

struct RandomModelOptions {
  std::size_t min_depth = 3;
  std::size_t max_depth = 9;
  std::vector<std::size_t> widths{8, 16, 32};
  std::vector<std::size_t> kernels{3, 5};
  std::vector<std::size_t> dilations{1, 2};
  std::vector<std::size_t> pool_lengths;  // empty: no pooling
  std::size_t input_channels = 1;
  std::size_t window_len = 256;
  std::size_t step = 64;
  std::size_t output_units = 2;
  double sample_rate_hz = 32.0;
};

/// Seeded random sequential model: convs with ReLU, pools placed evenly
/// through the stack, Flatten + Dense classifier. He-uniform weights.
ModelSpec random_model(std::uint64_t seed, const RandomModelOptions& options = {});

/// Re-draws every parameter of `spec` from the He-uniform initializer.
void randomize_weights(ModelSpec& spec, std::uint64_t seed);

/// Reconstructed reference architectures: "ppg", "eeg" or "acc".
ModelSpec reference_model(std::string_view name, std::uint64_t seed = 0);

}  // namespace streamcnn
