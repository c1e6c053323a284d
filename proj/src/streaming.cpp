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

#include "streaming.hpp"

#include "error.hpp"

namespace streamcnn {

const char* to_string(StreamMode mode) noexcept {
  return mode == StreamMode::Exact ? "exact" : "approximate";
}

StreamSession::StreamSession(std::shared_ptr<const ModelSpec> spec, WindowConfig cfg,
                             StreamMode mode, bool force_misaligned)
    : spec_(std::move(spec)), cfg_(cfg), mode_(mode) {
  require(spec_ != nullptr, ErrorCode::InvalidArgument, "stream session needs a model");
  spec_->validate();
  cfg_.validate();

  const auto alignment = alignment_check(cfg_, *spec_);
  aligned_ = alignment.aligned;
  if (!aligned_ && !force_misaligned) {
    fail(ErrorCode::Alignment, "step " + std::to_string(cfg_.step) + " is " + alignment.describe());
  }
  const std::size_t factor = cumulative_pool_factor(*spec_);
  require(cfg_.window_len % factor == 0, ErrorCode::Alignment,
          "window length " + std::to_string(cfg_.window_len) +
              " is not divisible by the cumulative pooling factor " + std::to_string(factor));
  embedding_len_ = cfg_.window_len / factor;

  sub_embedding_len_ = cfg_.step;
  for (std::size_t len : pool_lengths(*spec_)) {
    sub_embedding_len_ = (sub_embedding_len_ + len - 1) / len;
  }

  if (mode_ == StreamMode::Exact) {
    for (const auto& layer : spec_->feature_extractor()) {
      if (const auto* conv = std::get_if<ConvLayer>(&layer)) pad_states_.emplace_back(*conv);
    }
  }
  ring_.assign(cfg_.sub_windows(), Tensor(spec_->embedding_channels(), sub_embedding_len_));
}

Tensor StreamSession::run_sub_window(const Tensor& chunk) {
  Tensor x = chunk;
  std::size_t conv_index = 0;
  for (const auto& layer : spec_->feature_extractor()) {
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
      x = mode_ == StreamMode::Exact ? conv1d_causal(x, *conv, pad_states_[conv_index])
                                     : conv1d_causal(x, *conv);
      ++conv_index;
    } else if (const auto* p = std::get_if<PoolLayer>(&layer)) {
      x = aligned_ ? pool(x, *p) : pool_partial(x, *p);
    } else if (std::holds_alternative<ReluLayer>(layer)) {
      x = relu(std::move(x));
    } else if (const auto* bn = std::get_if<BatchNormParams>(&layer)) {
      x = batchnorm_apply(std::move(x), *bn);
    }
  }
  return x;
}

StreamOutput StreamSession::push(const Tensor& chunk) {
  require(chunk.channels() == spec_->input_channels && chunk.length() == cfg_.step,
          ErrorCode::Shape,
          "stream chunk must be [" + std::to_string(spec_->input_channels) + " x " +
              std::to_string(cfg_.step) + "], got [" + std::to_string(chunk.channels()) + " x " +
              std::to_string(chunk.length()) + "]");
  ring_[head_] = run_sub_window(chunk);
  head_ = (head_ + 1) % ring_.size();
  ++seen_;

  StreamOutput out;
  if (seen_ < ring_.size()) return out;
  out.warmup = false;
  out.embedding = aggregate();
  out.classifier_output = run_classifier(*spec_, out.embedding);
  return out;
}

std::vector<Tensor> StreamSession::ring_contents() const {
  const std::size_t stored = std::min(seen_, ring_.size());
  std::vector<Tensor> out;
  out.reserve(stored);
  // the oldest stored entry sits `stored` slots behind head_
  for (std::size_t i = 0; i < stored; ++i) {
    out.push_back(ring_[(head_ + ring_.size() - stored + i) % ring_.size()]);
  }
  return out;
}

Tensor StreamSession::aggregate() const {
  // misaligned sub-embeddings overshoot; keep the newest L/P columns
  const std::size_t total = ring_.size() * sub_embedding_len_;
  const std::size_t skip = total - embedding_len_;
  Tensor out(spec_->embedding_channels(), embedding_len_);
  for (std::size_t c = 0; c < out.channels(); ++c) {
    float* dst = out.row(c).data();
    std::size_t column = 0;
    for (std::size_t i = 0; i < ring_.size(); ++i) {
      const auto src = ring_[(head_ + i) % ring_.size()].row(c);
      for (std::size_t t = 0; t < src.size(); ++t, ++column) {
        if (column >= skip) *dst++ = src[t];
      }
    }
  }
  return out;
}

void StreamSession::reset() {
  for (auto& state : pad_states_) state.clear();
  for (auto& slot : ring_) std::fill(slot.data().begin(), slot.data().end(), 0.0f);
  head_ = 0;
  seen_ = 0;
}

MemoryFootprint StreamSession::memory_footprint() const {
  MemoryFootprint fp;
  for (const auto& state : pad_states_) fp.pad_bytes += state.buffer.size() * sizeof(float);
  fp.ring_bytes =
      ring_.size() * spec_->embedding_channels() * sub_embedding_len_ * sizeof(float);
  return fp;
}

}  // namespace streamcnn
