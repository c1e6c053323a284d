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

#include <memory>
#include <optional>
#include <vector>

#include "model.hpp"

namespace streamcnn {

enum class StreamMode {
  Exact,        // per-conv signal-padding buffers
  Approximate,  // every sub-window zero padded, no buffers
};

const char* to_string(StreamMode mode) noexcept;

struct StreamOutput {
  Tensor embedding;  // aggregated, [channels x L/P]; empty during warm-up
  std::optional<std::vector<float>> classifier_output;
  bool warmup = true;
};

struct MemoryFootprint {
  std::size_t pad_bytes = 0;
  std::size_t ring_bytes = 0;
};

/// Online execution of h over consecutive S-sample chunks. Single writer:
/// push() and reset() need exclusive access; distinct sessions are independent.
class StreamSession {
 public:
  /// Throws an alignment error naming the offending pool stage unless
  /// force_misaligned is set.
  StreamSession(std::shared_ptr<const ModelSpec> spec, WindowConfig cfg, StreamMode mode,
                bool force_misaligned = false);

  StreamOutput push(const Tensor& chunk);
  void reset();

  MemoryFootprint memory_footprint() const;
  std::size_t sub_windows_seen() const noexcept { return seen_; }
  std::size_t ring_capacity() const noexcept { return ring_.size(); }
  /// Stored sub-embeddings, oldest first.
  std::vector<Tensor> ring_contents() const;

  const ModelSpec& spec() const noexcept { return *spec_; }
  const WindowConfig& config() const noexcept { return cfg_; }
  StreamMode mode() const noexcept { return mode_; }
  bool aligned() const noexcept { return aligned_; }

 private:
  Tensor run_sub_window(const Tensor& chunk);
  Tensor aggregate() const;

  std::shared_ptr<const ModelSpec> spec_;
  WindowConfig cfg_;
  StreamMode mode_;
  bool aligned_ = true;
  std::size_t embedding_len_ = 0;    // L / P
  std::size_t sub_embedding_len_ = 0;
  std::vector<PadState> pad_states_;  // one per conv in h, Exact mode only
  std::vector<Tensor> ring_;
  std::size_t head_ = 0;  // slot the next sub-embedding goes to
  std::size_t seen_ = 0;
};

}  // namespace streamcnn
