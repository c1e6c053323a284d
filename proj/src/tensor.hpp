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
#include <vector>

namespace streamcnn {

/// Dense [channels x length] activation block, row-major by channel.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t channels, std::size_t length, float fill = 0.0f)
      : channels_(channels), length_(length), data_(channels * length, fill) {}
  Tensor(std::size_t channels, std::size_t length, std::vector<float> data);

  std::size_t channels() const noexcept { return channels_; }
  std::size_t length() const noexcept { return length_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  float& operator()(std::size_t c, std::size_t t) { return data_[c * length_ + t]; }
  float operator()(std::size_t c, std::size_t t) const { return data_[c * length_ + t]; }

  std::span<float> row(std::size_t c) { return {data_.data() + c * length_, length_}; }
  std::span<const float> row(std::size_t c) const {
    return {data_.data() + c * length_, length_};
  }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }
  const std::vector<float>& values() const noexcept { return data_; }

  /// Columns [begin, begin + count) of every channel.
  Tensor slice(std::size_t begin, std::size_t count) const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t length_ = 0;
  std::vector<float> data_;
};

/// Concatenates along time; channel counts must match.
Tensor concat_time(const Tensor& lhs, const Tensor& rhs);
Tensor concat_time(std::span<const Tensor> parts);

/// Largest elementwise |a - b|; shapes must match.
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace streamcnn
