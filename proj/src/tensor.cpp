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

#include "tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace streamcnn {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Shape: return "shape error";
    case ErrorCode::Alignment: return "alignment error";
    case ErrorCode::State: return "state error";
    case ErrorCode::EmptyInput: return "empty input";
    case ErrorCode::DivisionByZero: return "division by zero";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Schema: return "schema error";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown error";
}

Tensor::Tensor(std::size_t channels, std::size_t length, std::vector<float> data)
    : channels_(channels), length_(length), data_(std::move(data)) {
  require(data_.size() == channels * length, ErrorCode::Shape,
          "tensor data size " + std::to_string(data_.size()) + " does not match " +
              std::to_string(channels) + "x" + std::to_string(length));
}

Tensor Tensor::slice(std::size_t begin, std::size_t count) const {
  require(begin + count <= length_, ErrorCode::Shape, "tensor slice out of range");
  Tensor out(channels_, count);
  for (std::size_t c = 0; c < channels_; ++c) {
    auto src = row(c).subspan(begin, count);
    std::copy(src.begin(), src.end(), out.row(c).begin());
  }
  return out;
}

Tensor concat_time(const Tensor& lhs, const Tensor& rhs) {
  const Tensor parts[] = {lhs, rhs};
  return concat_time(parts);
}

Tensor concat_time(std::span<const Tensor> parts) {
  if (parts.empty()) return {};
  const std::size_t channels = parts.front().channels();
  std::size_t total = 0;
  for (const auto& p : parts) {
    require(p.channels() == channels, ErrorCode::Shape,
            "cannot concatenate tensors with different channel counts");
    total += p.length();
  }
  Tensor out(channels, total);
  for (std::size_t c = 0; c < channels; ++c) {
    auto dst = out.row(c).begin();
    for (const auto& p : parts) dst = std::copy(p.row(c).begin(), p.row(c).end(), dst);
  }
  return out;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  require(a.channels() == b.channels() && a.length() == b.length(), ErrorCode::Shape,
          "max_abs_diff shape mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::fabs(double(a.data()[i]) - double(b.data()[i])));
  }
  return worst;
}

}  // namespace streamcnn
