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

#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include "binary_io.hpp"
#include "error.hpp"
#include "tensor.hpp"
#include "test_support.hpp"

using namespace streamcnn;

TEST_CASE("tensor slice and concat round trip") {
  Tensor t(2, 5, std::vector<float>{0, 1, 2, 3, 4, 10, 11, 12, 13, 14});
  const Tensor a = t.slice(0, 2);
  const Tensor b = t.slice(2, 3);
  CHECK(a(1, 1) == 11.0f);
  CHECK(b(0, 0) == 2.0f);
  CHECK(concat_time(a, b) == t);
  const std::vector<Tensor> parts{t.slice(0, 1), t.slice(1, 3), t.slice(4, 1)};
  CHECK(concat_time(parts) == t);
}

TEST_CASE("tensor shape errors") {
  CHECK_THROWS_AS(Tensor(2, 3, std::vector<float>(5)), Error);
  Tensor t(2, 4);
  CHECK_THROWS_AS(t.slice(3, 2), Error);
  CHECK_THROWS_AS(concat_time(Tensor(1, 2), Tensor(2, 2)), Error);
  CHECK_THROWS_AS(max_abs_diff(Tensor(1, 2), Tensor(1, 3)), Error);
}

TEST_CASE("max_abs_diff picks the worst element") {
  Tensor a(1, 3, std::vector<float>{1, 2, 3});
  Tensor b(1, 3, std::vector<float>{1, 2.5f, 2});
  CHECK(max_abs_diff(a, b) == doctest::Approx(1.0));
}

TEST_CASE("float32 little-endian encoding") {
  std::vector<std::uint8_t> bytes;
  const std::vector<float> values{1.0f, -2.0f};
  append_f32_le(bytes, values);
  // 1.0f = 0x3f800000, -2.0f = 0xc0000000
  const std::vector<std::uint8_t> expected{0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x00, 0xc0};
  CHECK(bytes == expected);
  CHECK(decode_f32_le(bytes) == values);
  bytes.pop_back();
  CHECK_THROWS_AS(decode_f32_le(bytes), Error);
}

TEST_CASE("sha256 known vectors") {
  const std::string abc = "abc";
  const std::vector<std::uint8_t> bytes(abc.begin(), abc.end());
  CHECK(sha256_hex(bytes) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex({}) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("file helpers report I/O errors with the Io code") {
  const auto dir = testing::temp_dir("io");
  write_file_text(dir / "a.txt", "hello");
  CHECK(read_file_text(dir / "a.txt") == "hello");
  try {
    read_file_bytes(dir / "missing.bin");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}
