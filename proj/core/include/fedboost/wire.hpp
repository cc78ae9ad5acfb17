/*
 * Copyright 2026 the fedboost authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <vector>

#include "fedboost/bignum.hpp"
#include "fedboost/errors.hpp"

namespace fedboost::wire {

// Big-endian packing helpers shared by every message layout.

inline void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

inline void put_f64(std::vector<uint8_t>& out, double v) {
  uint64_t bits = std::bit_cast<uint64_t>(v);
  for (int i = 7; i >= 0; --i) out.push_back(static_cast<uint8_t>(bits >> (8 * i)));
}

inline void put_bigint(std::vector<uint8_t>& out, const Bigint& v, size_t width) {
  std::vector<uint8_t> bytes = to_bytes_padded(v, width);
  out.insert(out.end(), bytes.begin(), bytes.end());
}

inline void put_bytes(std::vector<uint8_t>& out, const std::vector<uint8_t>& bytes) {
  out.insert(out.end(), bytes.begin(), bytes.end());
}

class Reader {
 public:
  explicit Reader(const std::vector<uint8_t>& buf) : buf_(buf) {}

  uint32_t u32() {
    require(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | buf_[pos_++];
    return v;
  }

  double f64() {
    require(8);
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits = (bits << 8) | buf_[pos_++];
    return std::bit_cast<double>(bits);
  }

  Bigint bigint(size_t width) {
    require(width);
    Bigint v = from_bytes(buf_.data() + pos_, width);
    pos_ += width;
    return v;
  }

  std::vector<uint8_t> bytes(size_t len) {
    require(len);
    std::vector<uint8_t> out(buf_.begin() + pos_, buf_.begin() + pos_ + len);
    pos_ += len;
    return out;
  }

  std::vector<uint8_t> rest() { return bytes(buf_.size() - pos_); }

  size_t remaining() const { return buf_.size() - pos_; }
  bool done() const { return pos_ == buf_.size(); }

 private:
  void require(size_t n) const {
    if (pos_ + n > buf_.size()) throw ParseError("wire: truncated message");
  }
  const std::vector<uint8_t>& buf_;
  size_t pos_ = 0;
};

}  // namespace fedboost::wire
