// Copyright 2026 The signmuon Authors. All Rights Reserved.
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
// =============================================================================

#ifndef SIGNMUON_CORE_SIGNS_HPP
#define SIGNMUON_CORE_SIGNS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace signmuon {

// Matrix with entries in {-1, 0, +1}, stored as signed bytes. This is the
// communicated quantity; entries fed to the bit codec must be strictly +-1.
class SignMatrix {
 public:
  SignMatrix() = default;
  SignMatrix(int rows, int cols);  // zero-initialized
  SignMatrix(int rows, int cols, std::vector<std::int8_t> entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::int64_t size() const { return static_cast<std::int64_t>(rows_) * cols_; }

  std::int8_t& operator()(int i, int j) { return entries_[static_cast<std::size_t>(i) * cols_ + j]; }
  std::int8_t operator()(int i, int j) const { return entries_[static_cast<std::size_t>(i) * cols_ + j]; }

  std::span<std::int8_t> entries() { return entries_; }
  std::span<const std::int8_t> entries() const { return entries_; }

  bool same_shape(const SignMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool operator==(const SignMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && entries_ == other.entries_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::int8_t> entries_;
};

// Bit-packed sign buffer: ceil(d/8) bytes, bit i of the stream (LSB-first
// within each byte) is 1 iff entry i is +1. Padding bits in the final byte
// are zero, making buffers canonical and corruption-detectable.
struct PackedBits {
  std::vector<std::uint8_t> bytes;
  std::int64_t logical_len = 0;
};

inline std::int64_t packed_size_bytes(std::int64_t d) { return (d + 7) / 8; }

// Throws std::invalid_argument("unresolved zero sign") if any entry is 0.
PackedBits pack_bits(const SignMatrix& s);

// Inverse of pack_bits; returns a flat 1 x d matrix, caller reshapes.
// Throws std::invalid_argument("corrupt packed buffer") on nonzero padding.
SignMatrix unpack_bits(const PackedBits& b);

// Canonical file image: 8-byte little-endian unsigned logical length d,
// followed by ceil(d/8) payload bytes.
std::vector<std::uint8_t> packed_to_wire(const PackedBits& b);
PackedBits packed_from_wire(std::span<const std::uint8_t> wire);
void write_packed_file(const std::string& path, const PackedBits& b);
PackedBits read_packed_file(const std::string& path);

}  // namespace signmuon

#endif  // SIGNMUON_CORE_SIGNS_HPP
