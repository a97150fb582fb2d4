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

#include "core/signs.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace signmuon {

SignMatrix::SignMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows) * cols, 0) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("sign matrix dimensions must be positive");
}

SignMatrix::SignMatrix(int rows, int cols, std::vector<std::int8_t> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("sign matrix dimensions must be positive");
  if (entries_.size() != static_cast<std::size_t>(rows) * cols)
    throw std::invalid_argument("sign matrix data length does not match rows*cols");
  for (std::int8_t e : entries_)
    if (e != -1 && e != 0 && e != 1)
      throw std::invalid_argument("sign matrix entries must be in {-1, 0, +1}");
}

PackedBits pack_bits(const SignMatrix& s) {
  const std::int64_t d = s.size();
  PackedBits out;
  out.logical_len = d;
  out.bytes.assign(static_cast<std::size_t>(packed_size_bytes(d)), 0);
  auto entries = s.entries();
  for (std::int64_t i = 0; i < d; ++i) {
    const std::int8_t e = entries[static_cast<std::size_t>(i)];
    if (e == 0) throw std::invalid_argument("unresolved zero sign");
    if (e == 1) out.bytes[static_cast<std::size_t>(i / 8)] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  return out;
}

SignMatrix unpack_bits(const PackedBits& b) {
  const std::int64_t d = b.logical_len;
  if (d < 1) throw std::invalid_argument("unpack_bits: logical length must be >= 1");
  if (static_cast<std::int64_t>(b.bytes.size()) != packed_size_bytes(d))
    throw std::invalid_argument("unpack_bits: byte count inconsistent with logical length");
  // Padding bits beyond d must be zero.
  if (d % 8 != 0) {
    const std::uint8_t mask = static_cast<std::uint8_t>(0xFFu << (d % 8));
    if (b.bytes.back() & mask) throw std::invalid_argument("corrupt packed buffer");
  }
  SignMatrix s(1, static_cast<int>(d));
  auto entries = s.entries();
  for (std::int64_t i = 0; i < d; ++i) {
    const bool bit = (b.bytes[static_cast<std::size_t>(i / 8)] >> (i % 8)) & 1u;
    entries[static_cast<std::size_t>(i)] = bit ? 1 : -1;
  }
  return s;
}

std::vector<std::uint8_t> packed_to_wire(const PackedBits& b) {
  std::vector<std::uint8_t> wire(8 + b.bytes.size());
  const auto d = static_cast<std::uint64_t>(b.logical_len);
  for (int i = 0; i < 8; ++i) wire[i] = static_cast<std::uint8_t>((d >> (8 * i)) & 0xFFu);
  std::memcpy(wire.data() + 8, b.bytes.data(), b.bytes.size());
  return wire;
}

PackedBits packed_from_wire(std::span<const std::uint8_t> wire) {
  if (wire.size() < 8) throw std::invalid_argument("packed buffer truncated: missing length header");
  std::uint64_t d = 0;
  for (int i = 0; i < 8; ++i) d |= static_cast<std::uint64_t>(wire[i]) << (8 * i);
  if (d < 1) throw std::invalid_argument("packed buffer header: logical length must be >= 1");
  PackedBits b;
  b.logical_len = static_cast<std::int64_t>(d);
  const auto payload = static_cast<std::size_t>(packed_size_bytes(b.logical_len));
  if (wire.size() != 8 + payload)
    throw std::invalid_argument("packed buffer size inconsistent with logical length");
  b.bytes.assign(wire.begin() + 8, wire.end());
  return b;
}

void write_packed_file(const std::string& path, const PackedBits& b) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  const auto wire = packed_to_wire(b);
  f.write(reinterpret_cast<const char*>(wire.data()), static_cast<std::streamsize>(wire.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

PackedBits read_packed_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::vector<std::uint8_t> wire((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return packed_from_wire(wire);
}

}  // namespace signmuon
