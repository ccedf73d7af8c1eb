// Copyright 2026 The gpqe Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gpqe/quantizer.hpp"

namespace gpqe {

// GPQE container layout, all integers little-endian:
//
//   header   "GPQE" | version u8 | flags u8 | rows u64 | cols u32 |
//            groups u32 | clusters u32 | f_p u8 | seed u64      (35 bytes)
//   means    binary32, codebook blocks in group order, row-major
//   vars     same layout as means, present iff flags bit0
//   indices  word-major then group-major, ceil(log2 c) bits each, MSB-first,
//            zero-padded to a byte once at the end of the section
//   crc      CRC-32/ISO-HDLC of everything above, u32
//
// flags bit1 selects Unified (1) or Structured (0) partitioning.
inline constexpr std::size_t kHeaderBytes = 35;
inline constexpr std::size_t kCrcBytes = 4;
inline constexpr std::uint8_t kContainerVersion = 1;

struct ContainerHeader {
  std::uint8_t version = kContainerVersion;
  std::uint8_t flags = 0;
  std::uint64_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t groups = 0;
  std::uint32_t clusters = 0;
  std::uint8_t float_bits = 32;
  std::uint64_t seed = 0;

  bool has_variances() const { return (flags & 0x1) != 0; }
  bool unified() const { return (flags & 0x2) != 0; }
};

// Bytes of means + variances + packed indices, i.e. without header and CRC.
std::uint64_t payload_bytes(const ContainerHeader& header);

std::vector<std::uint8_t> encode(const QuantizedEmbedding& q);

// Throws FormatError on any malformed input. The vocabulary is not part of
// the container and is left empty.
QuantizedEmbedding decode(std::span<const std::uint8_t> bytes);

// Parses and validates only the fixed-size header.
ContainerHeader read_header(std::span<const std::uint8_t> bytes);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

}  // namespace gpqe
