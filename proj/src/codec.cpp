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

#include "gpqe/codec.hpp"

#include <bit>
#include <cstring>
#include <limits>
#include <string>

#include <zlib.h>

#include "gpqe/errors.hpp"

namespace gpqe {

namespace {

constexpr std::uint8_t kMagic[4] = {'G', 'P', 'Q', 'E'};
constexpr std::uint8_t kFlagVariances = 0x1;
constexpr std::uint8_t kFlagUnified = 0x2;

class ByteWriter {
 public:
  explicit ByteWriter(std::size_t reserve) { out_.reserve(reserve); }

  template <typename T>
  void put_le(T value) {
    for (std::size_t b = 0; b < sizeof(T); ++b) {
      out_.push_back(static_cast<std::uint8_t>(
          (static_cast<std::uint64_t>(value) >> (8 * b)) & 0xFF));
    }
  }
  void put_float(float value) { put_le(std::bit_cast<std::uint32_t>(value)); }
  void put_bytes(std::span<const std::uint8_t> bytes) {
    out_.insert(out_.end(), bytes.begin(), bytes.end());
  }

  // Appends `width` low bits of `value`, most significant bit first.
  void put_bits(std::uint32_t value, unsigned width) {
    for (unsigned i = width; i-- > 0;) {
      bit_acc_ = static_cast<std::uint8_t>((bit_acc_ << 1) | ((value >> i) & 1U));
      if (++bit_count_ == 8) {
        out_.push_back(bit_acc_);
        bit_acc_ = 0;
        bit_count_ = 0;
      }
    }
  }
  void flush_bits() {
    if (bit_count_ > 0) {
      out_.push_back(static_cast<std::uint8_t>(bit_acc_ << (8 - bit_count_)));
      bit_acc_ = 0;
      bit_count_ = 0;
    }
  }

  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
  std::uint8_t bit_acc_ = 0;
  unsigned bit_count_ = 0;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  template <typename T>
  T get_le() {
    std::uint64_t value = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
      value |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * b);
    }
    return static_cast<T>(value);
  }
  float get_float() { return std::bit_cast<float>(get_le<std::uint32_t>()); }

  std::uint32_t get_bits(unsigned width) {
    std::uint32_t value = 0;
    for (unsigned i = 0; i < width; ++i) {
      const std::uint8_t byte = in_[pos_];
      value = (value << 1) | ((byte >> (7 - bit_pos_)) & 1U);
      if (++bit_pos_ == 8) {
        bit_pos_ = 0;
        ++pos_;
      }
    }
    return value;
  }
  // Remaining bits of a partially consumed byte; moves to the next byte.
  std::uint8_t finish_bits() {
    if (bit_pos_ == 0) return 0;
    const std::uint8_t rest =
        static_cast<std::uint8_t>(in_[pos_] & (0xFFU >> bit_pos_));
    bit_pos_ = 0;
    ++pos_;
    return rest;
  }

  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  unsigned bit_pos_ = 0;
};

ContainerHeader parse_header_fields(std::span<const std::uint8_t> bytes) {
  ByteReader reader(bytes.subspan(4));
  ContainerHeader h;
  h.version = reader.get_le<std::uint8_t>();
  h.flags = reader.get_le<std::uint8_t>();
  h.rows = reader.get_le<std::uint64_t>();
  h.cols = reader.get_le<std::uint32_t>();
  h.groups = reader.get_le<std::uint32_t>();
  h.clusters = reader.get_le<std::uint32_t>();
  h.float_bits = reader.get_le<std::uint8_t>();
  h.seed = reader.get_le<std::uint64_t>();
  return h;
}

bool magic_ok(std::span<const std::uint8_t> bytes) {
  return std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) == 0;
}

// Total container length implied by the header, saturating on overflow.
std::uint64_t expected_length(const ContainerHeader& h) {
  if (h.groups == 0) return std::numeric_limits<std::uint64_t>::max();
  const unsigned __int128 floats =
      static_cast<unsigned __int128>(h.unified() ? 1 : h.groups) * h.clusters *
      (h.cols / h.groups) * (h.has_variances() ? 2 : 1);
  const unsigned __int128 index_bits =
      static_cast<unsigned __int128>(h.rows) * h.groups *
      index_bit_width(h.clusters);
  const unsigned __int128 total =
      kHeaderBytes + floats * 4 + (index_bits + 7) / 8 + kCrcBytes;
  if (total > std::numeric_limits<std::uint64_t>::max()) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(total);
}

}  // namespace

const char* to_string(CodecErrc code) {
  switch (code) {
    case CodecErrc::kTruncated: return "truncated";
    case CodecErrc::kTrailingBytes: return "trailing-bytes";
    case CodecErrc::kBadMagic: return "bad-magic";
    case CodecErrc::kBadVersion: return "bad-version";
    case CodecErrc::kBadHeader: return "bad-header";
    case CodecErrc::kCrcMismatch: return "crc-mismatch";
    case CodecErrc::kIndexOutOfRange: return "index-out-of-range";
    case CodecErrc::kNonZeroPadding: return "non-zero-padding";
    case CodecErrc::kInvalidValue: return "invalid-value";
  }
  return "unknown";
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large inputs in chunks.
  constexpr std::size_t kChunk = std::size_t{1} << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
    const std::size_t len = std::min(kChunk, bytes.size() - off);
    crc = ::crc32(crc, bytes.data() + off, static_cast<uInt>(len));
  }
  return static_cast<std::uint32_t>(crc);
}

std::uint64_t payload_bytes(const ContainerHeader& header) {
  return expected_length(header) - kHeaderBytes - kCrcBytes;
}

std::vector<std::uint8_t> encode(const QuantizedEmbedding& q) {
  q.validate();
  ContainerHeader h;
  h.flags = static_cast<std::uint8_t>(
      (q.codebook_vars ? kFlagVariances : 0) |
      (q.scheme.kind == PartitionKind::kUnified ? kFlagUnified : 0));
  h.rows = q.rows;
  h.cols = static_cast<std::uint32_t>(q.cols);
  h.groups = static_cast<std::uint32_t>(q.scheme.groups);
  h.clusters = static_cast<std::uint32_t>(q.clusters);
  h.seed = q.seed;

  ByteWriter w(static_cast<std::size_t>(expected_length(h)));
  w.put_bytes(kMagic);
  w.put_le(h.version);
  w.put_le(h.flags);
  w.put_le(h.rows);
  w.put_le(h.cols);
  w.put_le(h.groups);
  w.put_le(h.clusters);
  w.put_le(h.float_bits);
  w.put_le(h.seed);
  for (float v : q.codebook_means) w.put_float(v);
  if (q.codebook_vars) {
    for (float v : *q.codebook_vars) w.put_float(v);
  }
  const unsigned width = index_bit_width(q.clusters);
  for (auto idx : q.index_matrix) w.put_bits(idx, width);
  w.flush_bits();
  w.put_le(crc32(w.bytes()));
  return std::move(w.bytes());
}

ContainerHeader read_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) {
    throw FormatError(CodecErrc::kTruncated, "truncated stream: header incomplete");
  }
  if (!magic_ok(bytes)) throw FormatError(CodecErrc::kBadMagic, "bad magic");
  ContainerHeader h = parse_header_fields(bytes);
  if (h.version != kContainerVersion) {
    throw FormatError(CodecErrc::kBadVersion,
                      "unsupported version " + std::to_string(h.version));
  }
  if ((h.flags & ~(kFlagVariances | kFlagUnified)) != 0) {
    throw FormatError(CodecErrc::kBadHeader, "unknown flag bits");
  }
  if (h.float_bits != kFloatBits) {
    throw FormatError(CodecErrc::kBadHeader, "unsupported float width");
  }
  if (h.rows == 0 || h.cols == 0 || h.clusters == 0) {
    throw FormatError(CodecErrc::kBadHeader, "empty dimension in header");
  }
  if (h.groups == 0 || h.cols % h.groups != 0) {
    throw FormatError(CodecErrc::kBadHeader, "groups do not divide cols");
  }
  return h;
}

QuantizedEmbedding decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes + kCrcBytes) {
    throw FormatError(CodecErrc::kTruncated, "truncated stream");
  }
  const auto body = bytes.first(bytes.size() - kCrcBytes);
  ByteReader trailer(bytes.last(kCrcBytes));
  const bool crc_ok = trailer.get_le<std::uint32_t>() == crc32(body);
  const std::uint64_t expected = expected_length(parse_header_fields(bytes));
  if (!crc_ok) {
    if (magic_ok(bytes) && bytes.size() < expected) {
      throw FormatError(CodecErrc::kTruncated, "truncated stream");
    }
    throw FormatError(CodecErrc::kCrcMismatch, "CRC mismatch");
  }

  const ContainerHeader h = read_header(bytes);
  if (bytes.size() < expected) {
    throw FormatError(CodecErrc::kTruncated, "truncated stream");
  }
  if (bytes.size() > expected) {
    throw FormatError(CodecErrc::kTrailingBytes, "trailing bytes after container");
  }

  QuantizedEmbedding q;
  q.scheme = PartitionScheme{
      h.unified() ? PartitionKind::kUnified : PartitionKind::kStructured,
      h.groups};
  q.rows = static_cast<std::size_t>(h.rows);
  q.cols = h.cols;
  q.clusters = h.clusters;
  q.seed = h.seed;

  ByteReader reader(bytes.subspan(kHeaderBytes));
  q.codebook_means.resize(q.codebook_size());
  for (auto& v : q.codebook_means) v = reader.get_float();
  if (h.has_variances()) {
    auto& vars = q.codebook_vars.emplace(q.codebook_size());
    for (auto& v : vars) v = reader.get_float();
  }
  const unsigned width = index_bit_width(q.clusters);
  q.index_matrix.resize(q.rows * q.scheme.groups);
  for (auto& idx : q.index_matrix) {
    idx = reader.get_bits(width);
    if (idx >= q.clusters) {
      throw FormatError(CodecErrc::kIndexOutOfRange,
                        "index " + std::to_string(idx) + " >= cluster count");
    }
  }
  if (reader.finish_bits() != 0) {
    throw FormatError(CodecErrc::kNonZeroPadding, "non-zero index padding");
  }
  try {
    q.validate();
  } catch (const DataError& e) {
    throw FormatError(CodecErrc::kInvalidValue, e.what());
  }
  return q;
}

}  // namespace gpqe
