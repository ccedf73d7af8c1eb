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

#include <stdexcept>
#include <string>

namespace gpqe {

// Input data violates a precondition: malformed embedding files, shape
// mismatches, cluster counts exceeding the available points.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

enum class CodecErrc {
  kTruncated,
  kTrailingBytes,
  kBadMagic,
  kBadVersion,
  kBadHeader,
  kCrcMismatch,
  kIndexOutOfRange,
  kNonZeroPadding,
  kInvalidValue,
};

const char* to_string(CodecErrc code);

// A GPQE container failed validation.
class FormatError : public std::runtime_error {
 public:
  FormatError(CodecErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  CodecErrc code() const noexcept { return code_; }

 private:
  CodecErrc code_;
};

}  // namespace gpqe
