// Copyright 2026 The telelink Authors.
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace telelink {

// Every failure surfaced by the library carries one of these codes.  The
// numeric values are shared with the C API (tl_status) and must not change.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kCorruptFrame = 2,
  kTruncated = 3,
  kUnsupportedType = 4,
  kValidation = 5,
  kEncode = 6,
  kOversizedFrame = 7,
  kConfig = 8,
  kRouting = 9,
  kNumerical = 10,
  kDimension = 11,
  kUnachievable = 12,
  kIo = 13,
  kNotFound = 14,
  kProtocol = 15,
  kInternal = 16,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace telelink
