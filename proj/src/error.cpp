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

#include "telelink/error.hpp"

namespace telelink {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "ok";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kCorruptFrame: return "corrupt_frame";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kUnsupportedType: return "unsupported_type";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kEncode: return "encode";
    case ErrorCode::kOversizedFrame: return "oversized_frame";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kRouting: return "routing";
    case ErrorCode::kNumerical: return "numerical";
    case ErrorCode::kDimension: return "dimension";
    case ErrorCode::kUnachievable: return "unachievable";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kProtocol: return "protocol";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

}  // namespace telelink
