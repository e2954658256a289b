// Copyright 2026 The tokscope Authors.
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

#include "tokscope/error.h"

#include <utility>

namespace tokscope {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
      return "io";
    case ErrorCode::kParse:
      return "parse";
    case ErrorCode::kInvalidArgument:
      return "invalid-argument";
    case ErrorCode::kDuplicateKey:
      return "duplicate-key";
    case ErrorCode::kMissingValue:
      return "missing-value";
    case ErrorCode::kDegenerate:
      return "degenerate";
    case ErrorCode::kNotConverged:
      return "not-converged";
    case ErrorCode::kDisconnected:
      return "disconnected";
    case ErrorCode::kUnknownToken:
      return "unknown-token";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

ParseError::ParseError(std::string source, std::size_t offset,
                       const std::string& what)
    : Error(ErrorCode::kParse,
            source + ":" + std::to_string(offset) + ": " + what),
      source_(std::move(source)),
      offset_(offset) {}

}  // namespace tokscope
