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

#ifndef TOKSCOPE_ERROR_H_
#define TOKSCOPE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tokscope {

enum class ErrorCode {
  kIo,
  kParse,
  kInvalidArgument,
  kDuplicateKey,
  kMissingValue,
  kDegenerate,
  kNotConverged,
  kDisconnected,
  kUnknownToken,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported by throwing tokscope::Error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Malformed input. `source` names the file (or "<memory>") and `offset` is a
// 1-based line, record or entry number, depending on the format.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t offset, const std::string& what);

  const std::string& source() const { return source_; }
  std::size_t offset() const { return offset_; }

 private:
  std::string source_;
  std::size_t offset_;
};

}  // namespace tokscope

#endif  // TOKSCOPE_ERROR_H_
