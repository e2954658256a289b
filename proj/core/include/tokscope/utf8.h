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

#ifndef TOKSCOPE_UTF8_H_
#define TOKSCOPE_UTF8_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace tokscope::utf8 {

// Byte offset of the first malformed sequence, or nullopt when `text` is
// well-formed UTF-8 (no overlongs, surrogates or code points past U+10FFFF).
std::optional<std::size_t> FindInvalid(std::string_view text);

inline bool IsValid(std::string_view text) {
  return !FindInvalid(text).has_value();
}

void AppendCodePoint(char32_t cp, std::string& out);

// Decodes one code point starting at `pos` and advances `pos`. Input must be
// valid UTF-8.
char32_t NextCodePoint(std::string_view text, std::size_t& pos);

}  // namespace tokscope::utf8

#endif  // TOKSCOPE_UTF8_H_
