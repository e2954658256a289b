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

#ifndef TOKSCOPE_SYNTHETIC_H_
#define TOKSCOPE_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tokscope/corpus_io.h"

namespace tokscope {

// Portable Fisher-Yates over std::mt19937_64 output (the standard
// distributions are implementation-defined, this is not).
void SeededShuffle(std::vector<TokenId>& values, std::uint64_t seed);

// Exact rank-r counts round(C / r^exponent), r = 1..n_types, with C chosen
// so the unrounded counts sum to n_tokens. Token id r - 1 has rank r.
// Throws kInvalidArgument when n_types < 3, exponent < 0, or any count
// rounds to zero.
std::vector<std::uint64_t> ZipfCounts(std::uint64_t n_tokens,
                                      std::size_t n_types, double exponent);

// A stream realizing ZipfCounts exactly, shuffled with `seed`. Not sampled,
// so the fitted slope is known in advance.
TokenSequence GenerateZipfStream(std::uint64_t n_tokens, std::size_t n_types,
                                 double exponent, std::uint64_t seed);

}  // namespace tokscope

#endif  // TOKSCOPE_SYNTHETIC_H_
