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

#include "tokscope/synthetic.h"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "tokscope/error.h"

namespace tokscope {

void SeededShuffle(std::vector<TokenId>& values, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = values.size(); i > 1; --i) {
    // Uniform in [0, i) by rejection.
    const std::uint64_t bound = i;
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do {
      draw = rng();
    } while (draw >= limit);
    std::swap(values[i - 1], values[draw % bound]);
  }
}

std::vector<std::uint64_t> ZipfCounts(std::uint64_t n_tokens,
                                      std::size_t n_types, double exponent) {
  if (n_types < 3) {
    throw Error(ErrorCode::kInvalidArgument, "zipf stream needs n_types >= 3");
  }
  if (!(exponent >= 0) || !std::isfinite(exponent)) {
    throw Error(ErrorCode::kInvalidArgument,
                "zipf exponent must be finite and non-negative");
  }
  double harmonic = 0;
  for (std::size_t r = 1; r <= n_types; ++r) {
    harmonic += std::pow(static_cast<double>(r), -exponent);
  }
  const double scale = static_cast<double>(n_tokens) / harmonic;
  std::vector<std::uint64_t> counts(n_types);
  for (std::size_t r = 1; r <= n_types; ++r) {
    const double c =
        std::round(scale * std::pow(static_cast<double>(r), -exponent));
    if (c < 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "count for rank " + std::to_string(r) +
                      " rounds to zero; increase n_tokens");
    }
    counts[r - 1] = static_cast<std::uint64_t>(c);
  }
  return counts;
}

TokenSequence GenerateZipfStream(std::uint64_t n_tokens, std::size_t n_types,
                                 double exponent, std::uint64_t seed) {
  const auto counts = ZipfCounts(n_tokens, n_types, exponent);
  TokenSequence seq;
  seq.source_tokenizer = "zipf";
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  seq.tokens.reserve(total);
  for (std::size_t r = 0; r < counts.size(); ++r) {
    seq.tokens.insert(seq.tokens.end(), counts[r], static_cast<TokenId>(r));
  }
  SeededShuffle(seq.tokens, seed);
  return seq;
}

}  // namespace tokscope
