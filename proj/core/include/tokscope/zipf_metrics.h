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

// Intrinsic tokenizer metrics computed from token frequencies:
//
//   compression  number of tokens in the stream
//   cardinality  number of distinct tokens
//   auc          area under the log-log rank-frequency curve
//   slope        OLS slope of log-frequency on log-rank
//   power_law    mean absolute residual of that line
//
// The last three use only the head of the curve (ln rank <= truncation
// bound, natural log). Compression and cardinality use the full stream.

#ifndef TOKSCOPE_ZIPF_METRICS_H_
#define TOKSCOPE_ZIPF_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "tokscope/corpus_io.h"
#include "tokscope/stats.h"

namespace tokscope {

inline constexpr double kDefaultTruncationBound = 6.0;
// 2^11 + 1: an even number of Simpson intervals.
inline constexpr std::size_t kSimpsonGridPoints = 2049;

class TokenFrequencyTable {
 public:
  TokenFrequencyTable() = default;

  void Add(TokenId token, std::uint64_t count = 1);
  void Add(std::span<const TokenId> tokens);
  // Tables over disjoint documents add; the merge is order-independent.
  void Merge(const TokenFrequencyTable& other);

  std::uint64_t total() const { return total_; }
  std::size_t cardinality() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }
  const std::map<TokenId, std::uint64_t>& counts() const { return counts_; }

  friend bool operator==(const TokenFrequencyTable&,
                         const TokenFrequencyTable&) = default;

 private:
  std::map<TokenId, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

// Throws kInvalidArgument ("no tokens") for an empty sequence.
TokenFrequencyTable CountFrequencies(std::span<const TokenId> tokens);
inline TokenFrequencyTable CountFrequencies(const TokenSequence& seq) {
  return CountFrequencies(seq.tokens);
}

std::size_t Compression(std::span<const TokenId> tokens);
inline std::size_t Compression(const TokenSequence& seq) {
  return seq.tokens.size();
}
std::size_t Cardinality(const TokenFrequencyTable& table);

struct RankedToken {
  std::size_t rank = 0;  // 1-based
  TokenId token = 0;
  std::uint64_t count = 0;
};

// Descending count; equal counts ordered by ascending token id.
std::vector<RankedToken> RankTokens(const TokenFrequencyTable& table);

struct RankFrequencyCurve {
  std::vector<stats::Point> points;  // (ln rank, ln count), ascending x
  double truncation_bound = kDefaultTruncationBound;
};

// Keeps points with ln(rank) <= truncation_bound. Pass +infinity for the
// untruncated curve. Throws kInvalidArgument for an empty table.
RankFrequencyCurve MakeRankFrequencyCurve(
    const TokenFrequencyTable& table,
    double truncation_bound = kDefaultTruncationBound);

struct ZipfFit {
  double beta0 = 0.0;  // intercept
  double beta1 = 0.0;  // slope
};

// OLS of y on x. Throws kDegenerate with fewer than two distinct x.
ZipfFit FitZipf(const RankFrequencyCurve& curve);

// Mean of |beta0 + beta1 * x - y| over the curve points.
double PowerLawDeviation(const RankFrequencyCurve& curve, const ZipfFit& fit);

// Integral of the piecewise-linear interpolant, resampled onto
// kSimpsonGridPoints uniform abscissae over [x_min, x_max] and integrated
// with composite Simpson. Throws kDegenerate with fewer than 3 points.
double RankFrequencyAuc(const RankFrequencyCurve& curve);

struct MetricVector {
  std::uint64_t compression = 0;
  std::uint64_t cardinality = 0;
  // Absent when the truncated curve is too short: slope and power_law need
  // two points, auc needs three.
  std::optional<double> auc;
  std::optional<double> slope;
  std::optional<double> power_law;
  std::optional<double> intercept;
  std::size_t curve_points = 0;
  double truncation_bound = kDefaultTruncationBound;

  friend bool operator==(const MetricVector&, const MetricVector&) = default;
};

MetricVector ComputeMetrics(const TokenFrequencyTable& table,
                            double truncation_bound = kDefaultTruncationBound);
// Throws kInvalidArgument for an empty sequence.
MetricVector ComputeMetrics(std::span<const TokenId> tokens,
                            double truncation_bound = kDefaultTruncationBound);
inline MetricVector ComputeMetrics(
    const TokenSequence& seq, double truncation_bound = kDefaultTruncationBound) {
  return ComputeMetrics(std::span<const TokenId>(seq.tokens), truncation_bound);
}

}  // namespace tokscope

#endif  // TOKSCOPE_ZIPF_METRICS_H_
