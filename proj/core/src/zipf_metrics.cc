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

#include "tokscope/zipf_metrics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tokscope/error.h"

namespace tokscope {

void TokenFrequencyTable::Add(TokenId token, std::uint64_t count) {
  if (count == 0) return;
  counts_[token] += count;
  total_ += count;
}

void TokenFrequencyTable::Add(std::span<const TokenId> tokens) {
  for (const TokenId t : tokens) ++counts_[t];
  total_ += tokens.size();
}

void TokenFrequencyTable::Merge(const TokenFrequencyTable& other) {
  for (const auto& [token, count] : other.counts_) counts_[token] += count;
  total_ += other.total_;
}

TokenFrequencyTable CountFrequencies(std::span<const TokenId> tokens) {
  if (tokens.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no tokens");
  }
  TokenFrequencyTable table;
  table.Add(tokens);
  return table;
}

std::size_t Compression(std::span<const TokenId> tokens) { return tokens.size(); }

std::size_t Cardinality(const TokenFrequencyTable& table) {
  return table.cardinality();
}

std::vector<RankedToken> RankTokens(const TokenFrequencyTable& table) {
  std::vector<RankedToken> ranked;
  ranked.reserve(table.cardinality());
  for (const auto& [token, count] : table.counts()) {
    ranked.push_back({0, token, count});
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const RankedToken& a, const RankedToken& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.token < b.token;
            });
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].rank = i + 1;
  return ranked;
}

RankFrequencyCurve MakeRankFrequencyCurve(const TokenFrequencyTable& table,
                                          double truncation_bound) {
  if (table.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no tokens");
  }
  if (std::isnan(truncation_bound)) {
    throw Error(ErrorCode::kInvalidArgument, "truncation bound is NaN");
  }
  RankFrequencyCurve curve;
  curve.truncation_bound = truncation_bound;
  for (const RankedToken& r : RankTokens(table)) {
    const double x = std::log(static_cast<double>(r.rank));
    if (x > truncation_bound) break;
    curve.points.push_back({x, std::log(static_cast<double>(r.count))});
  }
  return curve;
}

ZipfFit FitZipf(const RankFrequencyCurve& curve) {
  const stats::LinearFit line = stats::OlsFit(curve.points);
  return {line.intercept, line.slope};
}

double PowerLawDeviation(const RankFrequencyCurve& curve, const ZipfFit& fit) {
  if (curve.points.empty()) return 0.0;
  double sum = 0;
  for (const auto& p : curve.points) {
    sum += std::abs(fit.beta0 + fit.beta1 * p.x - p.y);
  }
  return sum / static_cast<double>(curve.points.size());
}

double RankFrequencyAuc(const RankFrequencyCurve& curve) {
  const auto& pts = curve.points;
  if (pts.size() < 3) {
    throw Error(ErrorCode::kDegenerate,
                "auc needs at least 3 curve points, got " +
                    std::to_string(pts.size()));
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!(pts[i].x > pts[i - 1].x)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "curve abscissae must be strictly increasing");
    }
  }
  const double x0 = pts.front().x;
  const double x1 = pts.back().x;
  const std::size_t intervals = kSimpsonGridPoints - 1;
  const double h = (x1 - x0) / static_cast<double>(intervals);

  std::vector<double> grid(kSimpsonGridPoints);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < kSimpsonGridPoints; ++k) {
    if (k == intervals) {
      grid[k] = pts.back().y;
      break;
    }
    const double x = x0 + h * static_cast<double>(k);
    while (seg + 2 < pts.size() && pts[seg + 1].x <= x) ++seg;
    const auto& a = pts[seg];
    const auto& b = pts[seg + 1];
    const double t = (x - a.x) / (b.x - a.x);
    grid[k] = a.y + t * (b.y - a.y);
  }
  return stats::SimpsonIntegrate(grid, h);
}

MetricVector ComputeMetrics(const TokenFrequencyTable& table,
                            double truncation_bound) {
  MetricVector m;
  m.compression = table.total();
  m.cardinality = table.cardinality();
  m.truncation_bound = truncation_bound;
  const RankFrequencyCurve curve = MakeRankFrequencyCurve(table, truncation_bound);
  m.curve_points = curve.points.size();
  if (curve.points.size() >= 2) {
    const ZipfFit fit = FitZipf(curve);
    m.slope = fit.beta1;
    m.intercept = fit.beta0;
    m.power_law = PowerLawDeviation(curve, fit);
  }
  if (curve.points.size() >= 3) m.auc = RankFrequencyAuc(curve);
  return m;
}

MetricVector ComputeMetrics(std::span<const TokenId> tokens,
                            double truncation_bound) {
  return ComputeMetrics(CountFrequencies(tokens), truncation_bound);
}

}  // namespace tokscope
