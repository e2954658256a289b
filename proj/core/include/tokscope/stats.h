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

// Small statistical kernel: least squares, Simpson quadrature, rank
// correlations with significance, and F1.

#ifndef TOKSCOPE_STATS_H_
#define TOKSCOPE_STATS_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace tokscope::stats {

enum class CorrelationKind { kSpearman, kKendall };
std::string_view ToString(CorrelationKind kind);

// Samples up to this size get exact permutation p-values.
inline constexpr std::size_t kExactPermutationMaxN = 8;

struct CorrelationResult {
  double coefficient = 0.0;
  // Two-sided p-value.
  double p_value = 1.0;
  // One-sided p-values for the alternatives "positive association"
  // (P[T >= t]) and "negative association" (P[T <= t]).
  double p_greater = 1.0;
  double p_less = 1.0;
  std::size_t n = 0;
  CorrelationKind kind = CorrelationKind::kSpearman;
  bool exact = false;
};

// Spearman's rho: Pearson correlation of mid-ranks. Exact permutation
// p-values for n <= 8, otherwise Student-t with n - 2 degrees of freedom.
// Throws kInvalidArgument on length mismatch or n < 3 and kDegenerate when
// either input is constant.
CorrelationResult Spearman(std::span<const double> x, std::span<const double> y);

// Kendall's tau-b. Exact permutation p-values for n <= 8, otherwise the
// tie-corrected normal approximation of S = C - D.
CorrelationResult Kendall(std::span<const double> x, std::span<const double> y);

// Average 1-based ranks; tied values share the mean of their positions.
std::vector<double> MidRanks(std::span<const double> values);

// Composite Simpson sum (h/3)(y0 + 4y1 + 2y2 + ... + yn). Needs an odd
// number (>= 3) of samples and h > 0.
double SimpsonIntegrate(std::span<const double> y, double h);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;

  double operator()(double x) const { return intercept + slope * x; }
};

// Closed-form ordinary least squares of y on x. Throws kDegenerate for fewer
// than two points or when every x is equal.
LinearFit OlsFit(std::span<const Point> points);

double SumSquaredResiduals(std::span<const Point> points, const LinearFit& fit);

struct ConfusionCounts {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;
  std::size_t true_negative = 0;
};

ConfusionCounts Confusion(std::span<const int> predicted,
                          std::span<const int> actual);

// Harmonic mean of precision and recall for the positive class (label 1).
// Returns 0 when precision + recall is 0.
double F1Score(std::span<const int> predicted, std::span<const int> actual);

}  // namespace tokscope::stats

#endif  // TOKSCOPE_STATS_H_
