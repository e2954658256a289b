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

#include "tokscope/stats.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "tokscope/error.h"

namespace tokscope::stats {
namespace {

void CheckPaired(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "correlation inputs differ in length (" +
                    std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()) + ")");
  }
  if (x.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "correlation needs at least 3 observations");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "correlation inputs must be finite");
    }
  }
}

int Sign(double v) { return (v > 0) - (v < 0); }

// Sum over i<j of sign(x_i - x_j) * sign(y_i - y_j).
std::int64_t KendallS(std::span<const double> x, std::span<const double> y) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      s += Sign(x[i] - x[j]) * Sign(y[i] - y[j]);
    }
  }
  return s;
}

// Pairs tied within each group of equal values: sum of t(t-1)/2, plus the
// two extra moments the variance of S needs.
struct TieSums {
  double pairs = 0;     // sum t(t-1)/2
  double v0 = 0;        // sum t(t-1)(2t+5)
  double v1 = 0;        // sum t(t-1)
  double v2 = 0;        // sum t(t-1)(t-2)
};

TieSums Ties(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  TieSums sums;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    sums.pairs += t * (t - 1) / 2;
    sums.v0 += t * (t - 1) * (2 * t + 5);
    sums.v1 += t * (t - 1);
    sums.v2 += t * (t - 1) * (t - 2);
    i = j;
  }
  return sums;
}

struct Tails {
  double greater = 0;
  double less = 0;
  double two_sided = 0;
};

// Enumerates all n! arrangements of `y` against fixed `x` and counts how
// often `statistic` is at least as extreme as the observed value. The
// statistic must be exactly representable (integers or multiples of 1/4) so
// that equal values compare equal.
template <typename Statistic>
Tails ExactPermutationTails(std::span<const double> x,
                            std::span<const double> y, Statistic statistic) {
  const double observed = statistic(x, y);
  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> permuted(y.size());
  std::uint64_t total = 0, greater = 0, less = 0, extreme = 0;
  do {
    for (std::size_t i = 0; i < order.size(); ++i) permuted[i] = y[order[i]];
    const double t = statistic(x, std::span<const double>(permuted));
    ++total;
    greater += t >= observed;
    less += t <= observed;
    extreme += std::abs(t) >= std::abs(observed);
  } while (std::next_permutation(order.begin(), order.end()));
  const double n = static_cast<double>(total);
  return {greater / n, less / n, extreme / n};
}

Tails FromDistribution(double cdf_at, double sf_at) {
  Tails tails{sf_at, cdf_at, 0};
  tails.two_sided = std::min(1.0, 2 * std::min(sf_at, cdf_at));
  return tails;
}

}  // namespace

std::string_view ToString(CorrelationKind kind) {
  return kind == CorrelationKind::kSpearman ? "spearman" : "kendall";
}

std::vector<double> MidRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 (0-based) share rank mean(i+1..j).
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

CorrelationResult Spearman(std::span<const double> x, std::span<const double> y) {
  CheckPaired(x, y);
  const std::size_t n = x.size();
  const std::vector<double> rx = MidRanks(x);
  const std::vector<double> ry = MidRanks(y);
  const double mean = (static_cast<double>(n) + 1) / 2;

  // Centered mid-ranks are multiples of 1/2, so these sums are exact.
  const auto cross = [mean](std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - mean) * (b[i] - mean);
    return s;
  };
  const double sxx = cross(rx, rx);
  const double syy = cross(ry, ry);
  if (sxx == 0 || syy == 0) {
    throw Error(ErrorCode::kDegenerate,
                "spearman correlation undefined: an input has no rank variance");
  }
  CorrelationResult result;
  result.kind = CorrelationKind::kSpearman;
  result.n = n;
  const double untied = static_cast<double>(n) *
                        (static_cast<double>(n) * static_cast<double>(n) - 1) / 12;
  if (sxx == untied && syy == untied) {
    // No ties: 1 - 6 sum d^2 / (n (n^2 - 1)).
    double d2 = 0;
    for (std::size_t i = 0; i < n; ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
    result.coefficient =
        1.0 - 6.0 * d2 / (static_cast<double>(n) *
                          (static_cast<double>(n) * static_cast<double>(n) - 1));
  } else {
    result.coefficient = std::clamp(cross(rx, ry) / std::sqrt(sxx * syy), -1.0, 1.0);
  }

  Tails tails;
  if (n <= kExactPermutationMaxN) {
    tails = ExactPermutationTails(rx, ry, cross);
    result.exact = true;
  } else if (std::abs(result.coefficient) >= 1.0) {
    tails = result.coefficient > 0 ? Tails{0, 1, 0} : Tails{1, 0, 0};
  } else {
    const double rho = result.coefficient;
    const double df = static_cast<double>(n) - 2;
    const double t = rho * std::sqrt(df / (1 - rho * rho));
    const boost::math::students_t dist(df);
    tails = FromDistribution(boost::math::cdf(dist, t),
                             boost::math::cdf(boost::math::complement(dist, t)));
  }
  result.p_greater = tails.greater;
  result.p_less = tails.less;
  result.p_value = tails.two_sided;
  return result;
}

CorrelationResult Kendall(std::span<const double> x, std::span<const double> y) {
  CheckPaired(x, y);
  const std::size_t n = x.size();
  const double n0 = static_cast<double>(n) * (static_cast<double>(n) - 1) / 2;
  const TieSums tx = Ties(x);
  const TieSums ty = Ties(y);
  const double denom = std::sqrt((n0 - tx.pairs) * (n0 - ty.pairs));
  if (denom == 0) {
    throw Error(ErrorCode::kDegenerate,
                "kendall correlation undefined: an input is constant");
  }
  const std::int64_t s = KendallS(x, y);

  CorrelationResult result;
  result.kind = CorrelationKind::kKendall;
  result.n = n;
  result.coefficient = std::clamp(static_cast<double>(s) / denom, -1.0, 1.0);

  Tails tails;
  if (n <= kExactPermutationMaxN) {
    tails = ExactPermutationTails(
        x, y, [](std::span<const double> a, std::span<const double> b) {
          return static_cast<double>(KendallS(a, b));
        });
    result.exact = true;
  } else {
    const double nd = static_cast<double>(n);
    double var = (nd * (nd - 1) * (2 * nd + 5) - tx.v0 - ty.v0) / 18;
    var += tx.v2 * ty.v2 / (9 * nd * (nd - 1) * (nd - 2));
    var += tx.v1 * ty.v1 / (2 * nd * (nd - 1));
    const double z = static_cast<double>(s) / std::sqrt(var);
    const boost::math::normal dist;
    tails = FromDistribution(boost::math::cdf(dist, z),
                             boost::math::cdf(boost::math::complement(dist, z)));
  }
  result.p_greater = tails.greater;
  result.p_less = tails.less;
  result.p_value = tails.two_sided;
  return result;
}

double SimpsonIntegrate(std::span<const double> y, double h) {
  if (y.size() < 3 || y.size() % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "simpson needs an odd number of samples >= 3, got " +
                    std::to_string(y.size()));
  }
  if (!(h > 0) || !std::isfinite(h)) {
    throw Error(ErrorCode::kInvalidArgument, "simpson spacing must be positive");
  }
  double odd = 0, even = 0;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    (i % 2 ? odd : even) += y[i];
  }
  return h / 3 * (y.front() + 4 * odd + 2 * even + y.back());
}

LinearFit OlsFit(std::span<const Point> points) {
  if (points.size() < 2) {
    throw Error(ErrorCode::kDegenerate,
                "least squares needs at least 2 points, got " +
                    std::to_string(points.size()));
  }
  const double n = static_cast<double>(points.size());
  double mx = 0, my = 0;
  for (const auto& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (const auto& p : points) {
    sxx += (p.x - mx) * (p.x - mx);
    sxy += (p.x - mx) * (p.y - my);
  }
  if (sxx == 0) {
    throw Error(ErrorCode::kDegenerate,
                "least squares is undefined when every x is equal");
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

double SumSquaredResiduals(std::span<const Point> points, const LinearFit& fit) {
  double sum = 0;
  for (const auto& p : points) {
    const double r = fit(p.x) - p.y;
    sum += r * r;
  }
  return sum;
}

ConfusionCounts Confusion(std::span<const int> predicted,
                          std::span<const int> actual) {
  if (predicted.size() != actual.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "predicted and actual labels differ in length");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const int p = predicted[i];
    const int a = actual[i];
    if ((p != 0 && p != 1) || (a != 0 && a != 1)) {
      throw Error(ErrorCode::kInvalidArgument, "labels must be 0 or 1");
    }
    if (p && a) ++c.true_positive;
    if (p && !a) ++c.false_positive;
    if (!p && a) ++c.false_negative;
    if (!p && !a) ++c.true_negative;
  }
  return c;
}

double F1Score(std::span<const int> predicted, std::span<const int> actual) {
  const ConfusionCounts c = Confusion(predicted, actual);
  const double tp = static_cast<double>(c.true_positive);
  const double precision =
      c.true_positive + c.false_positive
          ? tp / static_cast<double>(c.true_positive + c.false_positive)
          : 0.0;
  const double recall =
      c.true_positive + c.false_negative
          ? tp / static_cast<double>(c.true_positive + c.false_negative)
          : 0.0;
  if (precision + recall == 0) return 0.0;
  return 2 * precision * recall / (precision + recall);
}

}  // namespace tokscope::stats
