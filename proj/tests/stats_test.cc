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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.h"
#include "tokscope/error.h"

namespace tokscope::stats {
namespace {

std::vector<double> Doubles(const std::vector<int>& v) {
  return std::vector<double>(v.begin(), v.end());
}

template <typename F>
ErrorCode CodeOf(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected tokscope::Error";
  return ErrorCode::kIo;
}

TEST(SpearmanTest, PerfectMonotone) {
  EXPECT_DOUBLE_EQ(Spearman({{1, 2, 3}}, {{10, 20, 30}}).coefficient, 1.0);
  EXPECT_DOUBLE_EQ(Spearman({{1, 2, 3}}, {{3, 2, 1}}).coefficient, -1.0);
}

TEST(SpearmanTest, AdjacentSwapsOfFour) {
  const auto r = Spearman({{1, 2, 3, 4}}, {{2, 1, 4, 3}});
  EXPECT_NEAR(r.coefficient, 0.6, 1e-15);
  EXPECT_EQ(r.n, 4u);
  EXPECT_EQ(r.kind, CorrelationKind::kSpearman);
  EXPECT_TRUE(r.exact);
}

TEST(SpearmanTest, MidRanksAverageTies) {
  const auto r = MidRanks({{10, 20, 20, 5}});
  EXPECT_EQ(r, (std::vector<double>{2, 3.5, 3.5, 1}));
}

TEST(SpearmanTest, TiesMatchPearsonOfAverageRanks) {
  const std::vector<double> x = {1, 2, 2, 3, 5, 5, 5, 9};
  const std::vector<double> y = {3, 1, 4, 1, 5, 9, 2, 6};
  EXPECT_NEAR(Spearman(x, y).coefficient, oracle::Spearman(x, y), 1e-14);
}

TEST(SpearmanTest, Errors) {
  EXPECT_EQ(CodeOf([] { Spearman({{1, 2, 3}}, {{1, 2}}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { Spearman({{1, 2}}, {{1, 2}}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { Spearman({{1, 1, 1}}, {{1, 2, 3}}); }),
            ErrorCode::kDegenerate);
  EXPECT_EQ(CodeOf([] { Spearman({{1, NAN, 3}}, {{1, 2, 3}}); }),
            ErrorCode::kInvalidArgument);
}

TEST(SpearmanTest, LargeSampleUsesTApproximation) {
  std::vector<double> x, y;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0, 1);
  for (int i = 0; i < 30; ++i) {
    x.push_back(i);
    y.push_back(i + 8 * noise(rng));
  }
  const auto r = Spearman(x, y);
  EXPECT_FALSE(r.exact);
  EXPECT_NEAR(r.coefficient, oracle::Spearman(x, y), 1e-14);
  // Two-sided value is twice the smaller tail; tails sum to one.
  EXPECT_NEAR(r.p_value, 2 * std::min(r.p_greater, r.p_less), 1e-12);
  EXPECT_NEAR(r.p_greater + r.p_less, 1.0, 1e-12);
  EXPECT_GT(r.p_value, 0.0);
  EXPECT_LT(r.p_value, 0.05);
}

TEST(KendallTest, AdjacentSwapsOfSix) {
  const std::vector<double> truth = {1, 2, 3, 4, 5, 6};
  EXPECT_NEAR(Kendall(truth, {{2, 1, 3, 4, 5, 6}}).coefficient, 1 - 2.0 / 15, 1e-15);
  EXPECT_NEAR(Kendall(truth, {{2, 1, 3, 4, 6, 5}}).coefficient, 1 - 4.0 / 15, 1e-15);
  EXPECT_DOUBLE_EQ(Kendall(truth, truth).coefficient, 1.0);
}

TEST(KendallTest, TauBWithTiesMatchesPairCounting) {
  const std::vector<double> x = {1, 1, 2, 3, 3, 3, 4};
  const std::vector<double> y = {2, 1, 1, 3, 4, 4, 2};
  EXPECT_NEAR(Kendall(x, y).coefficient, oracle::KendallTauB(x, y), 1e-15);
}

TEST(KendallTest, NormalApproximationForLargeSamples) {
  std::vector<double> x, y;
  for (int i = 0; i < 40; ++i) {
    x.push_back(i);
    y.push_back((i * 17) % 40);
  }
  const auto r = Kendall(x, y);
  EXPECT_FALSE(r.exact);
  EXPECT_NEAR(r.coefficient, oracle::KendallTauB(x, y), 1e-14);
  // Tie-free null variance: Var(S) = n (n - 1) (2n + 5) / 18.
  const double n = 40;
  const double s = r.coefficient * n * (n - 1) / 2;
  const double z = s / std::sqrt(n * (n - 1) * (2 * n + 5) / 18);
  EXPECT_NEAR(r.p_greater, 0.5 * std::erfc(z / std::sqrt(2.0)), 1e-12);
}

TEST(KendallTest, Errors) {
  EXPECT_EQ(CodeOf([] { Kendall({{1, 2, 3}}, {{4, 4, 4}}); }), ErrorCode::kDegenerate);
  EXPECT_EQ(CodeOf([] { Kendall({{1, 2, 3, 4}}, {{1, 2, 3}}); }),
            ErrorCode::kInvalidArgument);
}

// Every permutation of six items against the identity ranking.
TEST(CorrelationOracleTest, AllPermutationsOfSix) {
  const std::vector<double> reference = {1, 2, 3, 4, 5, 6};
  int visited = 0;
  oracle::ForEachPermutation(6, [&](const std::vector<int>& p) {
    std::vector<double> y(6);
    for (int i = 0; i < 6; ++i) y[i] = p[i] + 1;
    const auto rho = Spearman(reference, y);
    const auto tau = Kendall(reference, y);
    EXPECT_EQ(rho.coefficient, oracle::SpearmanNoTies(reference, y));
    EXPECT_EQ(tau.coefficient, oracle::KendallTauB(reference, y));
    ++visited;
  });
  EXPECT_EQ(visited, 720);
}

TEST(CorrelationOracleTest, ExactKendallTailsMatchInversionCounts) {
  oracle::ForEachPermutation(6, [&](const std::vector<int>& p) {
    std::vector<double> x = {1, 2, 3, 4, 5, 6}, y(6);
    for (int i = 0; i < 6; ++i) y[i] = p[i];
    const auto r = Kendall(x, y);
    const auto [upper, lower] = oracle::KendallTails(6, r.coefficient);
    EXPECT_NEAR(r.p_greater, upper, 1e-12);
    EXPECT_NEAR(r.p_less, lower, 1e-12);
    EXPECT_NEAR(r.p_value, std::min(1.0, 2 * std::min(upper, lower)), 1e-12);
  });
}

TEST(CorrelationOracleTest, ExactSpearmanTailsMatchEnumeration) {
  const std::vector<double> x = {1, 2, 3, 4, 5, 6};
  for (const std::vector<double>& y :
       {std::vector<double>{2, 1, 4, 3, 6, 5}, std::vector<double>{6, 5, 4, 3, 2, 1},
        std::vector<double>{3, 1, 6, 2, 5, 4}, std::vector<double>{1, 2, 3, 5, 4, 6}}) {
    const auto r = Spearman(x, y);
    const auto [upper, lower] = oracle::PermutationTails(x, y, oracle::Spearman);
    EXPECT_NEAR(r.p_greater, upper, 1e-12);
    EXPECT_NEAR(r.p_less, lower, 1e-12);
  }
}

TEST(CorrelationOracleTest, ExactTailsWithTiesMatchEnumeration) {
  const std::vector<double> x = {1, 2, 2, 3, 4, 4, 5};
  const std::vector<double> y = {2, 1, 3, 3, 5, 4, 4};
  const auto rho = Spearman(x, y);
  const auto [ru, rl] = oracle::PermutationTails(x, y, oracle::Spearman);
  EXPECT_NEAR(rho.p_greater, ru, 1e-12);
  EXPECT_NEAR(rho.p_less, rl, 1e-12);
  const auto tau = Kendall(x, y);
  const auto [ku, kl] = oracle::PermutationTails(x, y, oracle::KendallTauB);
  EXPECT_NEAR(tau.p_greater, ku, 1e-12);
  EXPECT_NEAR(tau.p_less, kl, 1e-12);
}

TEST(CorrelationPropertyTest, InvariantUnderIncreasingTransforms) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 10);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(12), y(12), fx(12), gy(12);
    for (int i = 0; i < 12; ++i) {
      x[i] = u(rng);
      y[i] = u(rng);
      fx[i] = std::exp(x[i]);
      gy[i] = std::log(y[i]) * 3 + 1;
    }
    EXPECT_NEAR(Spearman(x, y).coefficient, Spearman(fx, gy).coefficient, 1e-14);
    EXPECT_NEAR(Kendall(x, y).coefficient, Kendall(fx, gy).coefficient, 1e-14);
  }
}

TEST(CorrelationPropertyTest, KendallAntisymmetryWithoutTies) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(7), y(7);
    std::iota(x.begin(), x.end(), 0.0);
    std::iota(y.begin(), y.end(), 0.0);
    std::shuffle(y.begin(), y.end(), rng);
    std::vector<double> reversed(7);
    for (int i = 0; i < 7; ++i) reversed[i] = 6 - y[i];
    EXPECT_NEAR(Kendall(x, reversed).coefficient, -Kendall(x, y).coefficient, 1e-15);
  }
}

TEST(SimpsonTest, Examples) {
  EXPECT_DOUBLE_EQ(SimpsonIntegrate({{0, 1, 0}}, 1), 4.0 / 3);
  EXPECT_DOUBLE_EQ(SimpsonIntegrate({{0, 1, 4}}, 1), 8.0 / 3);
  EXPECT_DOUBLE_EQ(SimpsonIntegrate({{2.5, 2.5, 2.5, 2.5, 2.5}}, 1), 10.0);
}

TEST(SimpsonTest, ExactForCubics) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    const double lo = u(rng), width = 0.5 + std::abs(u(rng));
    const std::size_t points = 2 * (1 + trial % 20) + 1;
    const double h = width / static_cast<double>(points - 1);
    std::vector<double> y(points);
    for (std::size_t i = 0; i < points; ++i) {
      const double x = lo + h * static_cast<double>(i);
      y[i] = a + b * x + c * x * x + d * x * x * x;
    }
    const auto antiderivative = [&](double x) {
      return a * x + b * x * x / 2 + c * x * x * x / 3 + d * x * x * x * x / 4;
    };
    EXPECT_NEAR(SimpsonIntegrate(y, h), antiderivative(lo + width) - antiderivative(lo),
                1e-12);
  }
}

TEST(SimpsonTest, Errors) {
  EXPECT_EQ(CodeOf([] { SimpsonIntegrate({{1, 2, 3, 4}}, 1); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { SimpsonIntegrate({{1}}, 1); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { SimpsonIntegrate({{1, 2, 3}}, 0); }),
            ErrorCode::kInvalidArgument);
}

TEST(OlsTest, Examples) {
  const auto two = OlsFit({{{0, 1}, {1, 3}}});
  EXPECT_DOUBLE_EQ(two.intercept, 1);
  EXPECT_DOUBLE_EQ(two.slope, 2);
  const auto tent = OlsFit({{{0, 0}, {1, 1}, {2, 0}}});
  EXPECT_NEAR(tent.intercept, 1.0 / 3, 1e-15);
  EXPECT_NEAR(tent.slope, 0, 1e-15);
  const std::vector<Point> line = {{0, 1}, {1, 4}, {2, 7}, {5, 16}};
  EXPECT_NEAR(SumSquaredResiduals(line, OlsFit(line)), 0, 1e-24);
}

TEST(OlsTest, Errors) {
  EXPECT_EQ(CodeOf([] { OlsFit({{{1, 1}}}); }), ErrorCode::kDegenerate);
  EXPECT_EQ(CodeOf([] { OlsFit({{{1, 1}, {1, 2}}}); }), ErrorCode::kDegenerate);
}

TEST(OlsTest, PerturbationNeverImproves) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> noise(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point> pts;
    std::vector<std::pair<double, double>> raw;
    for (int i = 0; i < 25; ++i) {
      const double x = 0.3 * i + noise(rng) * 0.01;
      const double y = 2 - 0.7 * x + noise(rng);
      pts.push_back({x, y});
      raw.emplace_back(x, y);
    }
    const LinearFit fit = OlsFit(pts);
    const auto [b0, b1] = oracle::Ols(raw);
    EXPECT_NEAR(fit.intercept, b0, 1e-10);
    EXPECT_NEAR(fit.slope, b1, 1e-10);
    const double best = SumSquaredResiduals(pts, fit);
    for (double d0 : {-1e-3, 0.0, 1e-3}) {
      for (double d1 : {-1e-3, 0.0, 1e-3}) {
        const LinearFit moved{fit.intercept + d0, fit.slope + d1};
        EXPECT_GE(SumSquaredResiduals(pts, moved), best);
      }
    }
  }
}

TEST(F1Test, Examples) {
  EXPECT_DOUBLE_EQ(F1Score({{1, 0, 1}}, {{1, 0, 1}}), 1.0);
  EXPECT_DOUBLE_EQ(F1Score({{0, 1, 0}}, {{1, 0, 1}}), 0.0);
  // TP = 2, FP = 1, FN = 1.
  EXPECT_NEAR(F1Score({{1, 1, 1, 0, 0}}, {{1, 1, 0, 1, 0}}), 2.0 / 3, 1e-15);
  EXPECT_DOUBLE_EQ(F1Score({{0, 0}}, {{0, 0}}), 0.0);
  const auto c = Confusion({{1, 1, 1, 0, 0}}, {{1, 1, 0, 1, 0}});
  EXPECT_EQ(c.true_positive, 2u);
  EXPECT_EQ(c.false_positive, 1u);
  EXPECT_EQ(c.false_negative, 1u);
  EXPECT_EQ(c.true_negative, 1u);
}

TEST(F1Test, Errors) {
  EXPECT_EQ(CodeOf([] { F1Score({{1, 0}}, {{1}}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { F1Score({{2}}, {{1}}); }), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace tokscope::stats
