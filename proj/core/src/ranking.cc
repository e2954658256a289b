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

#include "tokscope/ranking.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "tokscope/error.h"

namespace tokscope {
namespace {

constexpr double kTieTolerance = 1e-12;

void NormalizeGeometricMean(std::vector<double>& lambda) {
  double log_sum = 0;
  for (double v : lambda) log_sum += std::log(v);
  const double g = std::exp(log_sum / static_cast<double>(lambda.size()));
  for (double& v : lambda) v /= g;
}

// Sorts (name, score) pairs by score in the given direction, breaking exact
// and near ties alphabetically and recording them.
Ranking BuildRanking(std::vector<std::pair<std::string, double>> items,
                     bool higher_is_better) {
  std::sort(items.begin(), items.end(), [&](const auto& a, const auto& b) {
    if (std::abs(a.second - b.second) > kTieTolerance) {
      return higher_is_better ? a.second > b.second : a.second < b.second;
    }
    return a.first < b.first;
  });
  Ranking ranking;
  ranking.higher_is_better = higher_is_better;
  for (std::size_t k = 0; k < items.size(); ++k) {
    ranking.ordered.push_back(items[k].first);
    ranking.scores.push_back(items[k].second);
    if (k > 0 && std::abs(items[k].second - items[k - 1].second) <= kTieTolerance) {
      ranking.warnings.push_back("tie between '" + items[k - 1].first +
                                 "' and '" + items[k].first +
                                 "' broken alphabetically");
    }
  }
  return ranking;
}

// LL(after) - LL(before), summed from per-term log ratios so that the tiny
// gains near convergence are not lost to cancellation.
double LogLikelihoodGain(const ProbabilityMatrix& wins,
                         const std::vector<double>& before,
                         const std::vector<double>& after) {
  double gain = 0;
  for (std::size_t i = 0; i < wins.size(); ++i) {
    for (std::size_t j = 0; j < wins.size(); ++j) {
      if (!wins.compared(i, j)) continue;
      const double own = (after[i] - before[i]) / before[i];
      const double old_sum = before[i] + before[j];
      const double pair = ((after[i] - before[i]) + (after[j] - before[j])) / old_sum;
      gain += wins.at(i, j) * (std::log1p(own) - std::log1p(pair));
    }
  }
  return gain;
}

}  // namespace

double BradleyTerryLogLikelihood(const ProbabilityMatrix& wins,
                                 const std::vector<double>& lambda) {
  double ll = 0;
  for (std::size_t i = 0; i < wins.size(); ++i) {
    for (std::size_t j = 0; j < wins.size(); ++j) {
      if (!wins.compared(i, j)) continue;
      ll += wins.at(i, j) *
            (std::log(lambda[i]) - std::log(lambda[i] + lambda[j]));
    }
  }
  return ll;
}

BTRatings FitBradleyTerry(const ProbabilityMatrix& probabilities,
                          const BradleyTerryOptions& options) {
  const std::size_t n = probabilities.size();
  if (n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "no items to rate");
  }
  const auto& names = probabilities.names();
  std::vector<std::string> warnings;
  ProbabilityMatrix wins = probabilities;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double pij = probabilities.at(i, j);
      const double pji = probabilities.at(j, i);
      if (std::isnan(pij) != std::isnan(pji)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "pair (" + names[i] + ", " + names[j] +
                        ") is compared in only one direction");
      }
      if (std::isnan(pij)) continue;
      if (pij < 0 || pij > 1 || pji < 0 || pji > 1 ||
          std::abs(pij + pji - 1.0) > 1e-9) {
        throw Error(ErrorCode::kInvalidArgument,
                    "probabilities for (" + names[i] + ", " + names[j] +
                        ") must lie in [0, 1] and sum to 1");
      }
      const double clamped =
          std::clamp(pij, options.clamp, 1.0 - options.clamp);
      if (clamped != pij) {
        warnings.push_back("probability for (" + names[i] + ", " + names[j] +
                           ") clamped away from 0/1");
      }
      wins.SetPair(i, j, clamped);
    }
  }
  BTRatings ratings = FitBradleyTerryWins(wins, options);
  warnings.insert(warnings.end(), ratings.warnings.begin(), ratings.warnings.end());
  ratings.warnings = std::move(warnings);
  return ratings;
}

BTRatings FitBradleyTerryWins(const ProbabilityMatrix& wins,
                              const BradleyTerryOptions& options) {
  const std::size_t n = wins.size();
  if (n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "no items to rate");
  }
  BTRatings ratings;
  ratings.names = wins.names();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || std::isnan(wins.at(i, j))) continue;
      if (!(wins.at(i, j) >= 0) || std::isnan(wins.at(j, i))) {
        throw Error(ErrorCode::kInvalidArgument,
                    "win counts for (" + ratings.names[i] + ", " +
                        ratings.names[j] +
                        ") must be non-negative and present in both directions");
      }
    }
  }

  // Connectivity of the comparison graph.
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack = {0};
  seen[0] = true;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < n; ++v) {
      if (!seen[v] && wins.compared(u, v)) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error(ErrorCode::kDisconnected,
                "comparison graph is disconnected; ratings are not identifiable");
  }

  std::vector<double> total_wins(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (wins.compared(i, j)) total_wins[i] += wins.at(i, j);
    }
  }
  for (std::size_t i = 0; i < n && n > 1; ++i) {
    if (total_wins[i] <= 0) {
      throw Error(ErrorCode::kDegenerate,
                  "'" + ratings.names[i] + "' has no wins; its rating diverges to 0");
    }
  }

  std::vector<double> lambda(n, 1.0);
  double ll = BradleyTerryLogLikelihood(wins, lambda);
  ratings.log_likelihood_trace.push_back(ll);
  std::vector<double> next(n);
  for (std::size_t sweep = 1; sweep <= options.max_sweeps && n > 1; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      double denom = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (!wins.compared(i, j)) continue;
        const double games = wins.at(i, j) + wins.at(j, i);
        denom += games / (lambda[i] + lambda[j]);
      }
      next[i] = total_wins[i] / denom;
    }
    NormalizeGeometricMean(next);
    double max_change = 0;
    for (std::size_t i = 0; i < n; ++i) {
      max_change = std::max(max_change, std::abs(next[i] - lambda[i]) / lambda[i]);
    }
    const double gain = LogLikelihoodGain(wins, lambda, next);
    if (gain < 0) {
      // MM never decreases the likelihood. The gain is accurate far below
      // the convergence tolerance, so a drop at rounding level only occurs
      // at the optimum; keep the better iterate there.
      if (gain < -1e-14 * std::max(1.0, std::abs(ll))) {
        throw Error(ErrorCode::kNotConverged,
                    "Bradley-Terry log-likelihood decreased at sweep " +
                        std::to_string(sweep));
      }
      ratings.converged = true;
      break;
    }
    lambda.swap(next);
    ll += gain;
    ratings.log_likelihood_trace.push_back(ll);
    ratings.iterations = sweep;
    if (max_change < options.tolerance) {
      ratings.converged = true;
      break;
    }
  }
  if (n == 1) ratings.converged = true;
  if (!ratings.converged) {
    ratings.warnings.push_back("Bradley-Terry stopped at the sweep cap before "
                               "reaching tolerance");
  }
  ratings.lambda = std::move(lambda);
  ratings.log_likelihood = ll;
  return ratings;
}

std::size_t Ranking::PositionOf(const std::string& name) const {
  auto it = std::find(ordered.begin(), ordered.end(), name);
  if (it == ordered.end()) {
    throw Error(ErrorCode::kMissingValue,
                "'" + name + "' does not appear in the ranking");
  }
  return static_cast<std::size_t>(it - ordered.begin()) + 1;
}

Ranking RankingFromRatings(const BTRatings& ratings) {
  std::vector<std::pair<std::string, double>> items;
  for (std::size_t i = 0; i < ratings.names.size(); ++i) {
    items.emplace_back(ratings.names[i], ratings.lambda[i]);
  }
  return BuildRanking(std::move(items), /*higher_is_better=*/true);
}

Ranking GroundTruthRanking(const DownstreamFixture& fixture,
                           const std::string& language, ModelScale scale) {
  const auto tokenizers = fixture.Tokenizers(scale);
  if (tokenizers.empty()) {
    throw Error(ErrorCode::kMissingValue,
                "fixture has no entries at scale " + std::string(ToString(scale)));
  }
  std::vector<std::pair<std::string, double>> items;
  for (const auto& tok : tokenizers) {
    items.emplace_back(tok, fixture.MeanMetricX(tok, scale, language));
  }
  return BuildRanking(std::move(items), /*higher_is_better=*/false);
}

stats::CorrelationResult EvaluateRanking(const Ranking& predicted,
                                         const Ranking& truth) {
  const std::set<std::string> a(predicted.ordered.begin(), predicted.ordered.end());
  const std::set<std::string> b(truth.ordered.begin(), truth.ordered.end());
  if (a != b || a.size() != predicted.ordered.size() ||
      b.size() != truth.ordered.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "predicted and ground-truth rankings cover different names");
  }
  std::vector<double> x, y;
  for (const auto& name : truth.ordered) {
    x.push_back(static_cast<double>(predicted.PositionOf(name)));
    y.push_back(static_cast<double>(truth.PositionOf(name)));
  }
  return stats::Kendall(x, y);
}

}  // namespace tokscope
