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

// Bradley-Terry aggregation of pairwise win probabilities into a global
// ranking, plus the downstream ground-truth ranking it is scored against.

#ifndef TOKSCOPE_RANKING_H_
#define TOKSCOPE_RANKING_H_

#include <cstddef>
#include <string>
#include <vector>

#include "tokscope/corpus_io.h"
#include "tokscope/probability_matrix.h"
#include "tokscope/stats.h"

namespace tokscope {

struct BradleyTerryOptions {
  double tolerance = 1e-10;  // max relative change of any rating
  std::size_t max_sweeps = 10000;
  double clamp = 1e-6;  // probabilities are clamped into [clamp, 1 - clamp]
};

struct BTRatings {
  std::vector<std::string> names;
  std::vector<double> lambda;  // > 0, geometric mean 1
  std::size_t iterations = 0;
  bool converged = false;
  double log_likelihood = 0.0;
  // Log-likelihood before the first sweep and after each sweep.
  std::vector<double> log_likelihood_trace;
  std::vector<std::string> warnings;
};

// Treats P[i][j] as a fractional win of i over j (one comparison per pair)
// and maximizes the Bradley-Terry likelihood with minorization-maximization:
//   lambda_i <- W_i / sum_{j compared with i} 1 / (lambda_i + lambda_j),
// renormalized to unit geometric mean after every sweep.
//
// Throws kInvalidArgument when a pair violates P[i][j] + P[j][i] = 1 (within
// 1e-9) or a probability lies outside [0, 1], and kDisconnected when the
// comparison graph is not connected.
BTRatings FitBradleyTerry(const ProbabilityMatrix& probabilities,
                          const BradleyTerryOptions& options = {});

// The same MM fit on arbitrary non-negative fractional win counts
// (wins.at(i, j) = wins of i over j; NaN = never compared). No clamping.
// Throws kDegenerate when an item has no wins at all.
BTRatings FitBradleyTerryWins(const ProbabilityMatrix& wins,
                              const BradleyTerryOptions& options = {});

// sum over compared (i, j) of w_ij * log(lambda_i / (lambda_i + lambda_j)).
double BradleyTerryLogLikelihood(const ProbabilityMatrix& wins,
                                 const std::vector<double>& lambda);

// Ordered best first. `scores` runs parallel to `ordered`.
struct Ranking {
  std::vector<std::string> ordered;
  std::vector<double> scores;
  bool higher_is_better = true;
  std::vector<std::string> warnings;

  // 1-based position of `name`; throws kMissingValue when absent.
  std::size_t PositionOf(const std::string& name) const;
};

// Descending lambda; ratings within 1e-12 are treated as tied, ordered
// alphabetically and reported in `warnings`.
Ranking RankingFromRatings(const BTRatings& ratings);

// Ascending mean MetricX over both directions (lower is better).
Ranking GroundTruthRanking(const DownstreamFixture& fixture,
                           const std::string& language, ModelScale scale);

// Kendall tau-b between the two position vectors. Throws kInvalidArgument
// when the rankings do not cover the same names.
stats::CorrelationResult EvaluateRanking(const Ranking& predicted,
                                         const Ranking& truth);

}  // namespace tokscope

#endif  // TOKSCOPE_RANKING_H_
