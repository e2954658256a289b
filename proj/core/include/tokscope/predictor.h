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

// Pairwise outcome models: given the difference in intrinsic metrics between
// tokenizers i and j on one language, predict whether i beats j downstream.
//
// Three model kinds share one surface: L2 logistic regression (Newton),
// linear SVM (deterministic full-batch subgradient descent) and RBF SVM
// (SMO) with Platt calibration. Features are standardized on the training
// split and every fit is deterministic.

#ifndef TOKSCOPE_PREDICTOR_H_
#define TOKSCOPE_PREDICTOR_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tokscope/corpus_io.h"
#include "tokscope/probability_matrix.h"
#include "tokscope/zipf_metrics.h"

namespace tokscope {

enum class Metric { kCompression, kCardinality, kAuc, kSlope, kPowerLaw };

std::string_view ToString(Metric metric);
// Accepts the canonical names plus "power-law"/"powerlaw" and the one-letter
// abbreviations c, p, s.
Metric ParseMetric(std::string_view name);
std::vector<Metric> ParseMetricList(std::string_view comma_separated);
const std::vector<Metric>& AllMetrics();
std::vector<std::string> MetricNames(std::span<const Metric> metrics);

// Throws kMissingValue when the metric was not computable for this stream.
double MetricValue(const MetricVector& metrics, Metric metric);

struct MetricKey {
  std::string tokenizer;
  std::string language;

  friend auto operator<=>(const MetricKey&, const MetricKey&) = default;
};
using MetricTable = std::map<MetricKey, MetricVector>;

struct PairwiseExample {
  std::string tok_i;
  std::string tok_j;
  std::string language;
  std::vector<double> features;  // X_i - X_j
  int label = 0;                 // 1 iff i beats j downstream

  bool Involves(std::string_view tokenizer) const {
    return tok_i == tokenizer || tok_j == tokenizer;
  }
};

// Same comparison seen from j's side: negated features, flipped label.
PairwiseExample Flip(const PairwiseExample& example);

std::vector<double> FeatureDifference(const MetricTable& metrics,
                                      const std::string& tok_i,
                                      const std::string& tok_j,
                                      const std::string& language,
                                      std::span<const Metric> features);

struct DatasetOptions {
  ModelScale scale = ModelScale::k2_7B;
  std::vector<Metric> features;
  std::uint64_t seed = 0;
};

// One example per language and unordered tokenizer pair, oriented by a coin
// flip from `seed`. i beats j iff its MetricX, averaged over both
// translation directions, is strictly lower. Tokenizers and languages are
// those present in the fixture at `options.scale`.
// Throws kMissingValue for absent metrics or fixture cells and kDegenerate
// on an exact downstream tie.
std::vector<PairwiseExample> BuildPairwiseDataset(const MetricTable& metrics,
                                                  const DownstreamFixture& fixture,
                                                  const DatasetOptions& options);

enum class ModelKind { kLogistic, kLinearSvm, kRbfSvm };
std::string_view ToString(ModelKind kind);
// "logistic", "linsvm"/"linear-svm", "rbfsvm"/"rbf-svm".
ModelKind ParseModelKind(std::string_view name);

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // 1 where the training column is constant

  static Standardizer Fit(std::span<const PairwiseExample> examples);
  static Standardizer Identity(std::size_t dims);
  std::vector<double> Apply(std::span<const double> x) const;
};

// P(label = 1 | decision d) = sigmoid(a * d + b).
struct PlattScaling {
  double a = 1.0;
  double b = 0.0;

  double operator()(double decision) const;
};

// Platt's regularized maximum likelihood with smoothed targets
// (N+ + 1)/(N+ + 2) and 1/(N- + 2), solved by Newton with backtracking.
PlattScaling FitPlatt(std::span<const double> decisions,
                      std::span<const int> labels);

struct PairwiseModel {
  ModelKind kind = ModelKind::kLogistic;
  std::vector<std::string> feature_names;
  Standardizer standardizer;

  // Logistic: beta0. SVMs: decision bias.
  double intercept = 0.0;
  // Linear kinds, in standardized feature space.
  std::vector<double> weights;

  // RBF only; support vectors are standardized.
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> dual_coefficients;  // alpha_k * y_k
  double gamma = 0.0;

  // Required for SVM probabilities.
  std::optional<PlattScaling> platt;

  // Logistic: L2 strength lambda. SVMs: C.
  double regularization = 0.0;
  std::size_t iterations = 0;

  // Raw score: logit for logistic, signed margin for SVMs.
  double DecisionValue(std::span<const double> feature_diff) const;
  // 1 iff the decision value is positive.
  int Classify(std::span<const double> feature_diff) const;
};

// sigmoid(beta0 + w.x) for logistic models, Platt-calibrated otherwise.
// Throws kInvalidArgument on a dimension mismatch and kMissingValue for an
// SVM without calibration.
double PredictPair(const PairwiseModel& model,
                   std::span<const double> feature_diff);

struct FitOptions {
  std::size_t cv_folds = 5;
  // Logistic lambda, or SVM C.
  std::vector<double> regularization_grid = {0.01, 0.1, 1, 10, 100};
  std::vector<double> gamma_grid = {0.01, 0.1, 1, 10};
  std::size_t max_iterations = 10000;
  double gradient_tolerance = 1e-8;
  // Full-batch subgradient steps for the linear SVM.
  std::size_t svm_epochs = 10000;
  double smo_tolerance = 1e-6;
  std::size_t smo_max_iterations = 1000000;
};

// Minimizes sum_i logloss_i + (lambda / 2) |w|^2 (intercept unpenalized).
// Throws kNotConverged if the gradient norm stays above tolerance.
PairwiseModel FitLogisticFixed(std::span<const PairwiseExample> examples,
                               double lambda, const FitOptions& options = {});
// Minimizes (1 / (2C)) |w|^2 + mean hinge, bias as a constant feature.
// Calibrated with Platt on out-of-fold decision values.
PairwiseModel FitLinearSvmFixed(std::span<const PairwiseExample> examples,
                                double c, const FitOptions& options = {});
// Soft-margin dual with K(a, b) = exp(-gamma |a - b|^2), solved by SMO with
// maximal-violating-pair selection (ties to the lower index).
PairwiseModel FitRbfSvmFixed(std::span<const PairwiseExample> examples,
                             double c, double gamma,
                             const FitOptions& options = {});

// Hyperparameters by stratified k-fold CV on mean fold F1; ties go to the
// stronger regularization (and to the smaller gamma).
PairwiseModel FitLogistic(std::span<const PairwiseExample> examples,
                          const FitOptions& options = {});
PairwiseModel FitLinearSvm(std::span<const PairwiseExample> examples,
                           const FitOptions& options = {});
PairwiseModel FitRbfSvmPlatt(std::span<const PairwiseExample> examples,
                             const FitOptions& options = {});
PairwiseModel FitModel(ModelKind kind, std::span<const PairwiseExample> examples,
                       const FitOptions& options = {});

// Fold index per example: examples sorted stably by label, then dealt
// round-robin into min(k, n) folds.
std::vector<std::size_t> StratifiedFolds(std::span<const PairwiseExample> examples,
                                         std::size_t k);

struct EvaluationReport {
  ModelKind kind = ModelKind::kLogistic;
  std::vector<std::string> feature_set;
  std::uint64_t seed = 0;
  std::map<std::string, double> per_heldout;  // F1 per held-out tokenizer
  std::map<std::string, std::size_t> eval_sizes;
  std::map<std::string, std::size_t> train_sizes;
  std::map<std::string, double> chosen_regularization;
  double mean_f1 = 0.0;
};

// For each tokenizer T: train on the examples not involving T, report F1 on
// those that do. Requires at least 3 tokenizers.
EvaluationReport LeaveOneTokenizerOut(std::span<const PairwiseExample> dataset,
                                      ModelKind kind,
                                      const FitOptions& options = {});

// Symmetrized win probabilities for `tokenizers` on `language`:
// P[i][j] = (p(i over j) + 1 - p(j over i)) / 2.
ProbabilityMatrix PairwiseProbabilities(const PairwiseModel& model,
                                        const MetricTable& metrics,
                                        const std::vector<std::string>& tokenizers,
                                        const std::string& language,
                                        std::span<const Metric> features);

// For each language L: fit on the other languages' examples, emit the
// probability matrix over L's metric differences. Uses all five metrics
// unless `options.features` is non-empty.
std::map<std::string, ProbabilityMatrix> LeaveOneLanguageOut(
    const MetricTable& metrics, const DownstreamFixture& fixture,
    const DatasetOptions& options, ModelKind kind = ModelKind::kRbfSvm,
    const FitOptions& fit_options = {});

}  // namespace tokscope

#endif  // TOKSCOPE_PREDICTOR_H_
