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

#include "tokscope/predictor.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include <Eigen/Dense>

#include "tokscope/error.h"
#include "tokscope/stats.h"

namespace tokscope {
namespace {

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(u)) without overflow.
double Softplus(double u) {
  return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)));
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void CheckExamples(std::span<const PairwiseExample> examples) {
  if (examples.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no training examples");
  }
  const std::size_t dims = examples.front().features.size();
  if (dims == 0) {
    throw Error(ErrorCode::kInvalidArgument, "examples have no features");
  }
  for (const auto& ex : examples) {
    if (ex.features.size() != dims) {
      throw Error(ErrorCode::kInvalidArgument,
                  "examples disagree on feature count");
    }
    for (double v : ex.features) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidArgument, "non-finite feature value");
      }
    }
    if (ex.label != 0 && ex.label != 1) {
      throw Error(ErrorCode::kInvalidArgument, "labels must be 0 or 1");
    }
  }
}

void RequireBothClasses(std::span<const PairwiseExample> examples,
                        std::size_t min_per_class) {
  std::size_t pos = 0;
  for (const auto& ex : examples) pos += ex.label;
  const std::size_t neg = examples.size() - pos;
  if (pos < min_per_class || neg < min_per_class) {
    throw Error(ErrorCode::kInvalidArgument,
                "single-class data: need at least " +
                    std::to_string(min_per_class) +
                    " examples of each label, got " + std::to_string(pos) +
                    " positive and " + std::to_string(neg) + " negative");
  }
}

std::vector<std::string> FeatureNamesOf(std::span<const PairwiseExample> examples) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < examples.front().features.size(); ++i) {
    names.push_back("x" + std::to_string(i));
  }
  return names;
}

std::vector<std::vector<double>> StandardizedRows(
    std::span<const PairwiseExample> examples, const Standardizer& s) {
  std::vector<std::vector<double>> rows;
  rows.reserve(examples.size());
  for (const auto& ex : examples) rows.push_back(s.Apply(ex.features));
  return rows;
}

double RbfKernel(std::span<const double> a, std::span<const double> b,
                 double gamma) {
  double d2 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

// Full-batch projected subgradient descent on
//   (lambda / 2) |w|^2 + mean_i max(0, 1 - s_i w.[x_i, 1]),  lambda = 1 / C,
// with step 1 / (lambda t). Returns the iterate with the lowest objective.
std::vector<double> SolveLinearSvm(const std::vector<std::vector<double>>& rows,
                                   std::span<const int> labels, double c,
                                   std::size_t epochs) {
  const std::size_t n = rows.size();
  const std::size_t d = rows.front().size() + 1;
  const double lambda = 1.0 / c;
  const double radius = 1.0 / std::sqrt(lambda);
  const auto augmented = [&](std::size_t i, std::size_t k) {
    return k + 1 == d ? 1.0 : rows[i][k];
  };
  const auto objective = [&](const std::vector<double>& w) {
    double hinge = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double m = 0;
      for (std::size_t k = 0; k < d; ++k) m += w[k] * augmented(i, k);
      hinge += std::max(0.0, 1.0 - (labels[i] ? 1.0 : -1.0) * m);
    }
    return lambda / 2 * Dot(w, w) + hinge / static_cast<double>(n);
  };

  std::vector<double> w(d, 0.0), best = w, grad(d);
  double best_objective = objective(w);
  for (std::size_t t = 1; t <= epochs; ++t) {
    for (std::size_t k = 0; k < d; ++k) grad[k] = lambda * w[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double s = labels[i] ? 1.0 : -1.0;
      double m = 0;
      for (std::size_t k = 0; k < d; ++k) m += w[k] * augmented(i, k);
      if (s * m < 1.0) {
        for (std::size_t k = 0; k < d; ++k) {
          grad[k] -= s * augmented(i, k) / static_cast<double>(n);
        }
      }
    }
    const double step = 1.0 / (lambda * static_cast<double>(t));
    for (std::size_t k = 0; k < d; ++k) w[k] -= step * grad[k];
    const double norm = std::sqrt(Dot(w, w));
    if (norm > radius) {
      for (double& v : w) v *= radius / norm;
    }
    const double obj = objective(w);
    if (obj < best_objective) {
      best_objective = obj;
      best = w;
    }
  }
  return best;
}

struct SmoSolution {
  std::vector<double> alpha;
  double rho = 0;
  std::size_t iterations = 0;
};

// Two-variable SMO on min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0, with
// Q_ij = y_i y_j K_ij.
SmoSolution SolveSmo(const std::vector<std::vector<double>>& kernel,
                     std::span<const int> labels, double c, double tolerance,
                     std::size_t max_iterations) {
  constexpr double kTau = 1e-12;
  const std::size_t n = kernel.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] ? 1.0 : -1.0;
  const auto q = [&](std::size_t i, std::size_t j) {
    return y[i] * y[j] * kernel[i][j];
  };

  SmoSolution sol;
  sol.alpha.assign(n, 0.0);
  std::vector<double>& alpha = sol.alpha;
  std::vector<double> grad(n, -1.0);
  const auto in_up = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0);
  };
  const auto in_low = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c);
  };

  for (; sol.iterations < max_iterations; ++sol.iterations) {
    std::size_t i = n, j = n;
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    if (i == n || j == n || gmax - gmin < tolerance) break;

    const double old_i = alpha[i];
    const double old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = kernel[i][i] + kernel[j][j] + 2 * q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = kernel[i][i] + kernel[j][j] - 2 * q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += q(t, i) * di + q(t, j) * dj;
    }
  }

  // Bias from free vectors, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= c) {
      if (y[t] < 0) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  sol.rho = n_free ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2;
  return sol;
}

std::vector<int> LabelsOf(std::span<const PairwiseExample> examples) {
  std::vector<int> labels;
  labels.reserve(examples.size());
  for (const auto& ex : examples) labels.push_back(ex.label);
  return labels;
}

PairwiseModel FitLinearSvmCore(std::span<const PairwiseExample> examples,
                               double c, const FitOptions& options) {
  CheckExamples(examples);
  if (!(c > 0)) throw Error(ErrorCode::kInvalidArgument, "C must be positive");
  PairwiseModel model;
  model.kind = ModelKind::kLinearSvm;
  model.feature_names = FeatureNamesOf(examples);
  model.standardizer = Standardizer::Fit(examples);
  model.regularization = c;
  const auto rows = StandardizedRows(examples, model.standardizer);
  const auto labels = LabelsOf(examples);
  std::vector<double> w = SolveLinearSvm(rows, labels, c, options.svm_epochs);
  model.intercept = w.back();
  w.pop_back();
  model.weights = std::move(w);
  model.iterations = options.svm_epochs;
  return model;
}

PairwiseModel FitRbfCore(std::span<const PairwiseExample> examples, double c,
                         double gamma, const FitOptions& options) {
  CheckExamples(examples);
  RequireBothClasses(examples, 1);
  if (!(c > 0) || !(gamma > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "C and gamma must be positive");
  }
  PairwiseModel model;
  model.kind = ModelKind::kRbfSvm;
  model.feature_names = FeatureNamesOf(examples);
  model.standardizer = Standardizer::Fit(examples);
  model.regularization = c;
  model.gamma = gamma;
  const auto rows = StandardizedRows(examples, model.standardizer);
  const auto labels = LabelsOf(examples);
  const std::size_t n = rows.size();
  std::vector<std::vector<double>> kernel(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      kernel[i][j] = RbfKernel(rows[i], rows[j], gamma);
    }
  }
  const SmoSolution sol = SolveSmo(kernel, labels, c, options.smo_tolerance,
                                   options.smo_max_iterations);
  for (std::size_t i = 0; i < n; ++i) {
    if (sol.alpha[i] > 0) {
      model.support_vectors.push_back(rows[i]);
      model.dual_coefficients.push_back(sol.alpha[i] * (labels[i] ? 1.0 : -1.0));
    }
  }
  model.intercept = -sol.rho;
  model.iterations = sol.iterations;
  return model;
}

template <typename Fit>
std::vector<double> OutOfFoldDecisions(std::span<const PairwiseExample> examples,
                                       std::size_t k, Fit fit) {
  const auto folds = StratifiedFolds(examples, k);
  const std::size_t n_folds = *std::max_element(folds.begin(), folds.end()) + 1;
  std::vector<double> decisions(examples.size());
  for (std::size_t f = 0; f < n_folds; ++f) {
    std::vector<PairwiseExample> train;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (folds[i] != f) train.push_back(examples[i]);
    }
    const PairwiseModel model = fit(std::span<const PairwiseExample>(train));
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (folds[i] == f) decisions[i] = model.DecisionValue(examples[i].features);
    }
  }
  return decisions;
}

template <typename Fit>
double CrossValidatedF1(std::span<const PairwiseExample> examples,
                        std::size_t k, Fit fit) {
  const auto folds = StratifiedFolds(examples, k);
  const std::size_t n_folds = *std::max_element(folds.begin(), folds.end()) + 1;
  double total = 0;
  for (std::size_t f = 0; f < n_folds; ++f) {
    std::vector<PairwiseExample> train;
    std::vector<int> predicted, actual;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (folds[i] != f) train.push_back(examples[i]);
    }
    const PairwiseModel model = fit(std::span<const PairwiseExample>(train));
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (folds[i] == f) {
        predicted.push_back(model.Classify(examples[i].features));
        actual.push_back(examples[i].label);
      }
    }
    total += stats::F1Score(predicted, actual);
  }
  return total / static_cast<double>(n_folds);
}

// Keeps the first candidate unless a later one is strictly better.
constexpr double kScoreEpsilon = 1e-12;

}  // namespace

std::string_view ToString(Metric metric) {
  switch (metric) {
    case Metric::kCompression:
      return "compression";
    case Metric::kCardinality:
      return "cardinality";
    case Metric::kAuc:
      return "auc";
    case Metric::kSlope:
      return "slope";
    case Metric::kPowerLaw:
      return "power_law";
  }
  return "?";
}

Metric ParseMetric(std::string_view name) {
  if (name == "compression") return Metric::kCompression;
  if (name == "cardinality" || name == "c") return Metric::kCardinality;
  if (name == "auc") return Metric::kAuc;
  if (name == "slope" || name == "s") return Metric::kSlope;
  if (name == "power_law" || name == "power-law" || name == "powerlaw" ||
      name == "p") {
    return Metric::kPowerLaw;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown metric '" + std::string(name) + "'");
}

std::vector<Metric> ParseMetricList(std::string_view comma_separated) {
  std::vector<Metric> metrics;
  std::size_t start = 0;
  while (start <= comma_separated.size()) {
    std::size_t end = comma_separated.find(',', start);
    if (end == std::string_view::npos) end = comma_separated.size();
    std::string_view item = comma_separated.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      const Metric m = ParseMetric(item);
      if (std::find(metrics.begin(), metrics.end(), m) != metrics.end()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "metric '" + std::string(item) + "' listed twice");
      }
      metrics.push_back(m);
    }
    start = end + 1;
  }
  if (metrics.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty feature list");
  }
  return metrics;
}

const std::vector<Metric>& AllMetrics() {
  static const std::vector<Metric> all = {Metric::kCompression,
                                          Metric::kCardinality, Metric::kAuc,
                                          Metric::kSlope, Metric::kPowerLaw};
  return all;
}

std::vector<std::string> MetricNames(std::span<const Metric> metrics) {
  std::vector<std::string> names;
  for (Metric m : metrics) names.emplace_back(ToString(m));
  return names;
}

double MetricValue(const MetricVector& metrics, Metric metric) {
  std::optional<double> value;
  switch (metric) {
    case Metric::kCompression:
      return static_cast<double>(metrics.compression);
    case Metric::kCardinality:
      return static_cast<double>(metrics.cardinality);
    case Metric::kAuc:
      value = metrics.auc;
      break;
    case Metric::kSlope:
      value = metrics.slope;
      break;
    case Metric::kPowerLaw:
      value = metrics.power_law;
      break;
  }
  if (!value) {
    throw Error(ErrorCode::kMissingValue,
                "metric '" + std::string(ToString(metric)) +
                    "' is undefined for this stream (curve too short)");
  }
  return *value;
}

PairwiseExample Flip(const PairwiseExample& example) {
  PairwiseExample flipped = example;
  std::swap(flipped.tok_i, flipped.tok_j);
  for (double& v : flipped.features) v = -v;
  flipped.label = 1 - example.label;
  return flipped;
}

std::vector<double> FeatureDifference(const MetricTable& metrics,
                                      const std::string& tok_i,
                                      const std::string& tok_j,
                                      const std::string& language,
                                      std::span<const Metric> features) {
  const auto lookup = [&](const std::string& tok) -> const MetricVector& {
    auto it = metrics.find({tok, language});
    if (it == metrics.end()) {
      throw Error(ErrorCode::kMissingValue,
                  "no metrics for tokenizer '" + tok + "' on language '" +
                      language + "'");
    }
    return it->second;
  };
  const MetricVector& a = lookup(tok_i);
  const MetricVector& b = lookup(tok_j);
  std::vector<double> diff;
  diff.reserve(features.size());
  for (Metric m : features) diff.push_back(MetricValue(a, m) - MetricValue(b, m));
  return diff;
}

std::vector<PairwiseExample> BuildPairwiseDataset(const MetricTable& metrics,
                                                  const DownstreamFixture& fixture,
                                                  const DatasetOptions& options) {
  if (options.features.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty feature list");
  }
  const auto tokenizers = fixture.Tokenizers(options.scale);
  const auto languages = fixture.Languages(options.scale);
  if (tokenizers.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "fixture needs at least two tokenizers at scale " +
                    std::string(ToString(options.scale)));
  }
  std::mt19937_64 rng(options.seed);
  std::vector<PairwiseExample> dataset;
  for (const auto& language : languages) {
    for (std::size_t a = 0; a < tokenizers.size(); ++a) {
      for (std::size_t b = a + 1; b < tokenizers.size(); ++b) {
        const bool swap = (rng() >> 63) != 0;
        const std::string& tok_i = swap ? tokenizers[b] : tokenizers[a];
        const std::string& tok_j = swap ? tokenizers[a] : tokenizers[b];
        const double score_i = fixture.MeanMetricX(tok_i, options.scale, language);
        const double score_j = fixture.MeanMetricX(tok_j, options.scale, language);
        if (score_i == score_j) {
          throw Error(ErrorCode::kDegenerate,
                      "downstream tie between '" + tok_i + "' and '" + tok_j +
                          "' on " + language);
        }
        PairwiseExample ex;
        ex.tok_i = tok_i;
        ex.tok_j = tok_j;
        ex.language = language;
        ex.features =
            FeatureDifference(metrics, tok_i, tok_j, language, options.features);
        ex.label = score_i < score_j ? 1 : 0;
        dataset.push_back(std::move(ex));
      }
    }
  }
  return dataset;
}

std::string_view ToString(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogistic:
      return "logistic";
    case ModelKind::kLinearSvm:
      return "linsvm";
    case ModelKind::kRbfSvm:
      return "rbfsvm";
  }
  return "?";
}

ModelKind ParseModelKind(std::string_view name) {
  if (name == "logistic") return ModelKind::kLogistic;
  if (name == "linsvm" || name == "linear-svm" || name == "linear_svm") {
    return ModelKind::kLinearSvm;
  }
  if (name == "rbfsvm" || name == "rbf-svm" || name == "rbf_svm") {
    return ModelKind::kRbfSvm;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown model kind '" + std::string(name) +
                  "' (expected logistic, linsvm or rbfsvm)");
}

Standardizer Standardizer::Fit(std::span<const PairwiseExample> examples) {
  const std::size_t d = examples.front().features.size();
  const double n = static_cast<double>(examples.size());
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  for (const auto& ex : examples) {
    for (std::size_t k = 0; k < d; ++k) s.mean[k] += ex.features[k];
  }
  for (double& m : s.mean) m /= n;
  for (std::size_t k = 0; k < d; ++k) {
    double var = 0;
    for (const auto& ex : examples) {
      const double dv = ex.features[k] - s.mean[k];
      var += dv * dv;
    }
    const double sd = std::sqrt(var / n);
    if (sd > 0 && std::isfinite(sd)) s.scale[k] = sd;
  }
  return s;
}

Standardizer Standardizer::Identity(std::size_t dims) {
  return Standardizer{std::vector<double>(dims, 0.0),
                      std::vector<double>(dims, 1.0)};
}

std::vector<double> Standardizer::Apply(std::span<const double> x) const {
  std::vector<double> z(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) z[k] = (x[k] - mean[k]) / scale[k];
  return z;
}

double PlattScaling::operator()(double decision) const {
  return Sigmoid(a * decision + b);
}

PlattScaling FitPlatt(std::span<const double> decisions,
                      std::span<const int> labels) {
  if (decisions.size() != labels.size() || decisions.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "platt scaling needs matching, non-empty inputs");
  }
  // Newton's method with backtracking on the smoothed-target log loss, in
  // the parameterization P = 1 / (1 + exp(A f + B)).
  constexpr int kMaxIterations = 100;
  constexpr double kMinStep = 1e-10;
  constexpr double kSigma = 1e-12;
  constexpr double kEps = 1e-5;
  double prior1 = 0, prior0 = 0;
  for (int y : labels) (y ? prior1 : prior0) += 1;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  const std::size_t n = decisions.size();
  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = labels[i] ? hi : lo;

  const auto loss = [&](double A, double B) {
    double f = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = decisions[i] * A + B;
      f += z >= 0 ? target[i] * z + std::log1p(std::exp(-z))
                  : (target[i] - 1) * z + std::log1p(std::exp(z));
    }
    return f;
  };
  double A = 0.0;
  double B = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = loss(A, B);
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0, g1 = 0, g2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = decisions[i] * A + B;
      double p, q;
      if (z >= 0) {
        p = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        p = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = p * q;
      h11 += decisions[i] * decisions[i] * d2;
      h22 += d2;
      h21 += decisions[i] * d2;
      const double d1 = target[i] - p;
      g1 += decisions[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kEps && std::abs(g2) < kEps) break;
    const double det = h11 * h22 - h21 * h21;
    const double dA = -(h22 * g1 - h21 * g2) / det;
    const double dB = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * dA + g2 * dB;
    double step = 1.0;
    while (step >= kMinStep) {
      const double newA = A + step * dA;
      const double newB = B + step * dB;
      const double newf = loss(newA, newB);
      if (newf < fval + 1e-4 * step * gd) {
        A = newA;
        B = newB;
        fval = newf;
        break;
      }
      step /= 2;
    }
    if (step < kMinStep) break;
  }
  return PlattScaling{-A, -B};
}

double PairwiseModel::DecisionValue(std::span<const double> feature_diff) const {
  if (feature_diff.size() != standardizer.mean.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "feature vector has " + std::to_string(feature_diff.size()) +
                    " entries, model expects " +
                    std::to_string(standardizer.mean.size()));
  }
  const std::vector<double> z = standardizer.Apply(feature_diff);
  if (kind == ModelKind::kRbfSvm) {
    double sum = intercept;
    for (std::size_t k = 0; k < support_vectors.size(); ++k) {
      sum += dual_coefficients[k] * RbfKernel(support_vectors[k], z, gamma);
    }
    return sum;
  }
  return intercept + Dot(weights, z);
}

int PairwiseModel::Classify(std::span<const double> feature_diff) const {
  return DecisionValue(feature_diff) > 0 ? 1 : 0;
}

double PredictPair(const PairwiseModel& model,
                   std::span<const double> feature_diff) {
  const double d = model.DecisionValue(feature_diff);
  if (model.kind == ModelKind::kLogistic) return Sigmoid(d);
  if (!model.platt) {
    throw Error(ErrorCode::kMissingValue,
                "SVM model has no Platt calibration; cannot emit probabilities");
  }
  return (*model.platt)(d);
}

std::vector<std::size_t> StratifiedFolds(std::span<const PairwiseExample> examples,
                                         std::size_t k) {
  if (examples.size() < 2 || k < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "cross-validation needs at least 2 examples and 2 folds");
  }
  const std::size_t folds = std::min(k, examples.size());
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return examples[a].label < examples[b].label;
  });
  std::vector<std::size_t> assignment(examples.size());
  for (std::size_t r = 0; r < order.size(); ++r) assignment[order[r]] = r % folds;
  return assignment;
}

PairwiseModel FitLogisticFixed(std::span<const PairwiseExample> examples,
                               double lambda, const FitOptions& options) {
  CheckExamples(examples);
  if (!(lambda >= 0)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must be non-negative");
  }
  PairwiseModel model;
  model.kind = ModelKind::kLogistic;
  model.feature_names = FeatureNamesOf(examples);
  model.standardizer = Standardizer::Fit(examples);
  model.regularization = lambda;
  const auto rows = StandardizedRows(examples, model.standardizer);
  const std::size_t n = rows.size();
  const std::size_t d = rows.front().size() + 1;  // intercept first

  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (std::size_t k = 1; k < d; ++k) x(i, k) = rows[i][k - 1];
    y(i) = examples[i].label;
  }
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d, lambda);
  penalty(0) = 0.0;

  const auto objective = [&](const Eigen::VectorXd& theta) {
    const Eigen::VectorXd z = x * theta;
    double f = 0;
    for (std::size_t i = 0; i < n; ++i) {
      f += Softplus(y(i) > 0 ? -z(i) : z(i));
    }
    return f + 0.5 * theta.cwiseProduct(penalty).dot(theta);
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
  double f = objective(theta);
  bool converged = false;
  std::size_t it = 0;
  for (; it < options.max_iterations; ++it) {
    const Eigen::VectorXd z = x * theta;
    Eigen::VectorXd p(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      p(i) = Sigmoid(z(i));
      w(i) = p(i) * Sigmoid(-z(i));
    }
    const Eigen::VectorXd grad =
        x.transpose() * (p - y) + theta.cwiseProduct(penalty);
    if (grad.norm() < options.gradient_tolerance) {
      converged = true;
      break;
    }
    Eigen::MatrixXd hessian = x.transpose() * w.asDiagonal() * x;
    hessian.diagonal() += penalty;
    hessian.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = hessian.ldlt().solve(-grad);
    const double slope = grad.dot(step);
    // Half the squared Newton decrement bounds the remaining suboptimality;
    // below rounding level no line search can make progress.
    if (-slope / 2 <= 1e-15 * (1.0 + std::abs(f))) {
      converged = true;
      break;
    }
    double t = 1.0;
    bool accepted = false;
    while (t > 1e-14) {
      const Eigen::VectorXd candidate = theta + t * step;
      const double fc = objective(candidate);
      if (fc <= f + 1e-4 * t * slope) {
        theta = candidate;
        f = fc;
        accepted = true;
        break;
      }
      t /= 2;
    }
    if (!accepted) break;
  }
  if (!converged) {
    throw Error(ErrorCode::kNotConverged,
                "logistic regression did not reach gradient norm " +
                    std::to_string(options.gradient_tolerance) + " within " +
                    std::to_string(options.max_iterations) + " iterations");
  }
  model.intercept = theta(0);
  model.weights.assign(theta.data() + 1, theta.data() + d);
  model.iterations = it;
  return model;
}

PairwiseModel FitLinearSvmFixed(std::span<const PairwiseExample> examples,
                                double c, const FitOptions& options) {
  PairwiseModel model = FitLinearSvmCore(examples, c, options);
  const auto decisions = OutOfFoldDecisions(
      examples, options.cv_folds, [&](std::span<const PairwiseExample> train) {
        return FitLinearSvmCore(train, c, options);
      });
  model.platt = FitPlatt(decisions, LabelsOf(examples));
  return model;
}

PairwiseModel FitRbfSvmFixed(std::span<const PairwiseExample> examples,
                             double c, double gamma,
                             const FitOptions& options) {
  CheckExamples(examples);
  RequireBothClasses(examples, 2);
  PairwiseModel model = FitRbfCore(examples, c, gamma, options);
  const auto decisions = OutOfFoldDecisions(
      examples, options.cv_folds, [&](std::span<const PairwiseExample> train) {
        return FitRbfCore(train, c, gamma, options);
      });
  model.platt = FitPlatt(decisions, LabelsOf(examples));
  return model;
}

PairwiseModel FitLogistic(std::span<const PairwiseExample> examples,
                          const FitOptions& options) {
  CheckExamples(examples);
  std::vector<double> grid = options.regularization_grid;
  std::sort(grid.rbegin(), grid.rend());  // strongest first
  double best_lambda = grid.front();
  double best_score = -1;
  for (double lambda : grid) {
    const double score = CrossValidatedF1(
        examples, options.cv_folds, [&](std::span<const PairwiseExample> train) {
          return FitLogisticFixed(train, lambda, options);
        });
    if (score > best_score + kScoreEpsilon) {
      best_score = score;
      best_lambda = lambda;
    }
  }
  return FitLogisticFixed(examples, best_lambda, options);
}

PairwiseModel FitLinearSvm(std::span<const PairwiseExample> examples,
                           const FitOptions& options) {
  CheckExamples(examples);
  std::vector<double> grid = options.regularization_grid;
  std::sort(grid.begin(), grid.end());  // smallest C is strongest
  double best_c = grid.front();
  double best_score = -1;
  for (double c : grid) {
    const double score = CrossValidatedF1(
        examples, options.cv_folds, [&](std::span<const PairwiseExample> train) {
          return FitLinearSvmCore(train, c, options);
        });
    if (score > best_score + kScoreEpsilon) {
      best_score = score;
      best_c = c;
    }
  }
  return FitLinearSvmFixed(examples, best_c, options);
}

PairwiseModel FitRbfSvmPlatt(std::span<const PairwiseExample> examples,
                             const FitOptions& options) {
  CheckExamples(examples);
  RequireBothClasses(examples, 2);
  std::vector<double> c_grid = options.regularization_grid;
  std::vector<double> gamma_grid = options.gamma_grid;
  std::sort(c_grid.begin(), c_grid.end());
  std::sort(gamma_grid.begin(), gamma_grid.end());
  double best_c = c_grid.front();
  double best_gamma = gamma_grid.front();
  double best_score = -1;
  for (double c : c_grid) {
    for (double gamma : gamma_grid) {
      const double score = CrossValidatedF1(
          examples, options.cv_folds,
          [&](std::span<const PairwiseExample> train) {
            return FitRbfCore(train, c, gamma, options);
          });
      if (score > best_score + kScoreEpsilon) {
        best_score = score;
        best_c = c;
        best_gamma = gamma;
      }
    }
  }
  return FitRbfSvmFixed(examples, best_c, best_gamma, options);
}

PairwiseModel FitModel(ModelKind kind, std::span<const PairwiseExample> examples,
                       const FitOptions& options) {
  switch (kind) {
    case ModelKind::kLogistic:
      return FitLogistic(examples, options);
    case ModelKind::kLinearSvm:
      return FitLinearSvm(examples, options);
    case ModelKind::kRbfSvm:
      return FitRbfSvmPlatt(examples, options);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown model kind");
}

EvaluationReport LeaveOneTokenizerOut(std::span<const PairwiseExample> dataset,
                                      ModelKind kind, const FitOptions& options) {
  std::set<std::string> tokenizers;
  for (const auto& ex : dataset) {
    tokenizers.insert(ex.tok_i);
    tokenizers.insert(ex.tok_j);
  }
  if (tokenizers.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "leave-one-tokenizer-out needs at least 3 tokenizers");
  }
  EvaluationReport report;
  report.kind = kind;
  double total = 0;
  for (const auto& held_out : tokenizers) {
    std::vector<PairwiseExample> train, eval;
    for (const auto& ex : dataset) {
      (ex.Involves(held_out) ? eval : train).push_back(ex);
    }
    const PairwiseModel model = FitModel(kind, train, options);
    std::vector<int> predicted, actual;
    for (const auto& ex : eval) {
      predicted.push_back(model.Classify(ex.features));
      actual.push_back(ex.label);
    }
    const double f1 = stats::F1Score(predicted, actual);
    report.per_heldout[held_out] = f1;
    report.eval_sizes[held_out] = eval.size();
    report.train_sizes[held_out] = train.size();
    report.chosen_regularization[held_out] = model.regularization;
    total += f1;
  }
  report.mean_f1 = total / static_cast<double>(tokenizers.size());
  return report;
}

ProbabilityMatrix PairwiseProbabilities(const PairwiseModel& model,
                                        const MetricTable& metrics,
                                        const std::vector<std::string>& tokenizers,
                                        const std::string& language,
                                        std::span<const Metric> features) {
  ProbabilityMatrix matrix(tokenizers);
  for (std::size_t i = 0; i < tokenizers.size(); ++i) {
    for (std::size_t j = i + 1; j < tokenizers.size(); ++j) {
      const auto forward =
          FeatureDifference(metrics, tokenizers[i], tokenizers[j], language, features);
      std::vector<double> backward(forward.size());
      for (std::size_t k = 0; k < forward.size(); ++k) backward[k] = -forward[k];
      const double p_ij = PredictPair(model, forward);
      const double p_ji = PredictPair(model, backward);
      matrix.SetPair(i, j, (p_ij + 1.0 - p_ji) / 2.0);
    }
  }
  return matrix;
}

std::map<std::string, ProbabilityMatrix> LeaveOneLanguageOut(
    const MetricTable& metrics, const DownstreamFixture& fixture,
    const DatasetOptions& options, ModelKind kind,
    const FitOptions& fit_options) {
  DatasetOptions dataset_options = options;
  if (dataset_options.features.empty()) dataset_options.features = AllMetrics();
  const auto dataset = BuildPairwiseDataset(metrics, fixture, dataset_options);
  const auto languages = fixture.Languages(options.scale);
  if (languages.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "leave-one-language-out needs at least 2 languages");
  }
  const auto tokenizers = fixture.Tokenizers(options.scale);
  std::map<std::string, ProbabilityMatrix> result;
  for (const auto& held_out : languages) {
    std::vector<PairwiseExample> train;
    for (const auto& ex : dataset) {
      if (ex.language != held_out) train.push_back(ex);
    }
    const PairwiseModel model = FitModel(kind, train, fit_options);
    result.emplace(held_out,
                   PairwiseProbabilities(model, metrics, tokenizers, held_out,
                                         dataset_options.features));
  }
  return result;
}

}  // namespace tokscope
