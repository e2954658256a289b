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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.h"
#include "tokscope/error.h"
#include "tokscope/stats.h"

namespace tokscope {
namespace {

using oracle::MakeSyntheticWorld;

PairwiseExample Example(std::vector<double> features, int label) {
  PairwiseExample e;
  e.tok_i = "i";
  e.tok_j = "j";
  e.language = "xx";
  e.features = std::move(features);
  e.label = label;
  return e;
}

// Points on a line through the origin, labelled by sign, plus their mirror.
std::vector<PairwiseExample> SeparableLine(std::size_t n) {
  std::vector<PairwiseExample> out;
  for (std::size_t k = 1; k <= n; ++k) {
    const double x = static_cast<double>(k);
    out.push_back(Example({x, 0.3 * x}, 1));
    out.push_back(Example({-x, -0.3 * x}, 0));
  }
  return out;
}

std::vector<Metric> Compression() { return {Metric::kCompression}; }

TEST(DatasetTest, ShapeOnTheShippedLayout) {
  const auto world = MakeSyntheticWorld();
  DatasetOptions options;
  options.features = Compression();
  const auto data = BuildPairwiseDataset(world.metrics, world.fixture, options);
  // 15 unordered pairs in each of 4 languages.
  EXPECT_EQ(data.size(), 60u);
  for (const auto& tok : world.tokenizers) {
    const auto eval = std::count_if(data.begin(), data.end(),
                                    [&](const auto& e) { return e.Involves(tok); });
    EXPECT_EQ(eval, 20);
  }
}

TEST(DatasetTest, LabelFollowsMetricX) {
  const auto fixture = LoadDownstreamFixture(TOKSCOPE_FIXTURE_PATH);
  MetricTable metrics;
  for (const auto& tok : fixture.Tokenizers(ModelScale::k2_7B)) {
    MetricVector m;
    m.compression = 1000 + tok.size();
    metrics[{tok, "zh"}] = m;
  }
  DatasetOptions options;
  options.features = Compression();
  // Only zh has metrics; restrict the fixture to it.
  DownstreamFixture zh;
  for (const auto& tok : fixture.Tokenizers(ModelScale::k2_7B)) {
    for (Direction d : {Direction::kEnToXx, Direction::kXxToEn}) {
      const DownstreamKey key{tok, ModelScale::k2_7B, "zh", d};
      zh.Add(key, fixture.At(key));
    }
  }
  const auto data = BuildPairwiseDataset(metrics, zh, options);
  bool found = false;
  for (const auto& e : data) {
    if (e.Involves("Aya 23") && e.Involves("GPT-2")) {
      found = true;
      EXPECT_EQ(e.label, e.tok_i == "Aya 23" ? 1 : 0);
    }
  }
  EXPECT_TRUE(found);
}

TEST(DatasetTest, OrientationIsSeeded) {
  const auto world = MakeSyntheticWorld();
  DatasetOptions options;
  options.features = Compression();
  const auto a = BuildPairwiseDataset(world.metrics, world.fixture, options);
  const auto b = BuildPairwiseDataset(world.metrics, world.fixture, options);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].tok_i, b[k].tok_i);
    EXPECT_EQ(a[k].features, b[k].features);
  }
  int positives = 0;
  for (const auto& e : a) positives += e.label;
  EXPECT_GT(positives, 0);
  EXPECT_LT(positives, 60);
}

TEST(DatasetTest, FlipNegates) {
  const PairwiseExample e = Example({1.5, -2.0}, 1);
  const PairwiseExample f = Flip(e);
  EXPECT_EQ(f.features, (std::vector<double>{-1.5, 2.0}));
  EXPECT_EQ(f.label, 0);
  EXPECT_EQ(f.tok_i, "j");
  EXPECT_EQ(Flip(f).features, e.features);
}

TEST(DatasetTest, DownstreamTieRejected) {
  auto world = MakeSyntheticWorld(3, 1);
  DownstreamFixture tied;
  for (const auto& tok : world.tokenizers) {
    for (Direction d : {Direction::kEnToXx, Direction::kXxToEn}) {
      tied.Add({tok, ModelScale::k2_7B, "lang0", d}, {4.0, 30.0});
    }
  }
  DatasetOptions options;
  options.features = Compression();
  try {
    BuildPairwiseDataset(world.metrics, tied, options);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerate);
  }
}

TEST(DatasetTest, MissingMetric) {
  auto world = MakeSyntheticWorld(3, 1);
  world.metrics.begin()->second.auc.reset();
  DatasetOptions options;
  options.features = {Metric::kAuc};
  EXPECT_THROW(BuildPairwiseDataset(world.metrics, world.fixture, options), Error);
}

TEST(LogisticTest, SeparableData) {
  const auto data = SeparableLine(10);
  const PairwiseModel model = FitLogisticFixed(data, 0.1);
  for (const auto& e : data) EXPECT_EQ(model.Classify(e.features), e.label);
  EXPECT_GT(model.weights[0], 0.0);
}

TEST(LogisticTest, AllOnesPushesProbabilityUp) {
  std::vector<PairwiseExample> data;
  for (int k = 1; k <= 8; ++k) data.push_back(Example({static_cast<double>(k)}, 1));
  const PairwiseModel model = FitLogisticFixed(data, 1.0);
  for (const auto& e : data) EXPECT_GT(PredictPair(model, e.features), 0.5);
}

TEST(LogisticTest, SymmetricDataHasZeroIntercept) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 1);
  std::vector<PairwiseExample> data;
  for (int k = 0; k < 30; ++k) {
    const PairwiseExample e = Example({n(rng), n(rng)}, static_cast<int>(rng() % 2));
    data.push_back(e);
    data.push_back(Flip(e));
  }
  const PairwiseModel model = FitLogisticFixed(data, 0.5);
  EXPECT_NEAR(model.intercept, 0.0, 1e-6);
}

TEST(LinearSvmTest, SeparableData) {
  const auto data = SeparableLine(10);
  const PairwiseModel model = FitLinearSvmFixed(data, 10.0);
  for (const auto& e : data) EXPECT_EQ(model.Classify(e.features), e.label);
}

TEST(LinearSvmTest, DuplicatedDataGivesTheSameModel) {
  const auto data = SeparableLine(6);
  auto doubled = data;
  doubled.insert(doubled.end(), data.begin(), data.end());
  const PairwiseModel a = FitLinearSvmFixed(data, 1.0);
  // The hinge term is averaged, so duplicates leave the objective unchanged.
  const PairwiseModel b = FitLinearSvmFixed(doubled, 1.0);
  for (const auto& e : data) {
    EXPECT_NEAR(a.DecisionValue(e.features), b.DecisionValue(e.features), 1e-6);
  }
}

TEST(RbfSvmTest, SolvesXor) {
  std::vector<PairwiseExample> data;
  for (int sx : {-1, 1}) {
    for (int sy : {-1, 1}) {
      for (double r : {1.0, 1.5}) {
        data.push_back(Example({sx * r, sy * r}, sx * sy > 0 ? 1 : 0));
      }
    }
  }
  const PairwiseModel model = FitRbfSvmFixed(data, 100.0, 1.0);
  for (const auto& e : data) EXPECT_EQ(model.Classify(e.features), e.label);
}

TEST(RbfSvmTest, PlattProbabilitiesAreCalibratedAtZero) {
  std::vector<double> decisions;
  std::vector<int> labels;
  for (int k = 1; k <= 20; ++k) {
    const double d = 0.1 * k;
    decisions.push_back(d);
    labels.push_back(k % 4 == 0 ? 0 : 1);
    decisions.push_back(-d);
    labels.push_back(k % 4 == 0 ? 1 : 0);
  }
  const PlattScaling platt = FitPlatt(decisions, labels);
  EXPECT_NEAR(platt(0.0), 0.5, 1e-3);
  EXPECT_GT(platt(1.0), 0.5);
}

TEST(RbfSvmTest, ProbabilitiesAreInsideTheUnitInterval) {
  const auto world = MakeSyntheticWorld();
  DatasetOptions options;
  options.features = AllMetrics();
  const auto data = BuildPairwiseDataset(world.metrics, world.fixture, options);
  FitOptions fit;
  fit.regularization_grid = {1, 10};
  fit.gamma_grid = {0.1, 1};
  const PairwiseModel model = FitRbfSvmPlatt(data, fit);
  for (const auto& e : data) {
    const double p = PredictPair(model, e.features);
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
}

TEST(PredictPairTest, LogisticExamples) {
  PairwiseModel model;
  model.kind = ModelKind::kLogistic;
  model.standardizer = Standardizer::Identity(1);
  model.weights = {1.0};
  const std::vector<double> zero = {0.0};
  const std::vector<double> ln3 = {std::log(3.0)};
  EXPECT_DOUBLE_EQ(PredictPair(model, zero), 0.5);
  EXPECT_NEAR(PredictPair(model, ln3), 0.75, 1e-12);
  const std::vector<double> neg = {-std::log(3.0)};
  EXPECT_NEAR(PredictPair(model, ln3) + PredictPair(model, neg), 1.0, 1e-12);
}

TEST(PredictPairTest, Errors) {
  PairwiseModel svm;
  svm.kind = ModelKind::kLinearSvm;
  svm.standardizer = Standardizer::Identity(1);
  svm.weights = {1.0};
  const std::vector<double> x = {1.0};
  try {
    PredictPair(svm, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingValue);
  }
  const std::vector<double> wrong = {1.0, 2.0};
  EXPECT_THROW(svm.DecisionValue(wrong), Error);
}

TEST(PredictPairTest, MonotoneInTheInformativeFeature) {
  const auto data = SeparableLine(10);
  for (ModelKind kind : {ModelKind::kLogistic, ModelKind::kLinearSvm}) {
    const PairwiseModel model = FitModel(kind, data);
    double previous = -1;
    for (int k = -20; k <= 20; ++k) {
      const std::vector<double> x = {0.5 * k, 0.15 * k};
      const double p = PredictPair(model, x);
      EXPECT_GE(p, previous) << ToString(kind);
      previous = p;
    }
  }
}

TEST(StratifiedFoldsTest, BalancesClasses) {
  std::vector<PairwiseExample> data;
  for (int k = 0; k < 23; ++k) data.push_back(Example({1.0 * k}, k % 3 == 0 ? 1 : 0));
  const auto folds = StratifiedFolds(data, 5);
  ASSERT_EQ(folds.size(), data.size());
  for (std::size_t f = 0; f < 5; ++f) {
    int pos = 0, total = 0;
    for (std::size_t k = 0; k < data.size(); ++k) {
      if (folds[k] == f) {
        ++total;
        pos += data[k].label;
      }
    }
    EXPECT_GE(total, 4);
    EXPECT_GE(pos, 1);
  }
}

TEST(LeaveOneTokenizerOutTest, PartitionsTheDataset) {
  const auto world = MakeSyntheticWorld();
  DatasetOptions options;
  options.features = Compression();
  const auto data = BuildPairwiseDataset(world.metrics, world.fixture, options);
  const auto report = LeaveOneTokenizerOut(data, ModelKind::kLogistic);
  EXPECT_EQ(report.per_heldout.size(), 6u);
  for (const auto& tok : world.tokenizers) {
    EXPECT_EQ(report.eval_sizes.at(tok), 20u);
    EXPECT_EQ(report.train_sizes.at(tok), 40u);
  }
}

TEST(LeaveOneTokenizerOutTest, PerfectFeatureGivesPerfectF1) {
  const auto world = MakeSyntheticWorld();
  DatasetOptions options;
  options.features = Compression();
  const auto data = BuildPairwiseDataset(world.metrics, world.fixture, options);
  for (ModelKind kind : {ModelKind::kLogistic, ModelKind::kLinearSvm, ModelKind::kRbfSvm}) {
    const auto report = LeaveOneTokenizerOut(data, kind);
    for (const auto& [tok, f1] : report.per_heldout) {
      EXPECT_DOUBLE_EQ(f1, 1.0) << ToString(kind) << " " << tok;
    }
    EXPECT_DOUBLE_EQ(report.mean_f1, 1.0);
  }
}

TEST(LeaveOneTokenizerOutTest, Deterministic) {
  const auto world = MakeSyntheticWorld();
  DatasetOptions options;
  options.features = AllMetrics();
  options.seed = 11;
  const auto data = BuildPairwiseDataset(world.metrics, world.fixture, options);
  const auto a = LeaveOneTokenizerOut(data, ModelKind::kLinearSvm);
  const auto b = LeaveOneTokenizerOut(data, ModelKind::kLinearSvm);
  EXPECT_EQ(a.per_heldout, b.per_heldout);
  EXPECT_EQ(a.chosen_regularization, b.chosen_regularization);
}

TEST(LeaveOneTokenizerOutTest, TooFewTokenizers) {
  const auto world = MakeSyntheticWorld(2, 4);
  DatasetOptions options;
  options.features = Compression();
  const auto data = BuildPairwiseDataset(world.metrics, world.fixture, options);
  EXPECT_THROW(LeaveOneTokenizerOut(data, ModelKind::kLogistic), Error);
}

TEST(LeaveOneLanguageOutTest, SymmetrizedMatrices) {
  const auto world = MakeSyntheticWorld();
  DatasetOptions options;
  options.features = Compression();
  const auto matrices =
      LeaveOneLanguageOut(world.metrics, world.fixture, options, ModelKind::kLogistic);
  ASSERT_EQ(matrices.size(), 4u);
  for (const auto& [lang, m] : matrices) {
    ASSERT_EQ(m.size(), 6u);
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = i + 1; j < 6; ++j) {
        ++pairs;
        EXPECT_NEAR(m.at(i, j) + m.at(j, i), 1.0, 1e-12);
        EXPECT_GT(m.at(i, j), 0.0);
        EXPECT_LT(m.at(i, j), 1.0);
      }
    }
    EXPECT_EQ(pairs, 15u);
  }
}

TEST(LeaveOneLanguageOutTest, RecoversThePlantedOrder) {
  const auto world = MakeSyntheticWorld();
  DatasetOptions options;
  options.features = Compression();
  const auto matrices =
      LeaveOneLanguageOut(world.metrics, world.fixture, options, ModelKind::kLogistic);
  for (const auto& [lang, m] : matrices) {
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) {
        if (i == j) continue;
        const double ci = static_cast<double>(world.metrics.at({m.names()[i], lang}).compression);
        const double cj = static_cast<double>(world.metrics.at({m.names()[j], lang}).compression);
        // Fewer tokens means lower MetricX in the planted world.
        EXPECT_EQ(m.at(i, j) > 0.5, ci < cj) << lang;
      }
    }
  }
}

TEST(PairwiseProbabilitiesTest, TwoTokenizers) {
  const auto world = MakeSyntheticWorld(4, 2);
  DatasetOptions options;
  options.features = Compression();
  const auto data = BuildPairwiseDataset(world.metrics, world.fixture, options);
  const PairwiseModel model = FitLogistic(data);
  const auto m = PairwiseProbabilities(model, world.metrics, {"tok0", "tok1"}, "lang0",
                                       options.features);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_NEAR(m.at(0, 1) + m.at(1, 0), 1.0, 1e-12);
}

TEST(MetricNamesTest, RoundTrip) {
  for (Metric metric : AllMetrics()) EXPECT_EQ(ParseMetric(ToString(metric)), metric);
  EXPECT_EQ(ParseMetricList("compression,power_law").size(), 2u);
  EXPECT_THROW(ParseMetric("fertility"), Error);
  EXPECT_EQ(ParseModelKind(ToString(ModelKind::kRbfSvm)), ModelKind::kRbfSvm);
  EXPECT_THROW(ParseModelKind("tree"), Error);
}

}  // namespace
}  // namespace tokscope
