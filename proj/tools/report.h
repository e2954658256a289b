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

// JSON and CSV encodings of tokscope results.

#ifndef TOKSCOPE_TOOLS_REPORT_H_
#define TOKSCOPE_TOOLS_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tokscope/predictor.h"
#include "tokscope/ranking.h"
#include "tokscope/stats.h"
#include "tokscope/zipf_metrics.h"

namespace tokscope::report {

using Json = nlohmann::ordered_json;

struct Metadata {
  std::string command;
  std::uint64_t seed = 0;
  double truncation_bound = kDefaultTruncationBound;
  bool timestamp = true;
};

// {tool, version, command, seed, log_base, truncation_bound, simpson_grid
// [, timestamp]}.
Json MetadataJson(const Metadata& metadata);

Json ToJson(const MetricVector& metrics);
// Reads the "metrics" object written by ToJson (or a bare metric object).
MetricVector MetricVectorFromJson(const Json& json);

Json ToJson(const stats::CorrelationResult& result);
Json ToJson(const EvaluationReport& report);
Json ToJson(const Ranking& ranking);
Json ToJson(const BTRatings& ratings);

// Off-diagonal compared cells as {"i|j": p}.
Json ToJson(const ProbabilityMatrix& matrix);
// Accepts {"i|j": p, ...} or an object with such a map under
// "probabilities". Names are sorted; every name must be free of '|'.
ProbabilityMatrix ProbabilityMatrixFromJson(const Json& json);

// A directory of metric JSON files (each carrying "tokenizer" and
// "language"), or a CSV with header
// tokenizer,language,compression,cardinality,auc,slope,power_law.
MetricTable LoadMetricTable(const std::filesystem::path& path);

// Two numeric columns of a headed CSV, by name. Diagnostics carry the file
// and line.
std::pair<std::vector<double>, std::vector<double>> ReadCsvColumns(
    const std::filesystem::path& path, const std::string& x_column,
    const std::string& y_column);

// rank,count,log_rank,log_count for every ranked token (untruncated).
void WriteCurveCsv(std::ostream& out, const TokenFrequencyTable& table);

// Two-space indented JSON plus a trailing newline.
std::string Dump(const Json& json);

}  // namespace tokscope::report

#endif  // TOKSCOPE_TOOLS_REPORT_H_
