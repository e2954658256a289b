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

#include "report.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <ostream>
#include <set>
#include <sstream>

#include "tokscope/error.h"

namespace tokscope::report {
namespace {

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json OptionalNumber(const std::optional<double>& value) {
  if (!value || !std::isfinite(*value)) return nullptr;
  return *value;
}

std::optional<double> ReadOptional(const Json& json, const char* key) {
  auto it = json.find(key);
  if (it == json.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    throw Error(ErrorCode::kParse,
                std::string("metric '") + key + "' must be a number or null");
  }
  return it->get<double>();
}

Json ParseJson(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source, e.byte, e.what());
  }
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::optional<double> ParseCsvNumber(const std::string& text,
                                     const std::string& source,
                                     std::size_t line) {
  if (text.empty() || text == "null" || text == "NA") return std::nullopt;
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(source, line, "line " + std::to_string(line) +
                                       ": not a number: '" + text + "'");
  }
  return value;
}

MetricTable LoadMetricCsv(const std::filesystem::path& path) {
  const std::string source = path.string();
  std::istringstream in(ReadFile(path));
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(source, 0, "empty metric table");
  }
  const auto header = SplitCsvLine(line);
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto tok_col = column("tokenizer");
  const auto lang_col = column("language");
  if (!tok_col || !lang_col) {
    throw ParseError(source, 0, "header must name 'tokenizer' and 'language'");
  }
  MetricTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = SplitCsvLine(line);
    if (fields.size() != header.size()) {
      throw ParseError(source, line_no,
                       "line " + std::to_string(line_no) + ": expected " +
                           std::to_string(header.size()) + " fields");
    }
    auto field = [&](const char* name) -> std::optional<double> {
      const auto col = column(name);
      if (!col) return std::nullopt;
      return ParseCsvNumber(fields[*col], source, line_no);
    };
    MetricVector m;
    m.compression = static_cast<std::uint64_t>(field("compression").value_or(0));
    m.cardinality = static_cast<std::uint64_t>(field("cardinality").value_or(0));
    m.auc = field("auc");
    m.slope = field("slope");
    m.power_law = field("power_law");
    m.intercept = field("intercept");
    MetricKey key{fields[*tok_col], fields[*lang_col]};
    if (!table.emplace(key, m).second) {
      throw Error(ErrorCode::kDuplicateKey,
                  source + ":" + std::to_string(line_no) + ": duplicate metrics for (" +
                      key.tokenizer + ", " + key.language + ")");
    }
  }
  return table;
}

}  // namespace

Json MetadataJson(const Metadata& metadata) {
  Json json;
  json["tool"] = "tokscope";
  json["version"] = TOKSCOPE_VERSION;
  json["command"] = metadata.command;
  json["seed"] = metadata.seed;
  json["log_base"] = "e";
  if (std::isfinite(metadata.truncation_bound)) {
    json["truncation_bound"] = metadata.truncation_bound;
  } else {
    json["truncation_bound"] = nullptr;
  }
  json["simpson_grid"] = kSimpsonGridPoints;
  if (metadata.timestamp) json["timestamp"] = UtcTimestamp();
  return json;
}

Json ToJson(const MetricVector& metrics) {
  Json json;
  json["compression"] = metrics.compression;
  json["cardinality"] = metrics.cardinality;
  json["auc"] = OptionalNumber(metrics.auc);
  json["slope"] = OptionalNumber(metrics.slope);
  json["power_law"] = OptionalNumber(metrics.power_law);
  json["intercept"] = OptionalNumber(metrics.intercept);
  json["curve_points"] = metrics.curve_points;
  return json;
}

MetricVector MetricVectorFromJson(const Json& json) {
  const Json& m = json.contains("metrics") ? json.at("metrics") : json;
  if (!m.is_object()) {
    throw Error(ErrorCode::kParse, "metric record must be a JSON object");
  }
  MetricVector out;
  try {
    out.compression = m.value("compression", std::uint64_t{0});
    out.cardinality = m.value("cardinality", std::uint64_t{0});
    out.curve_points = m.value("curve_points", std::size_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  out.auc = ReadOptional(m, "auc");
  out.slope = ReadOptional(m, "slope");
  out.power_law = ReadOptional(m, "power_law");
  out.intercept = ReadOptional(m, "intercept");
  if (json.contains("metadata")) {
    const Json& meta = json.at("metadata");
    auto it = meta.find("truncation_bound");
    if (it != meta.end()) {
      out.truncation_bound = it->is_null()
                                 ? std::numeric_limits<double>::infinity()
                                 : it->get<double>();
    }
  }
  return out;
}

Json ToJson(const stats::CorrelationResult& result) {
  Json json;
  json["method"] = std::string(stats::ToString(result.kind));
  json["coefficient"] = result.coefficient;
  json["p_value"] = result.p_value;
  json["p_greater"] = result.p_greater;
  json["p_less"] = result.p_less;
  json["n"] = result.n;
  json["exact"] = result.exact;
  return json;
}

Json ToJson(const EvaluationReport& report) {
  Json json;
  json["model"] = std::string(ToString(report.kind));
  json["features"] = report.feature_set;
  json["seed"] = report.seed;
  json["mean_f1"] = report.mean_f1;
  Json heldout = Json::object();
  for (const auto& [tok, f1] : report.per_heldout) {
    Json entry;
    entry["f1"] = f1;
    entry["eval_size"] = report.eval_sizes.at(tok);
    entry["train_size"] = report.train_sizes.at(tok);
    entry["regularization"] = report.chosen_regularization.at(tok);
    heldout[tok] = std::move(entry);
  }
  json["per_heldout"] = std::move(heldout);
  return json;
}

Json ToJson(const Ranking& ranking) {
  Json json;
  json["ordered"] = ranking.ordered;
  json["scores"] = ranking.scores;
  json["higher_is_better"] = ranking.higher_is_better;
  return json;
}

Json ToJson(const BTRatings& ratings) {
  Json json;
  Json lambda = Json::object();
  for (std::size_t i = 0; i < ratings.names.size(); ++i) {
    lambda[ratings.names[i]] = ratings.lambda[i];
  }
  json["lambda"] = std::move(lambda);
  json["iterations"] = ratings.iterations;
  json["converged"] = ratings.converged;
  json["log_likelihood"] = ratings.log_likelihood;
  return json;
}

Json ToJson(const ProbabilityMatrix& matrix) {
  Json json = Json::object();
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    for (std::size_t j = 0; j < matrix.size(); ++j) {
      if (!matrix.compared(i, j)) continue;
      json[matrix.names()[i] + "|" + matrix.names()[j]] = matrix.at(i, j);
    }
  }
  return json;
}

ProbabilityMatrix ProbabilityMatrixFromJson(const Json& json) {
  const Json& cells = json.contains("probabilities") ? json.at("probabilities") : json;
  if (!cells.is_object()) {
    throw Error(ErrorCode::kParse, "probability matrix must be a JSON object");
  }
  struct Cell {
    std::string i, j;
    double p;
  };
  std::vector<Cell> parsed;
  std::set<std::string> names;
  for (const auto& [key, value] : cells.items()) {
    const auto bar = key.find('|');
    if (bar == std::string::npos || key.find('|', bar + 1) != std::string::npos ||
        bar == 0 || bar + 1 == key.size()) {
      throw Error(ErrorCode::kParse,
                  "probability key '" + key + "' is not of the form 'i|j'");
    }
    if (!value.is_number()) {
      throw Error(ErrorCode::kParse,
                  "probability for '" + key + "' must be a number");
    }
    Cell cell{key.substr(0, bar), key.substr(bar + 1), value.get<double>()};
    if (cell.i == cell.j) {
      throw Error(ErrorCode::kInvalidArgument,
                  "diagonal entry '" + key + "' is not allowed");
    }
    if (!(cell.p >= 0.0 && cell.p <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "probability for '" + key + "' lies outside [0, 1]");
    }
    names.insert(cell.i);
    names.insert(cell.j);
    parsed.push_back(std::move(cell));
  }
  ProbabilityMatrix matrix(std::vector<std::string>(names.begin(), names.end()));
  for (const auto& cell : parsed) {
    matrix.at(*matrix.IndexOf(cell.i), *matrix.IndexOf(cell.j)) = cell.p;
  }
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    for (std::size_t j = i + 1; j < matrix.size(); ++j) {
      const double a = matrix.at(i, j), b = matrix.at(j, i);
      if (std::isnan(a) && !std::isnan(b)) matrix.at(i, j) = 1.0 - b;
      if (!std::isnan(a) && std::isnan(b)) matrix.at(j, i) = 1.0 - a;
    }
  }
  return matrix;
}

MetricTable LoadMetricTable(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_directory(path, ec)) return LoadMetricCsv(path);
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  MetricTable table;
  for (const auto& file : files) {
    const Json json = ParseJson(ReadFile(file), file.string());
    if (!json.contains("tokenizer") || !json.contains("language") ||
        !json.at("tokenizer").is_string() || !json.at("language").is_string()) {
      throw Error(ErrorCode::kMissingValue,
                  file.string() + ": metric file needs string fields "
                                  "'tokenizer' and 'language'");
    }
    MetricKey key{json.at("tokenizer").get<std::string>(),
                  json.at("language").get<std::string>()};
    MetricVector metrics;
    try {
      metrics = MetricVectorFromJson(json);
    } catch (const Error& e) {
      throw Error(e.code(), file.string() + ": " + e.what());
    }
    if (!table.emplace(key, metrics).second) {
      throw Error(ErrorCode::kDuplicateKey,
                  file.string() + ": duplicate metrics for (" + key.tokenizer +
                      ", " + key.language + ")");
    }
  }
  if (table.empty()) {
    throw Error(ErrorCode::kMissingValue,
                path.string() + ": no metric JSON files found");
  }
  return table;
}

std::pair<std::vector<double>, std::vector<double>> ReadCsvColumns(
    const std::filesystem::path& path, const std::string& x_column,
    const std::string& y_column) {
  const std::string source = path.string();
  std::istringstream in(ReadFile(path));
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 0, "empty CSV");
  const auto header = SplitCsvLine(line);
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw Error(ErrorCode::kMissingValue,
                  source + ": no column named '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t xc = column(x_column), yc = column(y_column);
  std::vector<double> x, y;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = SplitCsvLine(line);
    if (fields.size() != header.size()) {
      throw ParseError(source, line_no,
                       "line " + std::to_string(line_no) + ": expected " +
                           std::to_string(header.size()) + " fields");
    }
    const auto xv = ParseCsvNumber(fields[xc], source, line_no);
    const auto yv = ParseCsvNumber(fields[yc], source, line_no);
    if (!xv || !yv) {
      throw ParseError(source, line_no,
                       "line " + std::to_string(line_no) + ": missing value");
    }
    x.push_back(*xv);
    y.push_back(*yv);
  }
  return {std::move(x), std::move(y)};
}

void WriteCurveCsv(std::ostream& out, const TokenFrequencyTable& table) {
  out << "rank,count,log_rank,log_count\n";
  char buf[64];
  auto number = [&](double v) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  for (const auto& t : RankTokens(table)) {
    out << t.rank << ',' << t.count << ','
        << number(std::log(static_cast<double>(t.rank))) << ','
        << number(std::log(static_cast<double>(t.count))) << '\n';
  }
}

std::string Dump(const Json& json) { return json.dump(2) + "\n"; }

}  // namespace tokscope::report
