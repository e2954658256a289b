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

#include "cli.h"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "report.h"
#include "tokscope/bpe.h"
#include "tokscope/corpus_io.h"
#include "tokscope/error.h"
#include "tokscope/predictor.h"
#include "tokscope/ranking.h"
#include "tokscope/stats.h"
#include "tokscope/synthetic.h"
#include "tokscope/zipf_metrics.h"

namespace tokscope::cli {
namespace {

using report::Json;

struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  bool no_timestamp = false;
  std::size_t threads = 1;

  // Tokenizer spec: token streams, or BPE files plus a corpus.
  std::vector<std::string> tokens;
  std::string vocab;
  std::string merges;
  std::string pattern = std::string(kGpt2Pattern);
  std::string corpus;
  std::string format = "plaintext";
  std::string tokenizer;
  std::string language;

  double truncation_bound = kDefaultTruncationBound;
  bool no_truncation = false;
  std::string out;

  std::string input;
  std::string x_column;
  std::string y_column;
  std::string method = "spearman";

  std::string fixture = TOKSCOPE_DEFAULT_FIXTURE;
  std::string metrics;
  std::string probabilities;
  std::string features = "all";
  std::string model;
  std::string scale = "2.7B";
  std::string heldout_language;
  std::size_t cv_folds = 5;

  std::uint64_t n_tokens = 1000000;
  std::size_t n_types = 403;
  double exponent = 1.0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double TruncationBound(const RunConfig& config) {
  return config.no_truncation ? std::numeric_limits<double>::infinity()
                              : config.truncation_bound;
}

Json Metadata(const RunConfig& config) {
  return report::MetadataJson({config.command, config.seed,
                               TruncationBound(config), !config.no_timestamp});
}

// Writes `content` to --out, or to `out` when no path was given.
void Emit(const RunConfig& config, const std::string& content, std::ostream& out) {
  if (config.out.empty()) {
    out << content;
    return;
  }
  std::ofstream file(config.out, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIo, "cannot open " + config.out + " for writing");
  file << content;
  file.close();
  if (!file) throw Error(ErrorCode::kIo, "failed writing " + config.out);
}

// Summary printed on stdout for commands whose artifact is not JSON.
void EmitSummary(const RunConfig& config, Json summary, std::ostream& out) {
  if (config.out.empty()) return;
  summary["out"] = config.out;
  summary["metadata"] = Metadata(config);
  out << report::Dump(summary);
}

std::vector<Metric> Features(const RunConfig& config) {
  if (config.features == "all") return AllMetrics();
  return ParseMetricList(config.features);
}

Json ParseJsonFile(const std::string& path) {
  const std::string text = ReadFile(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, e.byte, e.what());
  }
}

// Frequency table plus tokenizer name from either tokenizer spec.
std::pair<TokenFrequencyTable, std::string> LoadFrequencies(const RunConfig& config) {
  TokenFrequencyTable table;
  std::string name = config.tokenizer;
  if (!config.tokens.empty()) {
    for (const auto& path : config.tokens) {
      const TokenSequence seq = LoadTokenStream(path);
      if (name.empty()) name = seq.source_tokenizer;
      table.Add(seq.tokens);
    }
  } else if (!config.vocab.empty()) {
    const BpeTokenizer bpe = LoadBpe(config.vocab, config.merges, config.pattern);
    if (name.empty()) name = bpe.name();
    const auto docs = LoadCorpus(config.corpus, ParseCorpusFormat(config.format));
    for (const auto& ids : EncodeCorpus(bpe, docs, config.threads)) table.Add(ids);
  } else {
    throw UsageError("a tokenizer spec is required: --tokens, or --vocab with "
                     "--merges and --corpus");
  }
  if (table.empty()) throw Error(ErrorCode::kDegenerate, "no tokens");
  return {std::move(table), std::move(name)};
}

int RunEncode(const RunConfig& config, std::ostream& out) {
  const BpeTokenizer bpe = LoadBpe(config.vocab, config.merges, config.pattern);
  const auto docs = LoadCorpus(config.corpus, ParseCorpusFormat(config.format));
  const auto lines = EncodeCorpus(bpe, docs, config.threads);
  std::ostringstream stream;
  WriteTokenStream(stream, lines);
  Emit(config, stream.str(), out);
  std::size_t total = 0;
  for (const auto& line : lines) total += line.size();
  Json summary;
  summary["tokenizer"] = bpe.name();
  summary["documents"] = docs.size();
  summary["tokens"] = total;
  EmitSummary(config, std::move(summary), out);
  return kExitOk;
}

int RunMetrics(const RunConfig& config, std::ostream& out) {
  const auto [table, name] = LoadFrequencies(config);
  Json json;
  json["tokenizer"] = name;
  if (!config.language.empty()) json["language"] = config.language;
  json["metrics"] = report::ToJson(ComputeMetrics(table, TruncationBound(config)));
  json["metadata"] = Metadata(config);
  Emit(config, report::Dump(json), out);
  return kExitOk;
}

int RunExportCurve(const RunConfig& config, std::ostream& out) {
  const auto [table, name] = LoadFrequencies(config);
  std::ostringstream csv;
  report::WriteCurveCsv(csv, table);
  Emit(config, csv.str(), out);
  Json summary;
  summary["tokenizer"] = name;
  summary["rows"] = table.cardinality();
  EmitSummary(config, std::move(summary), out);
  return kExitOk;
}

int RunCorrelate(const RunConfig& config, std::ostream& out) {
  const auto [x, y] =
      report::ReadCsvColumns(config.input, config.x_column, config.y_column);
  stats::CorrelationResult result;
  if (config.method == "spearman") {
    result = stats::Spearman(x, y);
  } else if (config.method == "kendall") {
    result = stats::Kendall(x, y);
  } else {
    throw UsageError("unknown method '" + config.method +
                     "' (expected spearman or kendall)");
  }
  Json json = report::ToJson(result);
  json["x"] = config.x_column;
  json["y"] = config.y_column;
  json["metadata"] = Metadata(config);
  Emit(config, report::Dump(json), out);
  return kExitOk;
}

int RunPredict(const RunConfig& config, std::ostream& out) {
  const DownstreamFixture fixture = LoadDownstreamFixture(config.fixture);
  const MetricTable metrics = report::LoadMetricTable(config.metrics);
  DatasetOptions options{ParseModelScale(config.scale), Features(config),
                         config.seed};
  const auto dataset = BuildPairwiseDataset(metrics, fixture, options);
  FitOptions fit;
  fit.cv_folds = config.cv_folds;
  const ModelKind kind =
      ParseModelKind(config.model.empty() ? "logistic" : config.model);
  EvaluationReport result = LeaveOneTokenizerOut(dataset, kind, fit);
  result.feature_set = MetricNames(options.features);
  result.seed = config.seed;
  Json json = report::ToJson(result);
  json["scale"] = std::string(ToString(options.scale));
  json["examples"] = dataset.size();
  json["metadata"] = Metadata(config);
  Emit(config, report::Dump(json), out);
  return kExitOk;
}

int RunRank(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const DownstreamFixture fixture = LoadDownstreamFixture(config.fixture);
  const ModelScale scale = ParseModelScale(config.scale);
  Json json;
  json["language"] = config.heldout_language;
  json["scale"] = std::string(ToString(scale));

  ProbabilityMatrix matrix;
  if (!config.probabilities.empty()) {
    json["source"] = "probabilities";
    matrix = report::ProbabilityMatrixFromJson(ParseJsonFile(config.probabilities));
  } else {
    const MetricTable metrics = report::LoadMetricTable(config.metrics);
    DatasetOptions options{scale, Features(config), config.seed};
    const ModelKind kind =
        ParseModelKind(config.model.empty() ? "rbfsvm" : config.model);
    auto per_language = LeaveOneLanguageOut(metrics, fixture, options, kind);
    auto it = per_language.find(config.heldout_language);
    if (it == per_language.end()) {
      throw Error(ErrorCode::kMissingValue,
                  "no metrics or downstream scores for language '" +
                      config.heldout_language + "'");
    }
    matrix = std::move(it->second);
    json["source"] = "metrics";
    json["model"] = std::string(ToString(kind));
    json["features"] = MetricNames(options.features);
  }

  const BTRatings ratings = FitBradleyTerry(matrix);
  const Ranking predicted = RankingFromRatings(ratings);
  const Ranking truth = GroundTruthRanking(fixture, config.heldout_language, scale);
  const stats::CorrelationResult tau = EvaluateRanking(predicted, truth);

  json["predicted"] = predicted.ordered;
  json["truth"] = truth.ordered;
  json["kendall_tau"] = tau.coefficient;
  json["p_value_one_sided"] = tau.p_greater;
  json["p_value_two_sided"] = tau.p_value;
  json["exact"] = tau.exact;
  json["ratings"] = report::ToJson(ratings);
  json["truth_mean_metricx"] = truth.scores;
  json["probabilities"] = report::ToJson(matrix);
  std::vector<std::string> warnings = ratings.warnings;
  warnings.insert(warnings.end(), predicted.warnings.begin(), predicted.warnings.end());
  warnings.insert(warnings.end(), truth.warnings.begin(), truth.warnings.end());
  for (const auto& w : warnings) err << "tokscope: warning: " << w << "\n";
  json["warnings"] = warnings;
  json["metadata"] = Metadata(config);
  Emit(config, report::Dump(json), out);
  return kExitOk;
}

int RunGenZipf(const RunConfig& config, std::ostream& out) {
  const TokenSequence seq =
      GenerateZipfStream(config.n_tokens, config.n_types, config.exponent, config.seed);
  std::ostringstream stream;
  WriteTokenStream(stream, {seq.tokens});
  Emit(config, stream.str(), out);
  Json summary;
  summary["tokens"] = seq.tokens.size();
  summary["types"] = config.n_types;
  summary["exponent"] = config.exponent;
  EmitSummary(config, std::move(summary), out);
  return kExitOk;
}

void AddTokenizerSpec(CLI::App* sub, RunConfig& config) {
  auto* tokens = sub->add_option("--tokens", config.tokens,
                                 "Token-stream file(s) from one tokenizer");
  auto* vocab = sub->add_option("--vocab", config.vocab, "BPE vocab.json");
  auto* merges = sub->add_option("--merges", config.merges, "BPE merges.txt");
  auto* corpus = sub->add_option("--corpus", config.corpus, "Corpus to encode");
  sub->add_option("--format", config.format, "plaintext or jsonl")
      ->capture_default_str();
  sub->add_option("--pattern", config.pattern, "Pretokenizer regex");
  sub->add_option("--tokenizer", config.tokenizer,
                  "Tokenizer name (default: derived from the input path)");
  tokens->excludes(vocab)->excludes(merges)->excludes(corpus);
  vocab->needs(merges)->needs(corpus);
  merges->needs(vocab);
  corpus->needs(vocab);
}

void AddTruncation(CLI::App* sub, RunConfig& config) {
  auto* bound = sub->add_option("--truncation-bound", config.truncation_bound,
                                "Keep curve points with ln(rank) <= bound")
                    ->capture_default_str();
  sub->add_flag("--no-truncation", config.no_truncation,
                "Fit the whole rank-frequency curve")
      ->excludes(bound);
}

void AddOut(CLI::App* sub, RunConfig& config) {
  sub->add_option("--out,-o", config.out, "Output path (default: stdout)");
}

std::optional<std::uint64_t> ParseSeed(std::string_view text) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    return std::nullopt;
  }
  return value;
}

// First argument that is neither a global option nor its value.
std::optional<std::string> FirstPositional(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--seed" || args[i] == "--threads") {
      ++i;
    } else if (args[i].empty() || args[i][0] != '-') {
      return args[i];
    }
  }
  return std::nullopt;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  RunConfig config;
  CLI::App app{"tokscope: intrinsic tokenizer metrics and downstream ranking"};
  app.name("tokscope");
  app.require_subcommand(1);
  app.add_option("--seed", config.seed,
                 "Random seed (TOKSCOPE_SEED overrides)")->capture_default_str();
  app.add_flag("--no-timestamp", config.no_timestamp,
               "Omit the timestamp from report metadata");
  app.add_option("--threads", config.threads, "Worker threads for encoding")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.set_version_flag("--version", TOKSCOPE_VERSION);

  auto* encode = app.add_subcommand("encode", "Encode a corpus to a token stream");
  encode->add_option("--vocab", config.vocab, "BPE vocab.json")->required();
  encode->add_option("--merges", config.merges, "BPE merges.txt")->required();
  encode->add_option("--corpus", config.corpus, "Corpus to encode")->required();
  encode->add_option("--format", config.format, "plaintext or jsonl")
      ->capture_default_str();
  encode->add_option("--pattern", config.pattern, "Pretokenizer regex");
  AddOut(encode, config);

  auto* metrics = app.add_subcommand("metrics", "Compute the five intrinsic metrics");
  AddTokenizerSpec(metrics, config);
  metrics->add_option("--language", config.language, "Language label");
  AddTruncation(metrics, config);
  AddOut(metrics, config);

  auto* curve = app.add_subcommand("export-curve", "Export rank-frequency data as CSV");
  AddTokenizerSpec(curve, config);
  AddOut(curve, config);

  auto* correlate = app.add_subcommand("correlate", "Correlate two CSV columns");
  correlate->add_option("--input", config.input, "CSV file")->required();
  correlate->add_option("--x", config.x_column, "First column")->required();
  correlate->add_option("--y", config.y_column, "Second column")->required();
  correlate->add_option("--method", config.method, "spearman or kendall")
      ->capture_default_str();
  AddOut(correlate, config);

  auto* predict = app.add_subcommand("predict", "Leave-one-tokenizer-out evaluation");
  predict->add_option("--fixture", config.fixture, "Downstream score table")
      ->capture_default_str();
  predict->add_option("--metrics", config.metrics,
                      "Directory of metric JSON files, or a metric CSV")
      ->required();
  predict->add_option("--features", config.features,
                      "Comma-separated metric names, or 'all'")
      ->capture_default_str();
  predict->add_option("--model", config.model, "logistic, linsvm or rbfsvm");
  predict->add_option("--scale", config.scale, "350M or 2.7B")->capture_default_str();
  predict->add_option("--cv-folds", config.cv_folds, "Cross-validation folds")
      ->check(CLI::Range(2, 100))
      ->capture_default_str();
  AddOut(predict, config);

  auto* rank = app.add_subcommand("rank", "Bradley-Terry ranking for a held-out language");
  rank->add_option("--fixture", config.fixture, "Downstream score table")
      ->capture_default_str();
  auto* rank_metrics = rank->add_option("--metrics", config.metrics,
                                        "Directory of metric JSON files, or a metric CSV");
  auto* rank_probs = rank->add_option("--probabilities", config.probabilities,
                                      "Pairwise probability JSON keyed 'i|j'");
  rank_metrics->excludes(rank_probs);
  rank->add_option("--heldout-language", config.heldout_language, "Language to rank")
      ->required();
  rank->add_option("--features", config.features,
                   "Comma-separated metric names, or 'all'")
      ->capture_default_str();
  auto* rank_model =
      rank->add_option("--model", config.model, "logistic, linsvm or rbfsvm (default rbfsvm)");
  rank_model->excludes(rank_probs);
  rank->add_option("--scale", config.scale, "350M or 2.7B")->capture_default_str();
  AddOut(rank, config);

  auto* gen = app.add_subcommand("gen-zipf", "Generate a synthetic Zipfian token stream");
  gen->add_option("--n-tokens", config.n_tokens, "Target stream length")
      ->capture_default_str();
  gen->add_option("--n-types", config.n_types, "Number of token types")
      ->capture_default_str();
  gen->add_option("--exponent", config.exponent, "Zipf exponent")->capture_default_str();
  AddOut(gen, config);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << TOKSCOPE_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (app.get_subcommands().empty()) {
      if (auto unknown = FirstPositional(args)) {
        err << "tokscope: usage error: unknown command '" << *unknown << "'\n";
        return kExitUsage;
      }
    }
    err << "tokscope: usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (const char* env = std::getenv("TOKSCOPE_SEED"); env != nullptr) {
    const auto seed = ParseSeed(env);
    if (!seed) {
      err << "tokscope: usage error: TOKSCOPE_SEED='" << env
          << "' is not a non-negative integer\n";
      return kExitUsage;
    }
    config.seed = *seed;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  config.command = chosen->get_name();
  if (config.command == "rank" && config.metrics.empty() &&
      config.probabilities.empty()) {
    err << "tokscope: usage error: rank needs --metrics or --probabilities\n";
    return kExitUsage;
  }

  try {
    if (config.command == "encode") return RunEncode(config, out);
    if (config.command == "metrics") return RunMetrics(config, out);
    if (config.command == "export-curve") return RunExportCurve(config, out);
    if (config.command == "correlate") return RunCorrelate(config, out);
    if (config.command == "predict") return RunPredict(config, out);
    if (config.command == "rank") return RunRank(config, out, err);
    if (config.command == "gen-zipf") return RunGenZipf(config, out);
    err << "tokscope: usage error: unknown command '" << config.command << "'\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "tokscope: usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "tokscope: error [" << ErrorCodeName(e.code()) << "]: " << e.what()
        << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "tokscope: error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return RunCli(args, out, err);
}

}  // namespace tokscope::cli
