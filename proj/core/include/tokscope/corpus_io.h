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

// Loading of raw corpora, pre-tokenized token streams and the downstream
// score table used as extrinsic ground truth.

#ifndef TOKSCOPE_CORPUS_IO_H_
#define TOKSCOPE_CORPUS_IO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace tokscope {

using TokenId = std::uint32_t;

struct Document {
  std::string id;
  std::string text;

  friend bool operator==(const Document&, const Document&) = default;
};

struct TokenSequence {
  std::vector<TokenId> tokens;
  std::string source_tokenizer;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

enum class CorpusFormat { kPlaintextLines, kJsonl };

// Throws ParseError for unknown names. Accepts "plaintext", "lines", "jsonl".
CorpusFormat ParseCorpusFormat(std::string_view name);

// One Document per non-empty line (plaintext) or record (jsonl), in file
// order. Plaintext documents get ids "L<line>"; jsonl records without an "id"
// field get "R<record>". Duplicate ids are rejected.
std::vector<Document> LoadCorpus(const std::filesystem::path& path,
                                 CorpusFormat format);
std::vector<Document> ParseCorpus(std::string_view content, CorpusFormat format,
                                  std::string_view source = "<memory>");

// Whitespace-separated decimal token ids. Errors carry the 1-based entry
// number of the offending token.
TokenSequence LoadTokenStream(const std::filesystem::path& path);
TokenSequence ParseTokenStream(std::string_view content,
                               std::string_view source = "<memory>");

// Writes one line per sequence, ids separated by single spaces.
void WriteTokenStream(std::ostream& out,
                      const std::vector<std::vector<TokenId>>& lines);

enum class ModelScale { k350M, k2_7B };
enum class Direction { kEnToXx, kXxToEn };

std::string_view ToString(ModelScale scale);
std::string_view ToString(Direction direction);
ModelScale ParseModelScale(std::string_view text);
// Accepts "en-xx", "en->xx" and "en→xx" (and the reverse forms).
Direction ParseDirection(std::string_view text);

struct DownstreamKey {
  std::string tokenizer;
  ModelScale scale;
  std::string language;
  Direction direction;

  friend auto operator<=>(const DownstreamKey&, const DownstreamKey&) = default;
};

struct DownstreamScores {
  double metricx = 0.0;  // lower is better
  double chrf = 0.0;     // higher is better

  friend bool operator==(const DownstreamScores&,
                         const DownstreamScores&) = default;
};

// Machine-translation scores per (tokenizer, scale, language, direction).
class DownstreamFixture {
 public:
  // Throws kDuplicateKey if the key is already present and kInvalidArgument
  // for negative or non-finite scores.
  void Add(const DownstreamKey& key, const DownstreamScores& scores);

  const DownstreamScores* Find(const DownstreamKey& key) const;
  // Throws kMissingValue when absent.
  const DownstreamScores& At(const DownstreamKey& key) const;

  // Mean MetricX over both translation directions.
  double MeanMetricX(std::string_view tokenizer, ModelScale scale,
                     std::string_view language) const;

  // Sorted, de-duplicated names present at `scale`.
  std::vector<std::string> Tokenizers(ModelScale scale) const;
  std::vector<std::string> Languages(ModelScale scale) const;

  const std::map<DownstreamKey, DownstreamScores>& entries() const {
    return entries_;
  }
  std::size_t size() const { return entries_.size(); }

  friend bool operator==(const DownstreamFixture&,
                         const DownstreamFixture&) = default;

 private:
  std::map<DownstreamKey, DownstreamScores> entries_;
};

DownstreamFixture LoadDownstreamFixture(const std::filesystem::path& path);
DownstreamFixture ParseDownstreamFixture(std::string_view content,
                                         std::string_view source = "<memory>");
// Emits the canonical header and one row per entry in key order.
void WriteDownstreamFixture(std::ostream& out,
                            const DownstreamFixture& fixture);

// Reads a whole file into memory; throws kIo when it cannot be opened.
std::string ReadFile(const std::filesystem::path& path);

}  // namespace tokscope

#endif  // TOKSCOPE_CORPUS_IO_H_
