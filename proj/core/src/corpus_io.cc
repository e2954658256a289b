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

#include "tokscope/corpus_io.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <ostream>
#include <set>
#include <unordered_set>

#include "json.hpp"
#include "tokscope/error.h"
#include "tokscope/utf8.h"

namespace tokscope {
namespace {

// Splits on '\n', dropping one trailing '\r' per line.
std::vector<std::string_view> SplitLines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

// Minimal CSV field splitter: commas, optional double-quoted fields with ""
// escapes. No embedded newlines.
std::vector<std::string> SplitCsvRow(std::string_view line,
                                     std::string_view source,
                                     std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && Trim(field).empty()) {
      field.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.emplace_back(was_quoted ? field : std::string(Trim(field)));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError(std::string(source), line_no, "unterminated quote");
  fields.emplace_back(was_quoted ? field : std::string(Trim(field)));
  return fields;
}

double ParseReal(std::string_view text, std::string_view source,
                 std::size_t line_no, std::string_view column) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw ParseError(std::string(source), line_no,
                     "column '" + std::string(column) + "': not a number: '" +
                         std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  }
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

CorpusFormat ParseCorpusFormat(std::string_view name) {
  if (name == "plaintext" || name == "lines" || name == "plaintext-lines") {
    return CorpusFormat::kPlaintextLines;
  }
  if (name == "jsonl") return CorpusFormat::kJsonl;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown corpus format '" + std::string(name) + "'");
}

std::vector<Document> ParseCorpus(std::string_view content, CorpusFormat format,
                                  std::string_view source) {
  if (auto bad = utf8::FindInvalid(content)) {
    // Report the line containing the bad byte.
    const auto line = 1 + std::count(content.begin(),
                                      content.begin() + *bad, '\n');
    throw ParseError(std::string(source), static_cast<std::size_t>(line),
                     "invalid UTF-8 at byte " + std::to_string(*bad));
  }
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  const auto lines = SplitLines(content);
  std::size_t record = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    const std::size_t line_no = i + 1;
    if (line.empty()) continue;
    Document doc;
    if (format == CorpusFormat::kPlaintextLines) {
      doc.id = "L" + std::to_string(line_no);
      doc.text = std::string(line);
    } else {
      if (Trim(line).empty()) continue;
      ++record;
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string(source), line_no,
                         std::string("malformed JSON: ") + e.what());
      }
      if (!obj.is_object() || !obj.contains("text") ||
          !obj["text"].is_string()) {
        throw ParseError(std::string(source), line_no,
                         "record has no string \"text\" field");
      }
      doc.text = obj["text"].get<std::string>();
      if (obj.contains("id")) {
        const auto& id = obj["id"];
        doc.id = id.is_string() ? id.get<std::string>() : id.dump();
      } else {
        doc.id = "R" + std::to_string(record);
      }
    }
    if (!seen.insert(doc.id).second) {
      throw ParseError(std::string(source), line_no,
                       "duplicate document id '" + doc.id + "'");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> LoadCorpus(const std::filesystem::path& path,
                                 CorpusFormat format) {
  return ParseCorpus(ReadFile(path), format, path.string());
}

TokenSequence ParseTokenStream(std::string_view content,
                               std::string_view source) {
  TokenSequence seq;
  std::size_t pos = 0;
  std::size_t entry = 0;
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (pos < content.size()) {
    while (pos < content.size() && is_space(content[pos])) ++pos;
    if (pos >= content.size()) break;
    std::size_t end = pos;
    while (end < content.size() && !is_space(content[end])) ++end;
    ++entry;
    const std::string_view word = content.substr(pos, end - pos);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(),
                                     value);
    if (ec != std::errc() || ptr != word.data() + word.size() ||
        value > std::numeric_limits<TokenId>::max()) {
      throw ParseError(std::string(source), entry,
                       "expected a non-negative token id, got '" +
                           std::string(word) + "'");
    }
    seq.tokens.push_back(static_cast<TokenId>(value));
    pos = end;
  }
  return seq;
}

TokenSequence LoadTokenStream(const std::filesystem::path& path) {
  TokenSequence seq = ParseTokenStream(ReadFile(path), path.string());
  seq.source_tokenizer = path.stem().string();
  return seq;
}

void WriteTokenStream(std::ostream& out,
                      const std::vector<std::vector<TokenId>>& lines) {
  for (const auto& line : lines) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) out << ' ';
      out << line[i];
    }
    out << '\n';
  }
}

std::string_view ToString(ModelScale scale) {
  return scale == ModelScale::k350M ? "350M" : "2.7B";
}

std::string_view ToString(Direction direction) {
  return direction == Direction::kEnToXx ? "en-xx" : "xx-en";
}

ModelScale ParseModelScale(std::string_view text) {
  if (text == "350M" || text == "350m") return ModelScale::k350M;
  if (text == "2.7B" || text == "2.7b") return ModelScale::k2_7B;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown model scale '" + std::string(text) +
                  "' (expected 350M or 2.7B)");
}

Direction ParseDirection(std::string_view text) {
  static constexpr std::array<std::string_view, 3> kOut = {"en-xx", "en->xx",
                                                          "en→xx"};
  static constexpr std::array<std::string_view, 3> kIn = {"xx-en", "xx->en",
                                                         "xx→en"};
  if (std::find(kOut.begin(), kOut.end(), text) != kOut.end()) {
    return Direction::kEnToXx;
  }
  if (std::find(kIn.begin(), kIn.end(), text) != kIn.end()) {
    return Direction::kXxToEn;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown direction '" + std::string(text) + "'");
}

void DownstreamFixture::Add(const DownstreamKey& key,
                            const DownstreamScores& scores) {
  if (!std::isfinite(scores.metricx) || !std::isfinite(scores.chrf) ||
      scores.metricx < 0 || scores.chrf < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "scores must be finite and non-negative for " + key.tokenizer);
  }
  if (!entries_.emplace(key, scores).second) {
    throw Error(ErrorCode::kDuplicateKey,
                "duplicate fixture key (" + key.tokenizer + ", " +
                    std::string(ToString(key.scale)) + ", " + key.language +
                    ", " + std::string(ToString(key.direction)) + ")");
  }
}

const DownstreamScores* DownstreamFixture::Find(const DownstreamKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

const DownstreamScores& DownstreamFixture::At(const DownstreamKey& key) const {
  if (const auto* s = Find(key)) return *s;
  throw Error(ErrorCode::kMissingValue,
              "fixture has no cell for (" + key.tokenizer + ", " +
                  std::string(ToString(key.scale)) + ", " + key.language +
                  ", " + std::string(ToString(key.direction)) + ")");
}

double DownstreamFixture::MeanMetricX(std::string_view tokenizer,
                                      ModelScale scale,
                                      std::string_view language) const {
  const std::string tok(tokenizer);
  const std::string lang(language);
  const double out = At({tok, scale, lang, Direction::kEnToXx}).metricx;
  const double in = At({tok, scale, lang, Direction::kXxToEn}).metricx;
  return (out + in) / 2.0;
}

std::vector<std::string> DownstreamFixture::Tokenizers(ModelScale scale) const {
  std::set<std::string> names;
  for (const auto& [key, _] : entries_) {
    if (key.scale == scale) names.insert(key.tokenizer);
  }
  return {names.begin(), names.end()};
}

std::vector<std::string> DownstreamFixture::Languages(ModelScale scale) const {
  std::set<std::string> names;
  for (const auto& [key, _] : entries_) {
    if (key.scale == scale) names.insert(key.language);
  }
  return {names.begin(), names.end()};
}

DownstreamFixture ParseDownstreamFixture(std::string_view content,
                                         std::string_view source) {
  static constexpr std::array<std::string_view, 6> kColumns = {
      "tokenizer", "scale", "language", "direction", "metricx", "chrf"};
  const auto lines = SplitLines(content);
  std::size_t first = 0;
  while (first < lines.size() && Trim(lines[first]).empty()) ++first;
  if (first == lines.size()) {
    throw ParseError(std::string(source), 1, "missing header");
  }
  const auto header = SplitCsvRow(lines[first], source, first + 1);
  std::array<std::size_t, kColumns.size()> index{};
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    auto it = std::find(header.begin(), header.end(), kColumns[c]);
    if (it == header.end()) {
      throw ParseError(std::string(source), first + 1,
                       "missing column '" + std::string(kColumns[c]) + "'");
    }
    index[c] = static_cast<std::size_t>(it - header.begin());
  }

  DownstreamFixture fixture;
  for (std::size_t i = first + 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (Trim(lines[i]).empty()) continue;
    const auto row = SplitCsvRow(lines[i], source, line_no);
    if (row.size() != header.size()) {
      throw ParseError(std::string(source), line_no,
                       "expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(row.size()));
    }
    try {
      DownstreamKey key{row[index[0]], ParseModelScale(row[index[1]]),
                        row[index[2]], ParseDirection(row[index[3]])};
      if (key.tokenizer.empty() || key.language.empty()) {
        throw ParseError(std::string(source), line_no,
                         "empty tokenizer or language");
      }
      DownstreamScores scores{
          ParseReal(row[index[4]], source, line_no, "metricx"),
          ParseReal(row[index[5]], source, line_no, "chrf")};
      fixture.Add(key, scores);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kDuplicateKey) {
        throw Error(ErrorCode::kDuplicateKey, std::string(source) + ":" +
                                                  std::to_string(line_no) +
                                                  ": " + e.what());
      }
      throw ParseError(std::string(source), line_no, e.what());
    }
  }
  return fixture;
}

DownstreamFixture LoadDownstreamFixture(const std::filesystem::path& path) {
  return ParseDownstreamFixture(ReadFile(path), path.string());
}

void WriteDownstreamFixture(std::ostream& out,
                            const DownstreamFixture& fixture) {
  const auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q.push_back('"');
      q.push_back(c);
    }
    q.push_back('"');
    return q;
  };
  out << "tokenizer,scale,language,direction,metricx,chrf\n";
  // Shortest representation that round-trips.
  const auto real = [](double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
  };
  for (const auto& [key, scores] : fixture.entries()) {
    out << quote(key.tokenizer) << ',' << ToString(key.scale) << ','
        << quote(key.language) << ',' << ToString(key.direction) << ','
        << real(scores.metricx) << ',' << real(scores.chrf) << '\n';
  }
}

}  // namespace tokscope
