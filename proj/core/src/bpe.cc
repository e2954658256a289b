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

#include "tokscope/bpe.h"

#include <unicode/regex.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <exception>
#include <limits>
#include <thread>

#include "json.hpp"
#include "tokscope/error.h"
#include "tokscope/utf8.h"

namespace tokscope {
namespace {

std::array<char32_t, 256> BuildByteMap() {
  std::array<char32_t, 256> map{};
  std::array<bool, 256> direct{};
  for (int b = '!'; b <= '~'; ++b) direct[b] = true;
  for (int b = 0xA1; b <= 0xAC; ++b) direct[b] = true;
  for (int b = 0xAE; b <= 0xFF; ++b) direct[b] = true;
  char32_t next = 256;
  for (int b = 0; b < 256; ++b) {
    map[b] = direct[b] ? static_cast<char32_t>(b) : next++;
  }
  return map;
}

const std::array<std::string, 256>& ByteSymbols() {
  static const std::array<std::string, 256> symbols = [] {
    std::array<std::string, 256> s;
    for (int b = 0; b < 256; ++b) utf8::AppendCodePoint(ByteToCodePoint()[b], s[b]);
    return s;
  }();
  return symbols;
}

// Length-prefixed so that no two (left, right) pairs share a key.
std::string PairKey(std::string_view left, std::string_view right) {
  std::string key = std::to_string(left.size());
  key.push_back(':');
  key.append(left);
  key.append(right);
  return key;
}

}  // namespace

const std::array<char32_t, 256>& ByteToCodePoint() {
  static const std::array<char32_t, 256> map = BuildByteMap();
  return map;
}

std::optional<unsigned char> CodePointToByte(char32_t cp) {
  static const std::unordered_map<char32_t, unsigned char> inverse = [] {
    std::unordered_map<char32_t, unsigned char> m;
    for (int b = 0; b < 256; ++b) {
      m.emplace(ByteToCodePoint()[b], static_cast<unsigned char>(b));
    }
    return m;
  }();
  auto it = inverse.find(cp);
  if (it == inverse.end()) return std::nullopt;
  return it->second;
}

struct Pretokenizer::Compiled {
  std::unique_ptr<icu::RegexPattern> regex;
};

Pretokenizer::Pretokenizer(std::string_view pattern)
    : pattern_(pattern), compiled_(std::make_unique<Compiled>()) {
  UErrorCode status = U_ZERO_ERROR;
  UParseError parse_error;
  compiled_->regex.reset(icu::RegexPattern::compile(
      icu::UnicodeString::fromUTF8(
          icu::StringPiece(pattern.data(), static_cast<int32_t>(pattern.size()))),
      0, parse_error, status));
  if (U_FAILURE(status) || !compiled_->regex) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid pre-tokenization pattern at offset " +
                    std::to_string(parse_error.offset) + ": " +
                    u_errorName(status));
  }
}

Pretokenizer::~Pretokenizer() = default;

std::vector<std::string> Pretokenizer::Split(std::string_view text) const {
  std::vector<std::string> pieces;
  if (text.empty()) return pieces;
  if (text.size() > static_cast<std::size_t>(std::numeric_limits<int32_t>::max())) {
    throw Error(ErrorCode::kInvalidArgument, "text too large to pre-tokenize");
  }
  const icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<icu::RegexMatcher> matcher(
      compiled_->regex->matcher(u, status));
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("regex matcher: ") + u_errorName(status));
  }
  const auto emit = [&](int32_t begin, int32_t end) {
    if (begin >= end) return;
    std::string piece;
    u.tempSubStringBetween(begin, end).toUTF8String(piece);
    pieces.push_back(std::move(piece));
  };
  int32_t covered = 0;
  while (matcher->find(status) && U_SUCCESS(status)) {
    const int32_t begin = matcher->start(status);
    const int32_t end = matcher->end(status);
    if (begin == end) continue;
    emit(covered, begin);
    emit(begin, end);
    covered = end;
  }
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("regex match: ") + u_errorName(status));
  }
  emit(covered, u.length());
  return pieces;
}

std::vector<std::string> Pretokenize(std::string_view text,
                                     std::string_view pattern) {
  return Pretokenizer(pattern).Split(text);
}

Vocabulary::Vocabulary(std::unordered_map<std::string, TokenId> token_to_id)
    : token_to_id_(std::move(token_to_id)) {
  id_to_token_.reserve(token_to_id_.size());
  for (const auto& [token, id] : token_to_id_) {
    auto [it, inserted] = id_to_token_.emplace(id, token);
    if (!inserted) {
      throw Error(ErrorCode::kDuplicateKey,
                  "vocabulary id " + std::to_string(id) + " used by both '" +
                      it->second + "' and '" + token + "'");
    }
  }
}

std::optional<TokenId> Vocabulary::Find(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  if (it == token_to_id_.end()) return std::nullopt;
  return it->second;
}

const std::string* Vocabulary::Token(TokenId id) const {
  auto it = id_to_token_.find(id);
  return it == id_to_token_.end() ? nullptr : &it->second;
}

BpeTokenizer::BpeTokenizer(Vocabulary vocab,
                           const std::vector<MergePair>& merges,
                           std::string_view pattern, std::string name)
    : vocab_(std::move(vocab)),
      pretokenizer_(std::make_shared<const Pretokenizer>(pattern)),
      name_(std::move(name)) {
  ranks_.reserve(merges.size());
  for (std::size_t rank = 0; rank < merges.size(); ++rank) {
    const auto& [left, right] = merges[rank];
    if (!vocab_.Find(left + right)) {
      throw Error(ErrorCode::kMissingValue,
                  "merge #" + std::to_string(rank + 1) + " '" + left + " " +
                      right + "' produces '" + left + right +
                      "', which is not in the vocabulary");
    }
    // Repeated pairs keep their first (lowest) rank.
    ranks_.emplace(PairKey(left, right), rank);
  }
  merge_count_ = merges.size();
}

std::optional<std::size_t> BpeTokenizer::MergeRank(std::string_view left,
                                                   std::string_view right) const {
  auto it = ranks_.find(PairKey(left, right));
  if (it == ranks_.end()) return std::nullopt;
  return it->second;
}

void BpeTokenizer::EncodePiece(std::string_view piece,
                               std::vector<TokenId>& out) const {
  const auto& byte_symbols = ByteSymbols();
  std::vector<std::string> symbols;
  symbols.reserve(piece.size());
  for (char c : piece) {
    symbols.push_back(byte_symbols[static_cast<unsigned char>(c)]);
  }

  while (symbols.size() > 1) {
    std::size_t best_rank = std::numeric_limits<std::size_t>::max();
    std::size_t best_at = 0;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      if (auto rank = MergeRank(symbols[i], symbols[i + 1]);
          rank && *rank < best_rank) {
        best_rank = *rank;
        best_at = i;
      }
    }
    if (best_rank == std::numeric_limits<std::size_t>::max()) break;

    const std::string left = symbols[best_at];
    const std::string right = symbols[best_at + 1];
    std::vector<std::string> merged;
    merged.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size();) {
      if (i + 1 < symbols.size() && symbols[i] == left &&
          symbols[i + 1] == right) {
        merged.push_back(left + right);
        i += 2;
      } else {
        merged.push_back(std::move(symbols[i]));
        ++i;
      }
    }
    symbols = std::move(merged);
  }

  for (const auto& symbol : symbols) {
    auto id = vocab_.Find(symbol);
    if (!id) {
      throw Error(ErrorCode::kUnknownToken,
                  "symbol '" + symbol + "' is not in the vocabulary of " +
                      name_);
    }
    out.push_back(*id);
  }
}

std::vector<TokenId> BpeTokenizer::EncodeIds(std::string_view text) const {
  if (auto bad = utf8::FindInvalid(text)) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid UTF-8 at byte " + std::to_string(*bad));
  }
  std::vector<TokenId> ids;
  for (const auto& piece : pretokenizer_->Split(text)) {
    EncodePiece(piece, ids);
  }
  return ids;
}

TokenSequence BpeTokenizer::Encode(std::string_view text) const {
  return TokenSequence{EncodeIds(text), name_};
}

std::string BpeTokenizer::Decode(std::span<const TokenId> tokens) const {
  std::string bytes;
  for (const TokenId id : tokens) {
    const std::string* token = vocab_.Token(id);
    if (!token) {
      throw Error(ErrorCode::kUnknownToken,
                  "token id " + std::to_string(id) + " is not in the vocabulary");
    }
    std::size_t pos = 0;
    while (pos < token->size()) {
      const char32_t cp = utf8::NextCodePoint(*token, pos);
      auto byte = CodePointToByte(cp);
      if (!byte) {
        throw Error(ErrorCode::kUnknownToken,
                    "token id " + std::to_string(id) +
                        " contains a code point outside the byte map");
      }
      bytes.push_back(static_cast<char>(*byte));
    }
  }
  return bytes;
}

std::vector<MergePair> ParseMerges(std::string_view content,
                                   std::string_view source) {
  std::vector<MergePair> merges;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1 && line.front() == '#') continue;
    const std::size_t space = line.find(' ');
    if (space == std::string_view::npos || space == 0 ||
        space + 1 >= line.size() ||
        line.find(' ', space + 1) != std::string_view::npos) {
      throw ParseError(std::string(source), line_no,
                       "expected 'left right', got '" + std::string(line) + "'");
    }
    merges.emplace_back(std::string(line.substr(0, space)),
                        std::string(line.substr(space + 1)));
  }
  return merges;
}

Vocabulary ParseVocabJson(std::string_view content, std::string_view source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string(source), e.byte, "malformed vocabulary JSON");
  }
  if (!doc.is_object()) {
    throw ParseError(std::string(source), 1,
                     "vocabulary must be a JSON object of token -> id");
  }
  std::unordered_map<std::string, TokenId> map;
  map.reserve(doc.size());
  for (const auto& [token, id] : doc.items()) {
    if (!id.is_number_unsigned() ||
        id.get<std::uint64_t>() > std::numeric_limits<TokenId>::max()) {
      throw ParseError(std::string(source), 1,
                       "id for '" + token + "' is not a non-negative integer");
    }
    map.emplace(token, id.get<TokenId>());
  }
  return Vocabulary(std::move(map));
}

BpeTokenizer LoadBpe(const std::filesystem::path& vocab_path,
                     const std::filesystem::path& merges_path,
                     std::string_view pattern) {
  Vocabulary vocab =
      ParseVocabJson(ReadFile(vocab_path), vocab_path.string());
  auto merges = ParseMerges(ReadFile(merges_path), merges_path.string());
  std::string name = vocab_path.parent_path().filename().string();
  if (name.empty()) name = vocab_path.stem().string();
  return BpeTokenizer(std::move(vocab), merges, pattern, std::move(name));
}

std::vector<std::vector<TokenId>> EncodeCorpus(const BpeTokenizer& tokenizer,
                                               std::span<const Document> documents,
                                               std::size_t threads) {
  std::vector<std::vector<TokenId>> out(documents.size());
  std::vector<std::exception_ptr> errors(documents.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t d = begin; d < end; ++d) {
      try {
        out[d] = tokenizer.EncodeIds(documents[d].text);
      } catch (...) {
        errors[d] = std::current_exception();
      }
    }
  };
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, documents.size()));
  if (threads == 1) {
    work(0, documents.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t block = (documents.size() + threads - 1) / threads;
    for (std::size_t begin = 0; begin < documents.size(); begin += block) {
      pool.emplace_back(work, begin, std::min(documents.size(), begin + block));
    }
  }
  for (std::size_t d = 0; d < documents.size(); ++d) {
    if (!errors[d]) continue;
    try {
      std::rethrow_exception(errors[d]);
    } catch (const Error& e) {
      throw Error(e.code(), "document " + documents[d].id + ": " + e.what());
    }
  }
  return out;
}

}  // namespace tokscope
