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

// Byte-level BPE in the GPT-2 file format (vocab.json + merges.txt).
//
// Encoding splits text with a pre-tokenization regex, maps every byte of a
// piece to a printable code point, then repeatedly merges the lowest-rank
// adjacent symbol pair (all occurrences, left to right) until no ranked pair
// remains. Added/special tokens get no special treatment.

#ifndef TOKSCOPE_BPE_H_
#define TOKSCOPE_BPE_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tokscope/corpus_io.h"

namespace tokscope {

// Contractions, letter runs, digit runs, punctuation runs, each with an
// optional leading space, then whitespace handling.
inline constexpr std::string_view kGpt2Pattern =
    R"('s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+)";

// GPT-2 byte <-> code point bijection: printable Latin-1 bytes map to
// themselves, the remaining 68 bytes to U+0100.. in byte order.
const std::array<char32_t, 256>& ByteToCodePoint();
std::optional<unsigned char> CodePointToByte(char32_t cp);

// Compiled pre-tokenization regex. Immutable and safe to share between
// threads; every Split call gets its own matcher.
class Pretokenizer {
 public:
  // Throws kInvalidArgument for a pattern ICU cannot compile.
  explicit Pretokenizer(std::string_view pattern = kGpt2Pattern);
  ~Pretokenizer();
  Pretokenizer(const Pretokenizer&) = delete;
  Pretokenizer& operator=(const Pretokenizer&) = delete;

  // Pieces cover `text` exactly: text not matched by the pattern is emitted
  // as its own piece. Input must be valid UTF-8.
  std::vector<std::string> Split(std::string_view text) const;

  const std::string& pattern() const { return pattern_; }

 private:
  struct Compiled;
  std::string pattern_;
  std::unique_ptr<Compiled> compiled_;
};

std::vector<std::string> Pretokenize(std::string_view text,
                                     std::string_view pattern = kGpt2Pattern);

class Vocabulary {
 public:
  Vocabulary() = default;
  // Throws kDuplicateKey when two strings share an id.
  explicit Vocabulary(std::unordered_map<std::string, TokenId> token_to_id);

  std::size_t size() const { return token_to_id_.size(); }
  std::optional<TokenId> Find(std::string_view token) const;
  // nullptr for ids without an entry.
  const std::string* Token(TokenId id) const;

  const std::unordered_map<std::string, TokenId>& token_to_id() const {
    return token_to_id_;
  }

 private:
  std::unordered_map<std::string, TokenId> token_to_id_;
  std::unordered_map<TokenId, std::string> id_to_token_;
};

using MergePair = std::pair<std::string, std::string>;

class BpeTokenizer {
 public:
  // Merge rank is the position in `merges`. Throws kMissingValue when a
  // merge result is not in the vocabulary.
  BpeTokenizer(Vocabulary vocab, const std::vector<MergePair>& merges,
               std::string_view pattern = kGpt2Pattern,
               std::string name = "bpe");

  TokenSequence Encode(std::string_view text) const;
  std::vector<TokenId> EncodeIds(std::string_view text) const;
  // Throws kUnknownToken for ids outside the vocabulary.
  std::string Decode(std::span<const TokenId> tokens) const;

  std::optional<std::size_t> MergeRank(std::string_view left,
                                       std::string_view right) const;

  const Vocabulary& vocabulary() const { return vocab_; }
  std::size_t merge_count() const { return merge_count_; }
  const std::string& pattern() const { return pretokenizer_->pattern(); }
  const std::string& name() const { return name_; }

 private:
  void EncodePiece(std::string_view piece, std::vector<TokenId>& out) const;

  Vocabulary vocab_;
  std::unordered_map<std::string, std::size_t> ranks_;
  std::size_t merge_count_ = 0;
  std::shared_ptr<const Pretokenizer> pretokenizer_;
  std::string name_;
};

// Parses a merges file: one "left right" pair per line, an optional first
// line starting with '#', blank lines ignored.
std::vector<MergePair> ParseMerges(std::string_view content,
                                   std::string_view source = "<memory>");
Vocabulary ParseVocabJson(std::string_view content,
                          std::string_view source = "<memory>");

BpeTokenizer LoadBpe(const std::filesystem::path& vocab_path,
                     const std::filesystem::path& merges_path,
                     std::string_view pattern = kGpt2Pattern);

// Encodes every document, splitting the work over `threads` workers in
// contiguous blocks. The result is independent of the thread count. An
// encoding error in any document is rethrown with the document id.
std::vector<std::vector<TokenId>> EncodeCorpus(const BpeTokenizer& tokenizer,
                                               std::span<const Document> documents,
                                               std::size_t threads = 1);

}  // namespace tokscope

#endif  // TOKSCOPE_BPE_H_
