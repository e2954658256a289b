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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "test_util.h"
#include "tokscope/error.h"

namespace tokscope {
namespace {

using testing::TempDir;

TEST(LoadCorpusTest, PlaintextLines) {
  TempDir dir;
  const auto docs = LoadCorpus(dir.Write("c.txt", "a\nb\n"), CorpusFormat::kPlaintextLines);
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].text, "a");
  EXPECT_EQ(docs[1].text, "b");
  EXPECT_NE(docs[0].id, docs[1].id);
}

TEST(LoadCorpusTest, EmptyFile) {
  TempDir dir;
  EXPECT_TRUE(LoadCorpus(dir.Write("e.txt", ""), CorpusFormat::kPlaintextLines).empty());
  EXPECT_TRUE(LoadCorpus(dir.Write("e.jsonl", ""), CorpusFormat::kJsonl).empty());
}

TEST(LoadCorpusTest, JsonlRecord) {
  TempDir dir;
  const auto docs =
      LoadCorpus(dir.Write("c.jsonl", "{\"text\":\"hi\",\"id\":\"d1\"}\n"),
                 CorpusFormat::kJsonl);
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0], (Document{"d1", "hi"}));
}

TEST(LoadCorpusTest, JsonlWithoutIdsGetsRecordIds) {
  const auto docs =
      ParseCorpus("{\"text\":\"x\"}\n\n{\"text\":\"y\"}\n", CorpusFormat::kJsonl);
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_NE(docs[0].id, docs[1].id);
  EXPECT_EQ(docs[1].text, "y");
}

TEST(LoadCorpusTest, DocumentCountEqualsNonEmptyLines) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    std::string content;
    int non_empty = 0;
    for (int i = 0; i < 40; ++i) {
      if (rng() % 3 == 0) {
        content += "\n";
      } else {
        content += "line " + std::to_string(i) + "\n";
        ++non_empty;
      }
    }
    EXPECT_EQ(ParseCorpus(content, CorpusFormat::kPlaintextLines).size(),
              static_cast<std::size_t>(non_empty));
  }
}

TEST(LoadCorpusTest, MalformedJsonNamesTheLine) {
  try {
    ParseCorpus("{\"text\":\"ok\"}\n{\"text\": oops}\n", CorpusFormat::kJsonl, "in.jsonl");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.source(), "in.jsonl");
    EXPECT_EQ(e.offset(), 2u);
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(LoadCorpusTest, MissingTextField) {
  EXPECT_THROW(ParseCorpus("{\"body\":\"x\"}\n", CorpusFormat::kJsonl), ParseError);
}

TEST(LoadCorpusTest, InvalidUtf8) {
  try {
    ParseCorpus("fine\nbad \xff byte\n", CorpusFormat::kPlaintextLines, "u.txt");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 2u);
  }
}

TEST(LoadCorpusTest, DuplicateIds) {
  EXPECT_THROW(ParseCorpus("{\"text\":\"a\",\"id\":\"x\"}\n{\"text\":\"b\",\"id\":\"x\"}\n",
                           CorpusFormat::kJsonl),
               ParseError);
}

TEST(LoadCorpusTest, MissingFile) {
  try {
    LoadCorpus("/nonexistent/corpus.txt", CorpusFormat::kPlaintextLines);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(TokenStreamTest, Examples) {
  EXPECT_EQ(ParseTokenStream("5 1 5\n").tokens, (std::vector<TokenId>{5, 1, 5}));
  EXPECT_TRUE(ParseTokenStream("").empty());
  try {
    ParseTokenStream("3 -1", "s.txt");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 2u);
    EXPECT_NE(std::string(e.what()).find("s.txt:2"), std::string::npos);
  }
  EXPECT_THROW(ParseTokenStream("1 2.5"), ParseError);
}

TEST(TokenStreamTest, WriteThenLoadRoundTrips) {
  TempDir dir;
  const std::vector<std::vector<TokenId>> lines = {{1, 2, 3}, {}, {40000}};
  std::ostringstream out;
  WriteTokenStream(out, lines);
  const auto path = dir.Write("gpt2.txt", out.str());
  const TokenSequence seq = LoadTokenStream(path);
  EXPECT_EQ(seq.tokens, (std::vector<TokenId>{1, 2, 3, 40000}));
  EXPECT_EQ(seq.source_tokenizer, "gpt2");
}

constexpr std::string_view kHeader = "tokenizer,scale,language,direction,metricx,chrf\n";

TEST(FixtureTest, RowsParse) {
  const auto fixture = ParseDownstreamFixture(
      std::string(kHeader) + "Phi-3-mini,2.7B,cs,en→xx,8.98,37.2\nAya 23,2.7B,zh,en-xx,6.99,21.2\n");
  EXPECT_EQ(fixture.size(), 2u);
  const auto& phi = fixture.At({"Phi-3-mini", ModelScale::k2_7B, "cs", Direction::kEnToXx});
  EXPECT_DOUBLE_EQ(phi.metricx, 8.98);
  EXPECT_DOUBLE_EQ(phi.chrf, 37.2);
  EXPECT_NE(fixture.Find({"Aya 23", ModelScale::k2_7B, "zh", Direction::kEnToXx}), nullptr);
}

TEST(FixtureTest, DuplicateKey) {
  try {
    ParseDownstreamFixture(std::string(kHeader) +
                           "A,2.7B,cs,en-xx,1,2\nA,2.7B,cs,en-xx,3,4\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateKey);
  }
}

TEST(FixtureTest, MissingColumn) {
  EXPECT_THROW(ParseDownstreamFixture("tokenizer,scale,language,direction,metricx\n"),
               ParseError);
}

TEST(FixtureTest, BadNumberNamesTheLine) {
  try {
    ParseDownstreamFixture(std::string(kHeader) + "A,2.7B,cs,en-xx,1,2\nB,2.7B,cs,en-xx,x,2\n",
                           "t.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 3u);
  }
}

TEST(FixtureTest, NegativeScoreRejected) {
  EXPECT_THROW(ParseDownstreamFixture(std::string(kHeader) + "A,2.7B,cs,en-xx,-1,2\n"),
               Error);
}

TEST(FixtureTest, ShippedTableIsComplete) {
  const auto fixture = LoadDownstreamFixture(TOKSCOPE_FIXTURE_PATH);
  EXPECT_EQ(fixture.size(), 96u);
  for (ModelScale scale : {ModelScale::k350M, ModelScale::k2_7B}) {
    EXPECT_EQ(fixture.Tokenizers(scale).size(), 6u);
    EXPECT_EQ(fixture.Languages(scale), (std::vector<std::string>{"cs", "de", "ru", "zh"}));
  }
  EXPECT_DOUBLE_EQ(fixture.MeanMetricX("Phi-3-mini", ModelScale::k2_7B, "cs"), 7.135);
  EXPECT_DOUBLE_EQ(fixture.MeanMetricX("Aya 23", ModelScale::k2_7B, "zh"), 7.215);
}

TEST(FixtureTest, WriteThenLoadRoundTrips) {
  const auto fixture = LoadDownstreamFixture(TOKSCOPE_FIXTURE_PATH);
  std::ostringstream out;
  WriteDownstreamFixture(out, fixture);
  EXPECT_EQ(ParseDownstreamFixture(out.str()), fixture);

  DownstreamFixture odd;
  odd.Add({"name, with \"quotes\"", ModelScale::k350M, "xx", Direction::kXxToEn},
          {0.1 + 0.2, 1e-300});
  std::ostringstream out2;
  WriteDownstreamFixture(out2, odd);
  EXPECT_EQ(ParseDownstreamFixture(out2.str()), odd);
}

TEST(FixtureTest, MissingCell) {
  DownstreamFixture fixture;
  fixture.Add({"A", ModelScale::k2_7B, "cs", Direction::kEnToXx}, {1, 1});
  EXPECT_THROW(fixture.MeanMetricX("A", ModelScale::k2_7B, "cs"), Error);
}

TEST(ParseTest, ScalesAndDirections) {
  EXPECT_EQ(ParseModelScale("350M"), ModelScale::k350M);
  EXPECT_EQ(ParseModelScale("2.7B"), ModelScale::k2_7B);
  EXPECT_THROW(ParseModelScale("7B"), Error);
  EXPECT_EQ(ParseDirection("en->xx"), Direction::kEnToXx);
  EXPECT_EQ(ParseDirection("xx→en"), Direction::kXxToEn);
  EXPECT_THROW(ParseDirection("sideways"), Error);
  EXPECT_EQ(ParseCorpusFormat("jsonl"), CorpusFormat::kJsonl);
  EXPECT_THROW(ParseCorpusFormat("xml"), Error);
}

}  // namespace
}  // namespace tokscope
