// udpx/tests/unit/conllu_test.cc

// Copyright 2026  The udpx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "udpx/conllu.h"

#include <sstream>

#include "doctest.h"
#include "synthetic.h"

namespace udpx {
namespace {

std::string Line(const std::string& id, const std::string& form,
                 const std::string& upos, const std::string& head,
                 const std::string& deprel) {
  return id + "\t" + form + "\t_\t" + upos + "\t_\t_\t" + head + "\t" + deprel +
         "\t_\t_\n";
}

TEST_CASE("reads a two-token block") {
  const std::string text = "# sent_id = 1\n" + Line("1", "He", "PRON", "2", "nsubj") +
                           Line("2", "ran", "VERB", "0", "root") + "\n";
  Treebank tb = ParseConlluString(text);
  REQUIRE(tb.sentences.size() == 1);
  const Sentence& s = tb.sentences[0];
  CHECK(s.size() == 2);
  CHECK(s.heads() == std::vector<int>{2, 0});
  CHECK(*s.tokens[0].deprel == "nsubj");
  CHECK(*s.tokens[1].deprel == "root");
  CHECK(s.tokens[0].upos == "PRON");
}

TEST_CASE("empty input gives an empty treebank") {
  CHECK(ParseConlluString("").empty());
  CHECK(SerializeConlluString(Treebank{}).empty());
}

TEST_CASE("multiword ranges and empty nodes are skipped") {
  const std::string text = Line("1", "I", "PRON", "2", "nsubj") +
                           Line("2", "go", "VERB", "0", "root") +
                           Line("3-4", "to_the", "_", "_", "_") +
                           Line("3", "to", "ADP", "4", "case") +
                           Line("4", "the", "DET", "2", "obl") +
                           Line("4.1", "x", "X", "_", "_") + "\n";
  Treebank tb = ParseConlluString(text);
  REQUIRE(tb.sentences.size() == 1);
  CHECK(tb.sentences[0].size() == 4);
  CHECK(tb.sentences[0].tokens[2].form == "to");
}

TEST_CASE("underscore head and relation are absent") {
  Treebank tb = ParseConlluString(Line("1", "a", "X", "_", "_") +
                                  Line("2", "b", "_", "_", "_"));
  const Token& t = tb.sentences[0].tokens[1];
  CHECK_FALSE(t.head.has_value());
  CHECK_FALSE(t.deprel.has_value());
  CHECK(t.upos.empty());
  CHECK_FALSE(tb.sentences[0].has_heads());
}

TEST_CASE("format errors carry line numbers") {
  auto line_of = [](const std::string& text) -> size_t {
    try {
      ParseConlluString(text);
    } catch (const FormatError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("# c\n1\tonly\tfour\tcols\n") == 2);
  CHECK(line_of(Line("1", "a", "X", "x", "dep")) == 1);
  CHECK(line_of(Line("1", "a", "X", "0", "root") + Line("2", "b", "X", "7", "dep")) == 2);
  CHECK(line_of(Line("1", "a", "X", "0", "root") + Line("2", "b", "X", "2", "dep")) == 2);
  CHECK(line_of(Line("1", "a", "X", "2", "dep") + Line("2", "b", "X", "1", "dep")) > 0);
  CHECK(line_of(Line("1", "a", "X", "0", "root") + Line("3", "b", "X", "1", "dep")) == 2);
  CHECK(line_of(Line("1", "\xff", "X", "0", "root")) == 1);
}

TEST_CASE("serialize writes the used columns and re-parses") {
  Treebank tb = ParseConlluString(Line("1", "He", "PRON", "2", "nsubj") +
                                  Line("2", "ran", "VERB", "0", "root"));
  const std::string out = SerializeConlluString(tb);
  CHECK(out == Line("1", "He", "PRON", "2", "nsubj") +
                   Line("2", "ran", "VERB", "0", "root") + "\n");
  Treebank one;
  Sentence s;
  Token t;
  t.form = "Hi";
  t.upos = "INTJ";
  t.head = 0;
  t.deprel = "root";
  s.tokens.push_back(t);
  one.sentences.push_back(s);
  CHECK(SerializeConlluString(one) == "1\tHi\t_\tINTJ\t_\t_\t0\troot\t_\t_\n\n");
}

TEST_CASE("serializing an unheaded sentence is an error") {
  Treebank tb;
  Sentence s;
  Token t;
  t.form = "x";
  s.tokens.push_back(t);
  tb.sentences.push_back(s);
  CHECK_THROWS_AS(SerializeConlluString(tb), FormatError);
}

TEST_CASE("round trip over random trees") {
  Rng rng(2026);
  Treebank tb;
  std::uniform_int_distribution<int> len(1, 12);
  for (int k = 0; k < 200; ++k) {
    tb.sentences.push_back(testing::RandomSentence(len(rng), rng));
  }
  const std::string text = SerializeConlluString(tb);
  Treebank back = ParseConlluString(text);
  REQUIRE(back.sentences.size() == tb.sentences.size());
  for (size_t s = 0; s < tb.sentences.size(); ++s) {
    for (size_t i = 0; i < tb.sentences[s].tokens.size(); ++i) {
      const Token& a = tb.sentences[s].tokens[i];
      const Token& b = back.sentences[s].tokens[i];
      CHECK(a.form == b.form);
      CHECK(a.upos == b.upos);
      CHECK(a.head == b.head);
      CHECK(a.deprel == b.deprel);
      CHECK(a.is_punct == b.is_punct);
    }
  }
  CHECK(SerializeConlluString(back) == text);
}

TEST_CASE("accepted gold trees are arborescences") {
  CHECK(IsTree({2, 0}));
  CHECK(IsTree({0, 0, 2}));
  CHECK_FALSE(IsTree({2, 1}));
  CHECK_FALSE(IsTree({1}));
  CHECK_FALSE(IsTree({0, 3}));
}

TEST_CASE("unlabeled lines need strictly more than min_words tokens") {
  std::istringstream in(
      "a b c d e f g h i j\n"
      "a b c d e f g h i j k\n"
      "\n"
      "x/NOUN y/VERB ./PUNCT a b c d e f g h\n");
  std::vector<Sentence> out = LoadUnlabeled(in, 10);
  REQUIRE(out.size() == 2);
  CHECK(out[0].size() == 11);
  CHECK(out[1].tokens[0].form == "x");
  CHECK(out[1].tokens[0].upos == "NOUN");
  CHECK(out[1].tokens[2].is_punct);
  CHECK(out[1].tokens[3].upos.empty());
  CHECK_FALSE(out[0].has_heads());
  std::istringstream empty("");
  CHECK(LoadUnlabeled(empty).empty());
}

TEST_CASE("unlabeled text rejects undecodable bytes with a line number") {
  std::istringstream in("fine line\nbad \xc3\n");
  try {
    LoadUnlabeled(in, 0);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("punctuation tags are configurable") {
  ReadOptions opts;
  opts.punct_tags = {"PUNCT", "."};
  Treebank tb = ParseConlluString(Line("1", "a", "NOUN", "0", "root") +
                                      Line("2", ",", ".", "1", "punct"),
                                  opts);
  CHECK(tb.sentences[0].tokens[1].is_punct);
  CHECK_FALSE(tb.sentences[0].tokens[0].is_punct);
}

TEST_CASE("utf-8 helpers") {
  CHECK(Utf8Chars("a\xc3\xa9\xe4\xb8\xad") ==
        std::vector<std::string>{"a", "\xc3\xa9", "\xe4\xb8\xad"});
  CHECK(IsValidUtf8("\xf0\x9f\x98\x80"));
  CHECK_FALSE(IsValidUtf8("\xf0\x9f\x98"));
  CHECK_FALSE(IsValidUtf8("\xc3"));
}

}  // namespace
}  // namespace udpx
