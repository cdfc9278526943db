// udpx/tests/unit/alphabet_test.cc

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

#include "udpx/alphabet.h"

#include <sstream>

#include "doctest.h"
#include "udpx/config.h"
#include "udpx/embeddings.h"

namespace udpx {
namespace {

Treebank FromForms(const std::vector<std::vector<std::string>>& sentences,
                   const std::string& label = "dep") {
  Treebank tb;
  for (const auto& forms : sentences) {
    Sentence s;
    for (size_t i = 0; i < forms.size(); ++i) {
      Token t;
      t.form = forms[i];
      t.upos = "X";
      t.head = static_cast<int>(i);
      t.deprel = i == 0 ? "root" : label;
      s.tokens.push_back(t);
    }
    tb.sentences.push_back(s);
  }
  return tb;
}

TEST_CASE("reserved indices are fixed") {
  Alphabet a;
  CHECK(a.size() == Alphabet::kReserved);
  CHECK(a.Add("x") == Alphabet::kReserved);
  CHECK(a.Add("x") == Alphabet::kReserved);
  CHECK(a.Lookup("missing") == Alphabet::kUnk);
  CHECK(a.Symbol(Alphabet::kReserved) == "x");
}

TEST_CASE("labels cover exactly the training relations") {
  Treebank tb = FromForms({{"He", "ran"}}, "nsubj");
  Alphabets a = BuildAlphabets(tb, {});
  CHECK(a.num_labels() == 2);
  CHECK(a.LabelClass("root") == 0);
  CHECK(a.LabelClass("nsubj") == 1);
  CHECK(a.LabelClass("obj") == -1);
  CHECK(a.LabelName(1) == "nsubj");
}

TEST_CASE("max_vocab keeps the most frequent forms") {
  Treebank tb = FromForms({{"a", "a", "b"}});
  Alphabets a = BuildAlphabets(tb, {}, 1);
  CHECK(a.words.num_symbols() == 1);
  CHECK(a.words.Contains("a"));
  CHECK_FALSE(a.words.Contains("b"));
}

TEST_CASE("frequency ties go to the first occurrence") {
  Treebank tb = FromForms({{"c", "b", "a"}});
  Alphabets a = BuildAlphabets(tb, {}, 2);
  CHECK(a.words.Contains("c"));
  CHECK(a.words.Contains("b"));
  CHECK_FALSE(a.words.Contains("a"));
}

TEST_CASE("unlabeled text contributes words but not labels") {
  Treebank tb = FromForms({{"a"}});
  Sentence extra;
  Token t;
  t.form = "zz";
  t.upos = "NOUN";
  extra.tokens.push_back(t);
  Alphabets a = BuildAlphabets(tb, {extra});
  CHECK(a.words.Contains("zz"));
  CHECK(a.pos.Contains("NOUN"));
  CHECK(a.chars.Contains("z"));
  CHECK(a.num_labels() == 1);
}

TEST_CASE("building twice is deterministic") {
  Treebank tb = FromForms({{"x", "y", "x", "z"}, {"z", "w"}});
  CHECK(BuildAlphabets(tb, {}) == BuildAlphabets(tb, {}));
}

TEST_CASE("empty labeled treebank is an error") {
  CHECK_THROWS_AS(BuildAlphabets(Treebank{}, {}), std::invalid_argument);
}

TEST_CASE("word lookup falls back to lowercase") {
  Treebank tb = FromForms({{"house", "Paris"}});
  Alphabets a = BuildAlphabets(tb, {});
  CHECK(a.WordIndex("House") == a.WordIndex("house"));
  CHECK(a.WordIndex("Paris") != Alphabet::kUnk);
  CHECK(a.WordIndex("paris") == Alphabet::kUnk);
  CHECK(a.WordIndex("unseen") == Alphabet::kUnk);
  CHECK(a.PosIndex("") == Alphabet::kUnk);
}

TEST_CASE("alphabets survive a json round trip") {
  Treebank tb = FromForms({{"\xc3\xa9t\xc3\xa9", "b"}});
  Alphabets a = BuildAlphabets(tb, {});
  Alphabets b = Alphabets::FromJson(nlohmann::json::parse(a.ToJson().dump()));
  CHECK(a == b);
  CHECK(b.words.Lookup("b") == a.words.Lookup("b"));
}

TEST_CASE("config files set known keys and reject unknown ones") {
  RunConfig c = ParseConfigString(
      "# comment\n"
      "gamma_wo = 0.5\n"
      "lstm_layers=2\n"
      "counts = 2, 2\n"
      "same_family = true\n");
  CHECK(c.train.gamma_wo == 0.5);
  CHECK(c.train.gamma_mlm == 0.15);
  CHECK(c.model.lstm_layers == 2);
  CHECK(c.selftrain.counts == std::vector<int>{2, 2});
  CHECK(c.selftrain.alpha() == 0.6);
  CHECK(c.selftrain.beta() == 0.03);
  CHECK_THROWS_AS(ParseConfigString("nonsense = 1\n"), ConfigError);
  CHECK_THROWS_AS(ParseConfigString("gamma_wo = abc\n"), ConfigError);
  CHECK_THROWS_AS(ParseConfigString("gamma_wo = -1\n"), ConfigError);
  CHECK_THROWS_AS(ParseConfigString("no equals sign\n"), ConfigError);
}

TEST_CASE("config defaults") {
  RunConfig c;
  CHECK(c.train.gamma_wo == 0.2);
  CHECK(c.train.gamma_mlm == 0.15);
  CHECK(c.train.batch_size == 32);
  CHECK(c.train.max_epochs == 200);
  CHECK(c.train.patience == 20);
  CHECK(c.train.learning_rate == 0.001);
  CHECK(c.train.beta1 == 0.9);
  CHECK(c.train.beta2 == 0.9);
  CHECK(c.train.clip_norm == 5.0);
  CHECK(c.train.lr_decay == 0.999995);
  CHECK(c.train.max_vocab == 100000);
  CHECK(c.selftrain.counts == std::vector<int>{5, 5, 4, 3, 2});
  CHECK(c.selftrain.max_rounds == 8);
  CHECK(c.selftrain.pool_size == 15000);
  CHECK(c.selftrain.alpha() == 0.4);
  CHECK(c.selftrain.beta() == 0.05);
  CHECK(c.model.input_dim() == 200);
  CHECK(c.model.encoder_dim() == 1024);
  CHECK(c.selftrain.ModelsInRound(1) == 5);
  CHECK(c.selftrain.ModelsInRound(5) == 2);
  CHECK(c.selftrain.ModelsInRound(7) == 2);
}

TEST_CASE("self-training schedule validation") {
  SelfTrainConfig c;
  c.counts = {2, 3};
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
  c.counts = {};
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
  c.counts = {1};
  c.max_rounds = 0;
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
}

TEST_CASE("model config json round trip") {
  ModelConfig m;
  m.lstm_hidden = 7;
  m.lm_dim = 3;
  CHECK(ModelConfig::FromJson(m.ToJson()) == m);
}

TEST_CASE("word vectors with and without a header") {
  std::istringstream with("2 3\nthe 1 2 3\ncat 4 5 6\n");
  WordVectors a = LoadWordVectors(with);
  CHECK(a.dim == 3);
  CHECK(a.vectors.size() == 2);
  CHECK(a.vectors.at("cat")[2] == 6);
  std::istringstream without("the 1 2\ncat 4 5\n");
  CHECK(LoadWordVectors(without).dim == 2);
  std::istringstream ragged("the 1 2\ncat 4\n");
  CHECK_THROWS_AS(LoadWordVectors(ragged), FormatError);
}

TEST_CASE("contextual vector blocks attach per sentence") {
  std::istringstream in("1 2\n3 4\n\n5 6\n");
  std::vector<Matrix> blocks = LoadContextualVectors(in);
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0].rows() == 2);
  CHECK(blocks[1](0, 1) == 6);
  std::vector<Sentence> sentences(2);
  sentences[0].tokens.resize(2);
  sentences[1].tokens.resize(1);
  AttachContextualVectors(blocks, sentences);
  CHECK(sentences[0].lm_vectors(1, 0) == 3);
  sentences[1].tokens.resize(2);
  CHECK_THROWS_AS(AttachContextualVectors(blocks, sentences), FormatError);
}

}  // namespace
}  // namespace udpx
