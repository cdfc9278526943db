// udpx/tests/unit/evaluator_test.cc

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

#include "udpx/evaluator.h"

#include <algorithm>

#include "doctest.h"
#include "synthetic.h"

namespace udpx {
namespace {

Sentence Make(const std::vector<int>& heads, const std::vector<std::string>& labels,
              const std::vector<bool>& punct = {}) {
  Sentence s;
  for (size_t i = 0; i < heads.size(); ++i) {
    Token t;
    t.form = "w" + std::to_string(i);
    t.head = heads[i];
    t.deprel = labels[i];
    t.is_punct = i < punct.size() && punct[i];
    t.upos = t.is_punct ? "PUNCT" : "X";
    s.tokens.push_back(t);
  }
  return s;
}

Treebank Bank(std::vector<Sentence> s) {
  Treebank tb;
  tb.sentences = std::move(s);
  return tb;
}

TEST_CASE("attachment scores on a hand example") {
  Treebank gold = Bank({Make({2, 0, 2}, {"nsubj", "root", "punct"}, {false, false, true})});
  Treebank pred = Bank({Make({2, 0, 1}, {"obj", "root", "punct"})});
  AttachmentScore all = UasLas(pred, gold, false);
  CHECK(all.uas == doctest::Approx(2.0 / 3));
  CHECK(all.las == doctest::Approx(1.0 / 3));
  CHECK(all.counted_tokens == 3);
  AttachmentScore no_punct = UasLas(pred, gold, true);
  CHECK(no_punct.counted_tokens == 2);
  CHECK(no_punct.excluded_tokens == 1);
  CHECK(no_punct.uas == 1.0);
  CHECK(no_punct.las == 0.5);
  nlohmann::json j = no_punct.ToJson();
  CHECK(j["counted_tokens"] == 2);
  CHECK(j.contains("uas"));
}

TEST_CASE("predicted tokens without heads count as wrong") {
  Treebank gold = Bank({Make({0, 1}, {"root", "obj"})});
  Treebank pred = gold;
  pred.sentences[0].tokens[1].head.reset();
  CHECK(UasLas(pred, gold, false).uas == 0.5);
}

TEST_CASE("misaligned treebanks name the sentence") {
  Treebank gold = Bank({Make({0}, {"root"}), Make({0, 1}, {"root", "obj"})});
  Treebank pred = Bank({Make({0}, {"root"}), Make({0}, {"root"})});
  CHECK_THROWS_WITH_AS(UasLas(pred, gold, false), doctest::Contains("2"), AlignmentError);
  CHECK_THROWS_AS(UasLas(Bank({Make({0}, {"root"})}), gold, false), AlignmentError);
  Treebank unheaded = gold;
  unheaded.sentences[1].tokens[0].head.reset();
  CHECK_THROWS_AS(UasLas(gold, unheaded, false), AlignmentError);
}

TEST_CASE("las never exceeds uas and both stay in range") {
  Rng rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Sentence> g, p;
    const int n = 1 + static_cast<int>(rng() % 5);
    for (int k = 0; k < n; ++k) {
      Sentence a = testing::RandomSentence(1 + static_cast<int>(rng() % 8), rng);
      Sentence b = a;
      for (Token& t : b.tokens) {
        if (rng() % 2) t.head = static_cast<int>(rng() % (a.tokens.size() + 1));
        if (rng() % 2) t.deprel = "x";
      }
      g.push_back(a);
      p.push_back(b);
    }
    for (bool ex : {false, true}) {
      AttachmentScore s = UasLas(Bank(p), Bank(g), ex);
      CHECK(s.las <= s.uas);
      CHECK(s.uas >= 0);
      CHECK(s.uas <= 1);
    }
    CHECK(UasLas(Bank(g), Bank(g), false).las == 1.0);
  }
}

TEST_CASE("right-arc baseline attaches each word to its predecessor") {
  Treebank gold = Bank({Make({0, 1, 2}, {"root", "a", "b"}), Make({2, 0}, {"a", "root"})});
  Treebank base = RightArcBaseline(gold);
  CHECK(base.sentences[0].heads() == std::vector<int>{0, 1, 2});
  CHECK(base.sentences[1].heads() == std::vector<int>{0, 1});
  CHECK(*base.sentences[1].tokens[0].deprel == kBaselineLabel);
  AttachmentScore s = UasLas(base, gold, false);
  CHECK(s.uas == doctest::Approx(3.0 / 5));
  CHECK(s.las == 0);
}

std::vector<SentenceScore> Scores(const std::vector<std::pair<int, int>>& heads_counted) {
  std::vector<SentenceScore> out;
  for (auto [correct, counted] : heads_counted) {
    SentenceScore s;
    s.counted = static_cast<size_t>(counted);
    s.correct_heads = static_cast<size_t>(correct);
    s.correct_labeled = static_cast<size_t>(correct);
    out.push_back(s);
  }
  return out;
}

TEST_CASE("bootstrap on identical and dominating systems") {
  Rng rng(72);
  std::vector<std::pair<int, int>> base, better;
  for (int k = 0; k < 60; ++k) {
    base.emplace_back(k % 5, 6);
    better.emplace_back(6, 6);
  }
  const auto a = Scores(base), b = Scores(better);
  Significance same = BootstrapSignificance(a, a, rng);
  CHECK(same.p_uas == 1.0);
  CHECK(same.p_las == 1.0);
  Significance dom = BootstrapSignificance(b, a, rng);
  CHECK(dom.p_uas == 0.0);
  CHECK(dom.p_las == 0.0);
  CHECK(BootstrapSignificance(a, b, rng).p_uas == 1.0);
  CHECK(dom.ToJson().contains("p_uas"));
}

TEST_CASE("bootstrap agrees with an independent resampler") {
  Rng data(73);
  std::vector<std::pair<int, int>> xs, ys;
  for (int k = 0; k < 80; ++k) {
    const int n = 3 + static_cast<int>(data() % 10);
    xs.emplace_back(static_cast<int>(data() % (n + 1)), n);
    ys.emplace_back(static_cast<int>(data() % (n + 1)), n);
  }
  const auto a = Scores(xs), b = Scores(ys);
  Rng r1(1), r2(2);
  const int trials = 20000;
  const double p = BootstrapSignificance(a, b, r1, 50, trials).p_uas;

  std::vector<size_t> all(a.size());
  std::iota(all.begin(), all.end(), 0);
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<size_t> sample;
    std::sample(all.begin(), all.end(), std::back_inserter(sample), 50, r2);
    double ca = 0, cb = 0, n = 0;
    for (size_t i : sample) {
      ca += a[i].correct_heads;
      cb += b[i].correct_heads;
      n += a[i].counted;
    }
    hits += ca / n <= cb / n;
  }
  INFO(p << " vs " << hits / double(trials));
  CHECK(p > 0.05);
  CHECK(p < 0.95);
  CHECK(std::abs(p - hits / double(trials)) < 0.02);
}

TEST_CASE("bootstrap input validation") {
  Rng rng(74);
  const auto small = Scores(std::vector<std::pair<int, int>>(49, {1, 2}));
  CHECK_THROWS_AS(BootstrapSignificance(small, small, rng), std::invalid_argument);
  const auto big = Scores(std::vector<std::pair<int, int>>(50, {1, 2}));
  CHECK_THROWS_AS(BootstrapSignificance(big, small, rng), std::invalid_argument);
  CHECK_NOTHROW(BootstrapSignificance(big, big, rng));
}

}  // namespace
}  // namespace udpx
