// udpx/tests/unit/model_test.cc

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

#include "udpx/model.h"

#include "doctest.h"
#include "gradcheck.h"
#include "synthetic.h"
#include "temp_dir.h"

namespace udpx {
namespace {

struct ModelFixture {
  Treebank train;
  Alphabets alphabets;
  ModelConfig config = testing::TinyModelConfig();

  ModelFixture() {
    Rng rng(51);
    train = testing::GenerateTreebank(30, rng);
    alphabets = BuildAlphabets(train, {});
  }
};

TEST_CASE("gold trees round trip through label classes") {
  ModelFixture f;
  for (const Sentence& s : f.train.sentences) {
    ParsedTree t = GoldTree(s, f.alphabets);
    Sentence copy = s;
    for (Token& tok : copy.tokens) tok.head.reset(), tok.deprel.reset();
    ApplyTree(t, f.alphabets, copy);
    for (int i = 0; i < s.size(); ++i) {
      CHECK(copy.tokens[i].head == s.tokens[i].head);
      CHECK(copy.tokens[i].deprel == s.tokens[i].deprel);
    }
  }
  Sentence bad = f.train.sentences[0];
  bad.tokens[0].deprel = "unseen";
  CHECK_THROWS_AS(GoldTree(bad, f.alphabets), std::invalid_argument);
  bad.tokens[0].head.reset();
  CHECK_THROWS_AS(GoldTree(bad, f.alphabets), std::invalid_argument);
}

TEST_CASE("same seed builds identical models") {
  ModelFixture f;
  Model a(f.config, f.alphabets, 7), b(f.config, f.alphabets, 7), c(f.config, f.alphabets, 8);
  const auto sa = a.store().Snapshot(), sb = b.store().Snapshot(), sc = c.store().Snapshot();
  CHECK(sa == sb);
  CHECK(sa != sc);
}

TEST_CASE("parse output is a valid tree") {
  ModelFixture f;
  Model m(f.config, f.alphabets, 3);
  for (const Sentence& s : f.train.sentences) {
    ParsedTree t = m.Parse(m.Index(s));
    CHECK(IsTree(t.heads));
    CHECK(m.Distribution(m.Index(s)).IsNormalized(1e-9));
  }
}

TEST_CASE("end-to-end parse loss gradients match finite differences") {
  ModelFixture f;
  f.config.lstm_layers = 1;
  Model m(f.config, f.alphabets, 4);
  const Sentence& s = f.train.sentences[0];
  IndexedSentence idx = m.Index(s);
  ParsedTree gold = GoldTree(s, f.alphabets);
  std::vector<Value> params;
  for (const Value& p : m.store().params()) {
    // The MLM projection and WO head are not on this path.
    if (p.name().rfind("encoder.", 0) == 0 || p.name().rfind("parser.", 0) == 0) {
      params.push_back(p);
    }
  }
  auto loss = [&] {
    Rng drop(2);
    return m.ParseLoss(idx, gold, ForwardContext::Training(drop));
  };
  // Loss is a sum over tokens (~20), so differences carry ~1e-10 noise;
  // the larger floor keeps near-zero entries from dominating.
  const auto r = testing::CheckGradients(loss, params, 1e-5, 1e-5);
  INFO(r.worst << " " << r.worst_analytic << " " << r.worst_numeric);
  CHECK(r.max_rel_error < 1e-4);
}

TEST_CASE("checkpoints restore parameters, alphabets and extra metadata") {
  ModelFixture f;
  testing::TempDir dir;
  Model m(f.config, f.alphabets, 5);
  const std::string path = dir.File("m.ckpt");
  SaveCheckpoint(m, path, {{"note", "x"}});
  CHECK(testing::ReadFile(path).rfind(std::string(kCheckpointMagic) + "\n", 0) == 0);
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));

  nlohmann::json extra;
  std::unique_ptr<Model> back = LoadCheckpoint(path, &extra);
  CHECK(extra["note"] == "x");
  CHECK(back->config() == m.config());
  CHECK(back->alphabets().words.size() == m.alphabets().words.size());
  CHECK(back->store().Snapshot() == m.store().Snapshot());
  for (const Sentence& s : f.train.sentences) {
    CHECK(back->Distribution(back->Index(s)).arc_matrix() ==
          m.Distribution(m.Index(s)).arc_matrix());
  }
}

TEST_CASE("corrupted checkpoints are rejected") {
  ModelFixture f;
  testing::TempDir dir;
  Model m(f.config, f.alphabets, 6);
  const std::string path = dir.File("m.ckpt");
  SaveCheckpoint(m, path);
  const std::string good = testing::ReadFile(path);

  CHECK_THROWS_AS(LoadCheckpoint(dir.File("missing.ckpt")), CheckpointError);

  testing::WriteFile(path, "NOT-A-CKPT\n" + good.substr(good.find('\n') + 1));
  CHECK_THROWS_AS(LoadCheckpoint(path), CheckpointError);

  std::string reshaped = good;
  const std::string line = "tensor encoder.root f64 1 ";
  const size_t at = reshaped.find(line);
  REQUIRE(at != std::string::npos);
  reshaped.replace(at, line.size(), "tensor encoder.root f64 2 ");
  testing::WriteFile(path, reshaped);
  CHECK_THROWS_WITH_AS(LoadCheckpoint(path), doctest::Contains("shape"), CheckpointError);

  std::string renamed = good;
  renamed.replace(renamed.find("tensor parser.arc_b "), 20, "tensor parser.arc_x ");
  testing::WriteFile(path, renamed);
  CHECK_THROWS_AS(LoadCheckpoint(path), CheckpointError);

  testing::WriteFile(path, good.substr(0, good.size() - 16));
  CHECK_THROWS_AS(LoadCheckpoint(path), CheckpointError);
}

}  // namespace
}  // namespace udpx
