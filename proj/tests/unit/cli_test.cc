// udpx/tests/unit/cli_test.cc

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

#include "udpx/cli.h"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "udpx/conllu.h"
#include "udpx/model.h"

#include "doctest.h"
#include "synthetic.h"
#include "temp_dir.h"

namespace udpx {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = 0;
  std::string out, err;
};

CliRun Run(std::vector<std::string> args) {
  args.insert(args.begin(), "udpx");
  std::ostringstream out, err;
  CliRun r;
  r.code = RunCli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

const std::vector<std::string> kTiny = {
    "--set", "word_dim=4",      "--set", "char_dim=3",     "--set", "pos_dim=2",
    "--set", "char_filters=3",  "--set", "lstm_layers=1",  "--set", "lstm_hidden=4",
    "--set", "arc_mlp=4",       "--set", "label_mlp=3",    "--set", "wo_dim=3",
    "--set", "max_epochs=2",    "--set", "batch_size=10",  "--set", "min_words=0"};

struct CliFixture {
  testing::TempDir dir;
  std::string train, dev, text, test;

  CliFixture() {
    Rng rng(91);
    train = dir.File("train.conllu");
    dev = dir.File("dev.conllu");
    test = dir.File("test.conllu");
    text = dir.File("text.txt");
    testing::WriteFile(train, SerializeConlluString(testing::GenerateTreebank(30, rng)));
    testing::WriteFile(dev, SerializeConlluString(testing::GenerateTreebank(10, rng)));
    testing::WriteFile(test, SerializeConlluString(testing::GenerateTreebank(10, rng)));
    testing::WriteFile(text, testing::ToTaggedText(testing::GenerateTreebank(10, rng)));
  }

  CliRun Train(const std::string& out, const std::string& seed = "3") {
    std::vector<std::string> args = {"train", "--train", train, "--dev", dev,
                                     "--lm-text", text, "--seed", seed, "--out", out};
    args.insert(args.end(), kTiny.begin(), kTiny.end());
    return Run(args);
  }
};

TEST_CASE("usage errors exit with 2") {
  CHECK(Run({}).code == kExitUsage);
  CHECK(Run({"frobnicate"}).code == kExitUsage);
  CHECK(Run({"train", "--train", "x"}).code == kExitUsage);
  CHECK(Run({"eval", "--gold", "g", "--baseline", "left-arc"}).code == kExitUsage);
  CHECK(Run({"eval", "--gold", "g", "--pred", "p", "--significance", "q"}).code == kExitUsage);
  CHECK(Run({"--help"}).code == kExitOk);
}

TEST_CASE("data errors exit with 1 and name the path") {
  CliFixture f;
  CliRun r = Run({"eval", "--gold", f.dir.File("nope.conllu"), "--pred", f.dev});
  CHECK(r.code == kExitDataError);
  CHECK(r.err.find("nope.conllu") != std::string::npos);
  r = Run({"train", "--train", f.dir.File("missing.conllu"), "--dev", f.dev,
           "--seed", "1", "--out", f.dir.File("o")});
  CHECK(r.code == kExitDataError);
  CHECK(r.err.find("missing.conllu") != std::string::npos);
  CHECK(Run({"eval", "--gold", f.dev, "--pred", f.test}).code == kExitDataError);
  CHECK(Run({"parse", "--model", f.train, "--input", f.dev, "--output",
             f.dir.File("p.conllu")}).code == kExitDataError);
}

TEST_CASE("unknown config keys are usage errors") {
  CliFixture f;
  CliRun r = Run({"train", "--train", f.train, "--dev", f.dev, "--seed", "1", "--out",
                  f.dir.File("o"), "--set", "no_such_key=1"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("no_such_key") != std::string::npos);
}

TEST_CASE("train writes artifacts deterministically") {
  CliFixture f;
  const std::string a = f.dir.File("a"), b = f.dir.File("b");
  CliRun ra = f.Train(a);
  REQUIRE(ra.code == kExitOk);
  REQUIRE(f.Train(b).code == kExitOk);
  CHECK(testing::ReadFile(a + "/model.ckpt").rfind("UDPX-CKPT-1\n", 0) == 0);
  CHECK(testing::ReadFile(a + "/history.jsonl") == testing::ReadFile(b + "/history.jsonl"));
  CHECK(fs::exists(a + "/alphabets.json"));
  const nlohmann::json flags = nlohmann::json::parse(testing::ReadFile(a + "/flags.json"));
  CHECK(flags[0] == "udpx");
  CHECK(flags[1] == "train");
  // Two epoch lines plus the summary on stdout.
  std::istringstream lines(ra.out);
  std::string line, last;
  int n = 0;
  while (std::getline(lines, line)) ++n, last = line;
  CHECK(n == 3);
  CHECK(nlohmann::json::parse(last).contains("dev_uas"));
  nlohmann::json extra;
  LoadCheckpoint(a + "/model.ckpt", &extra);
  CHECK(extra["flags"] == flags);
}

TEST_CASE("parse: ensembles of one model, text input and empty input") {
  CliFixture f;
  const std::string m = f.dir.File("m");
  REQUIRE(f.Train(m).code == kExitOk);
  const std::string ckpt = m + "/model.ckpt";
  const std::string one = f.dir.File("one.conllu"), two = f.dir.File("two.conllu");
  CHECK(Run({"parse", "--model", ckpt, "--input", f.test, "--output", one}).code == kExitOk);
  CHECK(Run({"parse", "--model", ckpt, "--ensemble", ckpt, "--input", f.test, "--output", two})
            .code == kExitOk);
  CHECK(testing::ReadFile(one) == testing::ReadFile(two));
  const Treebank parsed = ParseConlluString(testing::ReadFile(one));
  CHECK(parsed.size() == 10);

  const std::string from_text = f.dir.File("text.conllu");
  CHECK(Run({"parse", "--model", ckpt, "--input", f.text, "--output", from_text}).code == kExitOk);
  const Treebank t = ParseConlluString(testing::ReadFile(from_text));
  CHECK(t.size() == 10);
  for (const Sentence& s : t.sentences) {
    CHECK(s.fully_annotated());
    CHECK(IsTree(s.heads()));
  }

  const std::string empty = f.dir.File("empty.txt"), empty_out = f.dir.File("empty.conllu");
  testing::WriteFile(empty, "");
  CHECK(Run({"parse", "--model", ckpt, "--input", empty, "--output", empty_out}).code == kExitOk);
  CHECK(testing::ReadFile(empty_out).empty());
}

TEST_CASE("parse rejects ensembles with different alphabets") {
  CliFixture f;
  const std::string a = f.dir.File("a"), b = f.dir.File("b");
  REQUIRE(f.Train(a).code == kExitOk);
  Rng rng(5);
  testing::GrammarOptions other;
  other.content_prefix = "x";
  testing::WriteFile(f.train, SerializeConlluString(testing::GenerateTreebank(30, rng, other)));
  REQUIRE(f.Train(b).code == kExitOk);
  CliRun r = Run({"parse", "--model", a + "/model.ckpt", "--model", b + "/model.ckpt",
                  "--input", f.test, "--output", f.dir.File("x.conllu")});
  CHECK(r.code == kExitDataError);
  CHECK(r.err.find("alphabets") != std::string::npos);
}

TEST_CASE("eval reports, baseline and significance") {
  CliFixture f;
  CliRun r = Run({"eval", "--gold", f.dev, "--pred", f.dev});
  REQUIRE(r.code == kExitOk);
  nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["uas"] == 1.0);
  CHECK(j["las"] == 1.0);

  r = Run({"eval", "--gold", f.dev, "--baseline", "right-arc"});
  REQUIRE(r.code == kExitOk);
  j = nlohmann::json::parse(r.out);
  CHECK(j["uas"].get<double>() < 1.0);
  CHECK(j["las"] == 0.0);

  Rng rng(6);
  const std::string big = f.dir.File("big.conllu");
  testing::WriteFile(big, SerializeConlluString(testing::GenerateTreebank(60, rng)));
  r = Run({"eval", "--gold", big, "--pred", big, "--significance", big, "--seed", "1",
           "--baseline", "right-arc", "--exclude-punct"});
  REQUIRE(r.code == kExitOk);
  j = nlohmann::json::parse(r.out);
  CHECK(j["significance"]["p_uas"] == 1.0);
  CHECK(j["significance"]["p_las"] == 1.0);
  CHECK(j.contains("baseline"));
}

TEST_CASE("selftrain: one round, same-family confidence and resume") {
  CliFixture f;
  const std::string out = f.dir.File("st");
  std::vector<std::string> args = {"selftrain", "--source-train", f.train, "--source-dev",
                                   f.dev, "--target-text", f.text, "--target-test", f.test,
                                   "--seed", "4", "--out", out, "--set", "counts=2,1",
                                   "--set", "max_rounds=1"};
  args.insert(args.end(), kTiny.begin(), kTiny.end());
  CliRun r = Run(args);
  INFO(r.out << r.err);
  REQUIRE(r.code == kExitOk);
  CHECK(nlohmann::json::parse(r.out)["termination"] == "max_rounds");
  int ckpts = 0;
  for (const auto& e : fs::recursive_directory_iterator(out)) {
    ckpts += e.path().extension() == ".ckpt";
  }
  CHECK(ckpts == 2);

  // Later --set assignments win.
  args.insert(args.end(), {"--set", "max_rounds=2", "--set", "same_family=true",
                           "--set", "min_gain=-100"});
  r = Run(args);
  REQUIRE(r.code == kExitOk);
  CHECK(r.err.find("round 1: resumed") != std::string::npos);
  const nlohmann::json report =
      nlohmann::json::parse(testing::ReadFile(out + "/round_2/report.json"));
  CHECK(report["conf"] == 0.6 * 1 + 0.03);
  CHECK(report["members"] == 1);
}

TEST_CASE("the installed binary maps errors to exit codes") {
  const std::string bin = UDPX_BINARY;
  auto status = [&](const std::string& args) {
    const int raw = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  CHECK(status("") == kExitUsage);
  CHECK(status("eval --gold /nonexistent/x.conllu --baseline right-arc") == kExitDataError);
  CHECK(status("--help") == kExitOk);
}

}  // namespace
}  // namespace udpx
