// udpx/cli.cc

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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "udpx/evaluator.h"
#include "udpx/selftrain.h"
#include "udpx/trainer.h"

namespace udpx {

namespace {

namespace fs = std::filesystem;

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

Treebank ReadTreebank(const std::string& path, Split split) {
  std::ifstream in = OpenInput(path);
  try {
    Treebank tb = ParseConllu(in);
    tb.split = split;
    return tb;
  } catch (const FormatError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::vector<Sentence> ReadText(const std::string& path, size_t min_words) {
  std::ifstream in = OpenInput(path);
  try {
    return LoadUnlabeled(in, min_words);
  } catch (const FormatError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void AttachVectors(const std::string& path, std::vector<Sentence>& sentences) {
  std::ifstream in = OpenInput(path);
  try {
    AttachContextualVectors(LoadContextualVectors(in), sentences);
  } catch (const FormatError& e) {
    throw DataError(path + ": " + e.what());
  }
}

bool LooksLikeConllu(const std::string& path) {
  std::ifstream in = OpenInput(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    return line.find('\t') != std::string::npos;
  }
  return true;
}

RunConfig LoadRunConfig(const std::string& path,
                        const std::vector<std::string>& overrides) {
  RunConfig cfg;
  try {
    if (!path.empty()) {
      std::ifstream in = OpenInput(path);
      cfg = ParseConfig(in);
    }
    for (const std::string& kv : overrides) {
      const size_t eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("expected key=value: " + kv);
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      SetConfigValue(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
  } catch (const ConfigError& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return cfg;
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

WordVectors ReadWordVectors(const std::string& path) {
  std::ifstream in = OpenInput(path);
  try {
    return LoadWordVectors(in);
  } catch (const FormatError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void SetLmDim(RunConfig& cfg, const std::vector<Sentence>& sentences) {
  for (const Sentence& s : sentences) {
    if (s.lm_vectors.size() == 0) continue;
    const int dim = static_cast<int>(s.lm_vectors.cols());
    if (cfg.model.lm_dim == 0) cfg.model.lm_dim = dim;
    if (cfg.model.lm_dim != dim) {
      throw DataError("contextual vectors have width " + std::to_string(dim) +
                      ", config says lm_dim = " +
                      std::to_string(cfg.model.lm_dim));
    }
    return;
  }
}

// Copies every character to two buffers.
class TeeBuffer : public std::streambuf {
 public:
  TeeBuffer(std::streambuf* a, std::streambuf* b) : a_(a), b_(b) {}

 protected:
  int overflow(int c) override {
    if (traits_type::eq_int_type(c, traits_type::eof())) {
      return traits_type::not_eof(c);
    }
    const char ch = traits_type::to_char_type(c);
    const bool ok = !traits_type::eq_int_type(a_->sputc(ch), traits_type::eof()) &&
                    !traits_type::eq_int_type(b_->sputc(ch), traits_type::eof());
    return ok ? c : traits_type::eof();
  }
  int sync() override { return a_->pubsync() == 0 && b_->pubsync() == 0 ? 0 : -1; }

 private:
  std::streambuf* a_;
  std::streambuf* b_;
};

struct TrainArgs {
  std::string train, dev, embeddings, contextual, dev_contextual, config, out;
  std::vector<std::string> lm_text, overrides;
  uint64_t seed = 0;
};

int CmdTrain(const TrainArgs& a, const nlohmann::json& flags, std::ostream& out,
             std::ostream& err) {
  RunConfig cfg = LoadRunConfig(a.config, a.overrides);
  cfg.train.seed = a.seed;
  Treebank train = ReadTreebank(a.train, Split::kTrain);
  Treebank dev = ReadTreebank(a.dev, Split::kDev);
  if (train.empty()) throw DataError(a.train + ": no sentences");
  if (dev.empty()) throw DataError(a.dev + ": no sentences");
  if (!a.contextual.empty()) {
    AttachVectors(a.contextual, train.sentences);
    SetLmDim(cfg, train.sentences);
  }
  if (!a.dev_contextual.empty()) AttachVectors(a.dev_contextual, dev.sentences);

  Treebank text;
  for (const std::string& path : a.lm_text) {
    for (Sentence& s : ReadText(path, cfg.train.min_words)) {
      text.sentences.push_back(std::move(s));
    }
  }
  const Alphabets alphabets =
      BuildAlphabets(train, text.sentences, cfg.train.max_vocab);
  Model model(cfg.model, alphabets, a.seed);
  if (!a.embeddings.empty()) {
    const size_t found =
        model.encoder().LoadPretrained(ReadWordVectors(a.embeddings), alphabets);
    err << "pretrained vectors cover " << found << " of "
        << alphabets.words.num_symbols() << " words\n";
  }
  const Treebank* texts[] = {&text};
  TrainData data;
  data.source = &train;
  data.dev = &dev;
  data.lm_pool = BuildLmPool(train, texts, cfg.train.source_lm);

  fs::create_directories(a.out);
  std::ostringstream history;
  TeeBuffer tee(history.rdbuf(), out.rdbuf());
  std::ostream metrics(&tee);
  const TrainResult result = Train(model, data, cfg.train, &metrics);

  nlohmann::json extra = {{"flags", flags},
                          {"config", cfg.ToJson()},
                          {"best_epoch", result.best_epoch},
                          {"best_dev_uas", result.best_dev_uas},
                          {"best_dev_las", result.best_dev_las}};
  SaveCheckpoint(model, (fs::path(a.out) / "model.ckpt").string(), extra);
  WriteFile(fs::path(a.out) / "history.jsonl", history.str());
  WriteFile(fs::path(a.out) / "alphabets.json", alphabets.ToJson().dump(2) + "\n");
  WriteFile(fs::path(a.out) / "flags.json", flags.dump(2) + "\n");
  out << nlohmann::json{{"best_epoch", result.best_epoch},
                        {"dev_uas", result.best_dev_uas},
                        {"dev_las", result.best_dev_las}}
             .dump()
      << '\n';
  return kExitOk;
}

struct ParseArgs {
  std::vector<std::string> models;
  std::string input, output, format = "auto", contextual;
};

int CmdParse(const ParseArgs& a) {
  std::vector<std::shared_ptr<const Model>> members;
  for (const std::string& path : a.models) {
    try {
      members.push_back(LoadCheckpoint(path));
    } catch (const CheckpointError& e) {
      throw DataError(e.what());
    }
  }
  Ensemble ensemble;
  try {
    ensemble = Ensemble(members);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  const bool conllu =
      a.format == "conllu" || (a.format == "auto" && LooksLikeConllu(a.input));
  Treebank input;
  if (conllu) {
    input = ReadTreebank(a.input, Split::kTest);
  } else {
    input.sentences = ReadText(a.input, 0);
  }
  if (!a.contextual.empty()) AttachVectors(a.contextual, input.sentences);
  const Treebank parsed = ensemble.Predict(input);
  WriteFile(a.output, SerializeConlluString(parsed));
  return kExitOk;
}

struct SelfTrainArgs {
  std::string source_train, source_dev, target_train, target_test, embeddings,
      config, out;
  std::vector<std::string> target_text, overrides;
  uint64_t seed = 0;
  int jobs = 0;
};

int CmdSelfTrain(const SelfTrainArgs& a, const nlohmann::json& flags,
                 std::ostream& out, std::ostream& err) {
  RunConfig cfg = LoadRunConfig(a.config, a.overrides);
  cfg.train.seed = a.seed;
  if (a.jobs > 0) cfg.selftrain.jobs = a.jobs;
  try {
    cfg.selftrain.Validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  Treebank train = ReadTreebank(a.source_train, Split::kTrain);
  Treebank dev = ReadTreebank(a.source_dev, Split::kDev);
  Treebank pool;
  for (const std::string& path : a.target_text) {
    for (Sentence& s : ReadText(path, cfg.train.min_words)) {
      pool.sentences.push_back(std::move(s));
    }
  }
  if (pool.sentences.size() > cfg.selftrain.pool_size) {
    pool.sentences.resize(cfg.selftrain.pool_size);
  }
  Treebank test, target_gold;
  if (!a.target_test.empty()) test = ReadTreebank(a.target_test, Split::kTest);
  if (!a.target_train.empty()) {
    target_gold = ReadTreebank(a.target_train, Split::kTrain);
  }
  Treebank labeled = train;
  labeled.sentences.insert(labeled.sentences.end(), target_gold.sentences.begin(),
                           target_gold.sentences.end());
  const Alphabets alphabets =
      BuildAlphabets(labeled, pool.sentences, cfg.train.max_vocab);
  WordVectors vectors;
  if (!a.embeddings.empty()) vectors = ReadWordVectors(a.embeddings);

  fs::create_directories(a.out);
  WriteFile(fs::path(a.out) / "flags.json", flags.dump(2) + "\n");
  SelfTrainInputs inputs;
  inputs.source_train = &train;
  inputs.source_dev = &dev;
  inputs.target_pool = &pool;
  inputs.target_labeled = a.target_train.empty() ? nullptr : &target_gold;
  inputs.report_test = a.target_test.empty() ? nullptr : &test;
  inputs.pretrained = a.embeddings.empty() ? nullptr : &vectors;
  const SelfTrainResult result = SelfTrain(inputs, alphabets, cfg, a.out, &err);
  out << nlohmann::json{{"rounds", result.rounds.size()},
                        {"termination", result.termination},
                        {"ensemble_dev_uas", result.rounds.back().ensemble_dev_uas},
                        {"ensemble_dev_las", result.rounds.back().ensemble_dev_las}}
             .dump()
      << '\n';
  return kExitOk;
}

struct EvalArgs {
  std::string pred, gold, baseline, significance;
  bool exclude_punct = false;
  std::optional<uint64_t> seed;
};

int CmdEval(const EvalArgs& a, std::ostream& out) {
  if (a.pred.empty() && a.baseline.empty()) {
    throw UsageError("eval needs --pred or --baseline");
  }
  if (!a.baseline.empty() && a.baseline != "right-arc") {
    throw UsageError("unknown baseline '" + a.baseline + "'");
  }
  if (!a.significance.empty() && !a.seed) {
    throw UsageError("--significance requires --seed");
  }
  const Treebank gold = ReadTreebank(a.gold, Split::kTest);
  const Treebank pred =
      a.pred.empty() ? RightArcBaseline(gold) : ReadTreebank(a.pred, Split::kTest);
  try {
    nlohmann::json report = UasLas(pred, gold, a.exclude_punct).ToJson();
    if (!a.pred.empty() && !a.baseline.empty()) {
      report["baseline"] = UasLas(RightArcBaseline(gold), gold, a.exclude_punct).ToJson();
    }
    if (!a.significance.empty()) {
      const Treebank other = ReadTreebank(a.significance, Split::kTest);
      const auto sa = ScoreSentences(pred, gold, a.exclude_punct);
      const auto sb = ScoreSentences(other, gold, a.exclude_punct);
      Rng rng(*a.seed);
      report["significance"] = BootstrapSignificance(sa, sb, rng).ToJson();
    }
    out << report.dump() << '\n';
  } catch (const AlignmentError& e) {
    throw DataError(e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Cross-lingual dependency parser with LM multi-task training "
               "and ensemble self-training",
               "udpx"};
  app.require_subcommand(1);

  TrainArgs train;
  CLI::App* cmd_train = app.add_subcommand("train", "train one parser");
  cmd_train->add_option("--train", train.train, "training CoNLL-U")->required();
  cmd_train->add_option("--dev", train.dev, "dev CoNLL-U")->required();
  cmd_train->add_option("--lm-text", train.lm_text, "unlabeled text (repeatable)");
  cmd_train->add_option("--embeddings", train.embeddings, "pretrained word vectors");
  cmd_train->add_option("--contextual-vectors", train.contextual,
                        "per-token vectors for the training sentences");
  cmd_train->add_option("--dev-contextual-vectors", train.dev_contextual,
                        "per-token vectors for the dev sentences");
  cmd_train->add_option("--config", train.config, "key = value config file");
  cmd_train->add_option("--set", train.overrides, "key=value override (repeatable)");
  cmd_train->add_option("--seed", train.seed, "random seed")->required();
  cmd_train->add_option("--out", train.out, "output directory")->required();

  ParseArgs parse;
  CLI::App* cmd_parse = app.add_subcommand("parse", "parse with one model or an ensemble");
  cmd_parse->add_option("--model,--ensemble", parse.models,
                        "checkpoint (repeat to ensemble)")
      ->required();
  cmd_parse->add_option("--input", parse.input, "CoNLL-U or one sentence per line")
      ->required();
  cmd_parse->add_option("--output", parse.output, "output CoNLL-U")->required();
  cmd_parse->add_option("--input-format", parse.format, "auto, conllu or text")
      ->check(CLI::IsMember({"auto", "conllu", "text"}));
  cmd_parse->add_option("--contextual-vectors", parse.contextual,
                        "per-token vectors for the input");

  SelfTrainArgs st;
  CLI::App* cmd_st = app.add_subcommand("selftrain", "ensemble self-training");
  cmd_st->add_option("--source-train", st.source_train, "source CoNLL-U")->required();
  cmd_st->add_option("--source-dev", st.source_dev, "source dev CoNLL-U")->required();
  cmd_st->add_option("--target-text", st.target_text, "unlabeled target text (repeatable)");
  cmd_st->add_option("--target-train", st.target_train,
                     "gold target CoNLL-U for few-shot runs, weight 1");
  cmd_st->add_option("--target-test", st.target_test,
                     "gold target CoNLL-U, scored in the round reports only");
  cmd_st->add_option("--embeddings", st.embeddings, "pretrained word vectors");
  cmd_st->add_option("--config", st.config, "key = value config file");
  cmd_st->add_option("--set", st.overrides, "key=value override (repeatable)");
  cmd_st->add_option("--seed", st.seed, "random seed")->required();
  cmd_st->add_option("--jobs", st.jobs, "students trained in parallel");
  cmd_st->add_option("--out", st.out, "output directory")->required();

  EvalArgs ev;
  CLI::App* cmd_eval = app.add_subcommand("eval", "attachment scores");
  cmd_eval->add_option("--gold", ev.gold, "gold CoNLL-U")->required();
  cmd_eval->add_option("--pred", ev.pred, "predicted CoNLL-U");
  cmd_eval->add_flag("--exclude-punct", ev.exclude_punct, "skip punctuation tokens");
  cmd_eval->add_option("--baseline", ev.baseline, "right-arc");
  cmd_eval->add_option("--significance", ev.significance,
                       "second prediction for a paired bootstrap test");
  cmd_eval->add_option("--seed", ev.seed, "random seed for the bootstrap");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  nlohmann::json flags = nlohmann::json::array();
  for (const std::string& arg : args) flags.push_back(arg);
  try {
    if (cmd_train->parsed()) return CmdTrain(train, flags, out, err);
    if (cmd_parse->parsed()) return CmdParse(parse);
    if (cmd_st->parsed()) return CmdSelfTrain(st, flags, out, err);
    return CmdEval(ev, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
}

}  // namespace udpx
