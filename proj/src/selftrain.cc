// udpx/selftrain.cc

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

#include "udpx/selftrain.h"

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace udpx {

namespace fs = std::filesystem;

double ConfSchedule(int round, const SelfTrainConfig& cfg) {
  if (round < 1) {
    throw std::invalid_argument("conf_schedule: round must be >= 1, got " +
                                std::to_string(round));
  }
  const double conf = cfg.alpha() * round + cfg.beta();
  return cfg.clamp_conf ? std::min(1.0, conf) : conf;
}

ParseDistribution CombineDistributions(std::span<const ParseDistribution> members,
                                       std::span<const double> weights) {
  if (members.empty()) throw std::invalid_argument("ensemble has no members");
  if (weights.size() != members.size()) {
    throw std::invalid_argument("ensemble: one weight per member required");
  }
  Matrix arc = members[0].arc_matrix();
  Matrix label = members[0].label_matrix();
  double total = weights[0];
  // Running weighted mean: m += (w / W) (x - m), exact for equal members.
  for (size_t m = 1; m < members.size(); ++m) {
    const ParseDistribution& d = members[m];
    if (d.arc_matrix().rows() != arc.rows() ||
        d.label_matrix().cols() != label.cols()) {
      throw ShapeError("ensemble: member distributions differ in shape");
    }
    total += weights[m];
    const auto f = static_cast<Scalar>(weights[m] / total);
    arc += f * (d.arc_matrix() - arc);
    label += f * (d.label_matrix() - label);
  }
  return ParseDistribution(std::move(arc), std::move(label));
}

Ensemble::Ensemble(std::vector<std::shared_ptr<const Model>> members,
                   std::vector<double> weights)
    : members_(std::move(members)), weights_(std::move(weights)) {
  if (members_.empty()) throw std::invalid_argument("ensemble has no members");
  if (weights_.empty()) {
    weights_.assign(members_.size(), 1.0 / static_cast<double>(members_.size()));
  }
  if (weights_.size() != members_.size()) {
    throw std::invalid_argument("ensemble: one weight per member required");
  }
  double sum = 0;
  for (double w : weights_) {
    if (!(w > 0)) throw std::invalid_argument("ensemble weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1) > 1e-9) {
    throw std::invalid_argument("ensemble weights must sum to 1");
  }
  for (size_t m = 1; m < members_.size(); ++m) {
    if (!(members_[m]->alphabets() == members_[0]->alphabets())) {
      throw std::invalid_argument("ensemble member " + std::to_string(m + 1) +
                                  " uses different alphabets");
    }
  }
}

ParseDistribution Ensemble::Distribution(const Sentence& s) const {
  const IndexedSentence indexed = members_[0]->Index(s);
  std::vector<ParseDistribution> dists;
  dists.reserve(members_.size());
  for (const auto& m : members_) dists.push_back(m->Distribution(indexed));
  return CombineDistributions(dists, weights_);
}

ParsedTree Ensemble::Parse(const Sentence& s) const {
  return MstDecode(Distribution(s));
}

Treebank Ensemble::Predict(const Treebank& input) const {
  Treebank out = input;
  for (Sentence& s : out.sentences) {
    if (s.size() == 0) continue;
    ApplyTree(Parse(s), alphabets(), s);
  }
  return out;
}

Treebank Annotate(const Ensemble& teacher, const Treebank& pool) {
  Treebank out = teacher.Predict(pool);
  out.split = Split::kTrain;
  return out;
}

namespace {

template <typename T>
nlohmann::json OptionalJson(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <typename T>
std::optional<T> OptionalFrom(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

nlohmann::json RoundReport::ToJson() const {
  return {{"round", round},
          {"conf", OptionalJson(conf)},
          {"members", members},
          {"seeds", seeds},
          {"member_dev_uas", member_dev_uas},
          {"member_dev_las", member_dev_las},
          {"ensemble_dev_uas", ensemble_dev_uas},
          {"ensemble_dev_las", ensemble_dev_las},
          {"gain", OptionalJson(gain)},
          {"test_uas", OptionalJson(test_uas)},
          {"test_las", OptionalJson(test_las)},
          {"pseudo_sentences", pseudo_sentences}};
}

RoundReport RoundReport::FromJson(const nlohmann::json& j) {
  RoundReport r;
  r.round = j.at("round").get<int>();
  r.conf = OptionalFrom<double>(j, "conf");
  r.members = j.at("members").get<int>();
  r.seeds = j.at("seeds").get<std::vector<uint64_t>>();
  r.member_dev_uas = j.at("member_dev_uas").get<std::vector<double>>();
  r.member_dev_las = j.at("member_dev_las").get<std::vector<double>>();
  r.ensemble_dev_uas = j.at("ensemble_dev_uas").get<double>();
  r.ensemble_dev_las = j.at("ensemble_dev_las").get<double>();
  r.gain = OptionalFrom<double>(j, "gain");
  r.test_uas = OptionalFrom<double>(j, "test_uas");
  r.test_las = OptionalFrom<double>(j, "test_las");
  r.pseudo_sentences = j.value("pseudo_sentences", 0);
  return r;
}

namespace {

fs::path RoundDir(const std::string& out_dir, int round) {
  return fs::path(out_dir) / ("round_" + std::to_string(round));
}

std::string MemberFile(int member) {
  return "member_" + std::to_string(member) + ".ckpt";
}

uint64_t MemberSeed(uint64_t base, int round, int member) {
  return base + 1000ULL * static_cast<uint64_t>(round) +
         static_cast<uint64_t>(member);
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void WriteRoundsSummary(const std::string& out_dir,
                        const std::vector<RoundReport>& rounds) {
  std::ostringstream text;
  for (const RoundReport& r : rounds) text << r.ToJson().dump() << '\n';
  WriteText(fs::path(out_dir) / "rounds.jsonl", text.str());
}

struct Member {
  std::shared_ptr<const Model> model;
  TrainResult result;
};

// Trains the members of one round, `jobs` at a time.
std::vector<Member> TrainMembers(const SelfTrainInputs& inputs,
                                 const Alphabets& alphabets,
                                 const RunConfig& cfg,
                                 const std::vector<uint64_t>& seeds,
                                 const TrainData& data, const fs::path& dir) {
  std::vector<Member> members(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t m = next++; m < seeds.size(); m = next++) {
      try {
        auto model = std::make_shared<Model>(cfg.model, alphabets, seeds[m]);
        if (inputs.pretrained) {
          model->encoder().LoadPretrained(*inputs.pretrained, alphabets);
        }
        TrainConfig train = cfg.train;
        train.seed = seeds[m];
        std::ostringstream history;
        members[m].result = Train(*model, data, train, &history);
        if (!dir.empty()) {
          WriteText(dir / ("member_" + std::to_string(m + 1) + ".history.jsonl"),
                    history.str());
          nlohmann::json extra = {{"seed", seeds[m]},
                                  {"train", train.ToJson()},
                                  {"best_epoch", members[m].result.best_epoch}};
          SaveCheckpoint(*model, (dir / MemberFile(static_cast<int>(m) + 1)).string(),
                         extra);
        }
        members[m].model = std::move(model);
      } catch (...) {
        errors[m] = std::current_exception();
      }
    }
  };
  const size_t jobs =
      std::min(static_cast<size_t>(std::max(1, cfg.selftrain.jobs)), seeds.size());
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (size_t j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return members;
}

}  // namespace

SelfTrainResult SelfTrain(const SelfTrainInputs& inputs, const Alphabets& alphabets,
                          const RunConfig& cfg, const std::string& out_dir,
                          std::ostream* log) {
  cfg.selftrain.Validate();
  if (!inputs.source_train || inputs.source_train->empty()) {
    throw std::invalid_argument("self_train: source treebank is empty");
  }
  if (!inputs.source_dev || inputs.source_dev->empty()) {
    throw std::invalid_argument("self_train: source dev treebank is empty");
  }
  if (!out_dir.empty()) fs::create_directories(out_dir);

  Treebank pool;
  if (inputs.target_pool) {
    for (const Sentence& s : inputs.target_pool->sentences) {
      if (pool.sentences.size() >= cfg.selftrain.pool_size) break;
      if (s.size() > 0) pool.sentences.push_back(Unannotated(s));
    }
  }
  if (pool.empty() && log) {
    *log << "warning: target pool is empty; training source-only seed models\n";
  }
  Treebank labeled = *inputs.source_train;
  if (inputs.target_labeled) {
    labeled.sentences.insert(labeled.sentences.end(),
                             inputs.target_labeled->sentences.begin(),
                             inputs.target_labeled->sentences.end());
  }
  const Treebank* text[] = {&pool};
  const std::vector<const Sentence*> lm_pool =
      BuildLmPool(labeled, text, cfg.train.source_lm);

  SelfTrainResult result;
  result.termination = "max_rounds";
  for (int round = 1; round <= cfg.selftrain.max_rounds; ++round) {
    const fs::path dir = out_dir.empty() ? fs::path() : RoundDir(out_dir, round);
    const int count = cfg.selftrain.ModelsInRound(round);
    RoundReport report;
    std::vector<std::shared_ptr<const Model>> models;
    const bool resumed = !dir.empty() && fs::exists(dir / "DONE");

    if (resumed) {
      std::ifstream in(dir / "report.json");
      report = RoundReport::FromJson(nlohmann::json::parse(in));
      for (int m = 1; m <= report.members; ++m) {
        models.push_back(LoadCheckpoint((dir / MemberFile(m)).string()));
      }
      if (log) *log << "round " << round << ": resumed from " << dir.string() << '\n';
    } else {
      report.round = round;
      report.members = count;
      for (int m = 1; m <= count; ++m) {
        report.seeds.push_back(MemberSeed(cfg.train.seed, round, m));
      }
      TrainData data;
      data.source = &labeled;
      data.dev = inputs.source_dev;
      data.lm_pool = lm_pool;
      Treebank pseudo;
      if (round > 1) {
        report.conf = ConfSchedule(round - 1, cfg.selftrain);
        pseudo = Annotate(result.ensemble, pool);
        report.pseudo_sentences = static_cast<int>(pseudo.sentences.size());
        data.pseudo = &pseudo;
        data.pseudo_weight = *report.conf;
      }
      if (!dir.empty()) {
        fs::create_directories(dir);
        if (round > 1) WriteText(dir / "pseudo.conllu", SerializeConlluString(pseudo));
      }
      std::vector<Member> members =
          TrainMembers(inputs, alphabets, cfg, report.seeds, data, dir);
      for (Member& m : members) {
        report.member_dev_uas.push_back(m.result.best_dev_uas);
        report.member_dev_las.push_back(m.result.best_dev_las);
        models.push_back(std::move(m.model));
      }
    }

    Ensemble ensemble(models);
    if (!resumed) {
      const AttachmentScore dev = UasLas(ensemble.Predict(*inputs.source_dev),
                                         *inputs.source_dev, cfg.train.exclude_punct);
      report.ensemble_dev_uas = dev.uas;
      report.ensemble_dev_las = dev.las;
      if (inputs.report_test) {
        const AttachmentScore test =
            UasLas(ensemble.Predict(*inputs.report_test), *inputs.report_test,
                   cfg.train.exclude_punct);
        report.test_uas = test.uas;
        report.test_las = test.las;
      }
      if (!result.rounds.empty()) {
        report.gain =
            100.0 * (report.ensemble_dev_uas - result.rounds.back().ensemble_dev_uas);
      }
      if (!dir.empty()) {
        WriteText(dir / "report.json", report.ToJson().dump(2) + "\n");
        WriteText(dir / "DONE", "");
      }
    }
    result.ensemble = std::move(ensemble);
    result.rounds.push_back(report);
    if (!out_dir.empty()) WriteRoundsSummary(out_dir, result.rounds);
    if (log) *log << report.ToJson().dump() << '\n' << std::flush;

    if (pool.empty()) {
      result.termination = "empty_pool";
      break;
    }
    if (report.gain && *report.gain < cfg.selftrain.min_gain) {
      result.termination = "min_gain";
      break;
    }
  }
  return result;
}

}  // namespace udpx
