// udpx/selftrain.h

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

// Ensemble-teacher self-training. Round 1 trains seed models on the source
// treebank; every later round annotates the target pool with the previous
// round's ensemble and trains fresh students on source plus pseudo-trees,
// the latter down-weighted by a growing confidence.

#ifndef UDPX_SELFTRAIN_H_
#define UDPX_SELFTRAIN_H_

#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "udpx/embeddings.h"
#include "udpx/model.h"
#include "udpx/trainer.h"

namespace udpx {

// min(1, alpha_c * round + beta_c), unclamped when cfg.clamp_conf is off.
// Throws std::invalid_argument for round < 1.
double ConfSchedule(int round, const SelfTrainConfig& cfg);

// Weighted mean of member distributions. Weights need not be normalized.
// Identical members reproduce their distribution bit for bit.
ParseDistribution CombineDistributions(std::span<const ParseDistribution> members,
                                       std::span<const double> weights);

class Ensemble {
 public:
  Ensemble() = default;
  // Uniform weights when `weights` is empty. Throws std::invalid_argument
  // when members disagree on alphabets or weights are invalid.
  explicit Ensemble(std::vector<std::shared_ptr<const Model>> members,
                    std::vector<double> weights = {});

  ParseDistribution Distribution(const Sentence& s) const;
  ParsedTree Parse(const Sentence& s) const;
  Treebank Predict(const Treebank& input) const;

  size_t size() const { return members_.size(); }
  const std::vector<std::shared_ptr<const Model>>& members() const {
    return members_;
  }
  const std::vector<double>& weights() const { return weights_; }
  const Alphabets& alphabets() const { return members_.front()->alphabets(); }

 private:
  std::vector<std::shared_ptr<const Model>> members_;
  std::vector<double> weights_;
};

// Every sentence re-headed with the teacher's maximum spanning tree.
Treebank Annotate(const Ensemble& teacher, const Treebank& pool);

struct RoundReport {
  int round = 0;
  std::optional<double> conf;  // absent in the source-only round
  int members = 0;
  std::vector<uint64_t> seeds;
  std::vector<double> member_dev_uas;
  std::vector<double> member_dev_las;
  double ensemble_dev_uas = 0;
  double ensemble_dev_las = 0;
  std::optional<double> gain;  // UAS points over the previous round
  std::optional<double> test_uas;
  std::optional<double> test_las;
  int pseudo_sentences = 0;

  nlohmann::json ToJson() const;
  static RoundReport FromJson(const nlohmann::json& j);
};

struct SelfTrainInputs {
  const Treebank* source_train = nullptr;
  const Treebank* source_dev = nullptr;
  const Treebank* target_pool = nullptr;  // unlabeled; may be empty
  // Optional gold target trees (few-shot); trained at weight 1 with the
  // source, never down-weighted by the confidence.
  const Treebank* target_labeled = nullptr;
  // Only scored for the round reports, never trained on.
  const Treebank* report_test = nullptr;
  const WordVectors* pretrained = nullptr;
};

struct SelfTrainResult {
  std::vector<RoundReport> rounds;
  Ensemble ensemble;
  std::string termination;  // "min_gain", "max_rounds" or "empty_pool"
};

// Runs the rounds. With a non-empty `out_dir` each finished round is
// persisted as round_<r>/ (member checkpoints, pseudo.conllu, report.json,
// DONE) plus a rounds.jsonl summary, and completed rounds are reloaded
// instead of retrained. Progress lines go to `log`.
SelfTrainResult SelfTrain(const SelfTrainInputs& inputs, const Alphabets& alphabets,
                          const RunConfig& cfg, const std::string& out_dir,
                          std::ostream* log = nullptr);

}  // namespace udpx

#endif  // UDPX_SELFTRAIN_H_
