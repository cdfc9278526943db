// udpx/trainer.h

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

// Multi-task training: every step backs up one parse batch, one MLM batch
// and one WO batch through the shared encoder and takes one Adam step.

#ifndef UDPX_TRAINER_H_
#define UDPX_TRAINER_H_

#include <ostream>
#include <span>
#include <vector>

#include "udpx/evaluator.h"
#include "udpx/model.h"

namespace udpx {

// L_parse + gamma_wo L_wo + gamma_mlm L_mlm. Throws std::invalid_argument on
// a negative part or weight.
double CombinedLoss(double parse, double wo, double mlm, const TrainConfig& cfg);

// L_parse(source) + conf L_parse(pseudo) + gamma terms.
double SelfTrainingLoss(double source_parse, double pseudo_parse, double conf,
                        double wo, double mlm, const TrainConfig& cfg);

// Index of the highest dev UAS, earliest on ties. Throws on empty input.
size_t SelectModel(std::span<const double> dev_uas);

struct TrainData {
  const Treebank* source = nullptr;  // parse weight 1
  const Treebank* pseudo = nullptr;  // optional, parse weight pseudo_weight
  double pseudo_weight = 1.0;
  std::vector<const Sentence*> lm_pool;
  const Treebank* dev = nullptr;
};

// Source sentences (when `include_source`) followed by the unlabeled ones.
std::vector<const Sentence*> BuildLmPool(const Treebank& source,
                                         std::span<const Treebank* const> text,
                                         bool include_source);

struct EpochStats {
  int epoch = 0;
  int steps = 0;
  double parse_loss = 0;
  double wo_loss = 0;
  double mlm_loss = 0;
  double loss = 0;
  double dev_uas = 0;
  double dev_las = 0;
  double learning_rate = 0;
  bool decaying = false;
  bool improved = false;

  nlohmann::json ToJson() const;
};

struct TrainResult {
  std::vector<EpochStats> history;
  int best_epoch = 0;
  double best_dev_uas = 0;
  double best_dev_las = 0;
};

// Trains in place and leaves the best-dev parameters loaded. History lines
// go to `metrics` as JSON, one object per epoch.
TrainResult Train(Model& model, const TrainData& data, const TrainConfig& cfg,
                  std::ostream* metrics = nullptr);

Treebank PredictTreebank(const Model& model, const Treebank& input);
AttachmentScore EvaluateModel(const Model& model, const Treebank& gold,
                              bool exclude_punct);

}  // namespace udpx

#endif  // UDPX_TRAINER_H_
