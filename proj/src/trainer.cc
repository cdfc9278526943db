// udpx/trainer.cc

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

#include "udpx/trainer.h"

#include <algorithm>
#include <numeric>

namespace udpx {

namespace {

void CheckWeights(const TrainConfig& cfg) {
  if (cfg.gamma_wo < 0 || cfg.gamma_mlm < 0) {
    throw std::invalid_argument("loss weights must be non-negative");
  }
}

void CheckPart(double value, const char* name) {
  if (value < 0) {
    throw std::invalid_argument(std::string(name) + " loss is negative: " +
                                std::to_string(value));
  }
}

struct ParseExample {
  IndexedSentence sentence;
  ParsedTree gold;
  double weight = 1;
};

}  // namespace

double CombinedLoss(double parse, double wo, double mlm, const TrainConfig& cfg) {
  CheckWeights(cfg);
  CheckPart(parse, "parse");
  CheckPart(wo, "word-order");
  CheckPart(mlm, "masked-LM");
  return parse + cfg.gamma_wo * wo + cfg.gamma_mlm * mlm;
}

double SelfTrainingLoss(double source_parse, double pseudo_parse, double conf,
                        double wo, double mlm, const TrainConfig& cfg) {
  CheckPart(source_parse, "source parse");
  CheckPart(pseudo_parse, "pseudo parse");
  if (conf < 0) throw std::invalid_argument("confidence weight is negative");
  return CombinedLoss(source_parse + conf * pseudo_parse, wo, mlm, cfg);
}

size_t SelectModel(std::span<const double> dev_uas) {
  if (dev_uas.empty()) throw std::invalid_argument("select_model: no candidates");
  size_t best = 0;
  for (size_t i = 1; i < dev_uas.size(); ++i) {
    if (dev_uas[i] > dev_uas[best]) best = i;
  }
  return best;
}

std::vector<const Sentence*> BuildLmPool(const Treebank& source,
                                         std::span<const Treebank* const> text,
                                         bool include_source) {
  std::vector<const Sentence*> pool;
  if (include_source) {
    for (const Sentence& s : source.sentences) pool.push_back(&s);
  }
  for (const Treebank* t : text) {
    for (const Sentence& s : t->sentences) pool.push_back(&s);
  }
  return pool;
}

nlohmann::json EpochStats::ToJson() const {
  return {{"epoch", epoch},
          {"steps", steps},
          {"parse_loss", parse_loss},
          {"wo_loss", wo_loss},
          {"mlm_loss", mlm_loss},
          {"loss", loss},
          {"dev_uas", dev_uas},
          {"dev_las", dev_las},
          {"learning_rate", learning_rate},
          {"decaying", decaying},
          {"improved", improved}};
}

Treebank PredictTreebank(const Model& model, const Treebank& input) {
  Treebank out = input;
  for (Sentence& s : out.sentences) {
    if (s.size() == 0) continue;
    ApplyTree(model.Parse(model.Index(s)), model.alphabets(), s);
  }
  return out;
}

AttachmentScore EvaluateModel(const Model& model, const Treebank& gold,
                              bool exclude_punct) {
  return UasLas(PredictTreebank(model, gold), gold, exclude_punct);
}

TrainResult Train(Model& model, const TrainData& data, const TrainConfig& cfg,
                  std::ostream* metrics) {
  CheckWeights(cfg);
  if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!data.source || data.source->empty()) {
    throw std::invalid_argument("train: labeled treebank is empty");
  }
  if (!data.dev || data.dev->empty()) {
    throw std::invalid_argument("train: dev treebank is empty");
  }

  std::vector<ParseExample> examples;
  auto add_examples = [&](const Treebank& bank, double weight) {
    for (size_t k = 0; k < bank.sentences.size(); ++k) {
      const Sentence& s = bank.sentences[k];
      if (s.size() == 0) continue;
      try {
        examples.push_back({model.Index(s), GoldTree(s, model.alphabets()), weight});
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("training sentence " + std::to_string(k + 1) +
                                    ": " + e.what());
      }
    }
  };
  add_examples(*data.source, 1.0);
  if (data.pseudo) add_examples(*data.pseudo, data.pseudo_weight);

  std::vector<IndexedSentence> pool;
  for (const Sentence* s : data.lm_pool) {
    if (s->size() > 0) pool.push_back(model.Index(*s));
  }
  const bool use_wo = cfg.gamma_wo > 0 && !pool.empty();
  const bool use_mlm = cfg.gamma_mlm > 0 && !pool.empty();

  // Separate streams keep the parse trajectory independent of LM sampling.
  Rng order_rng(cfg.seed);
  Rng dropout_rng(cfg.seed + 0x9e3779b97f4a7c15ULL);
  Rng lm_rng(cfg.seed + 0x3c6ef372fe94f82aULL);

  AdamOptions opts;
  opts.learning_rate = cfg.learning_rate;
  opts.beta1 = cfg.beta1;
  opts.beta2 = cfg.beta2;
  opts.epsilon = cfg.epsilon;
  opts.clip_norm = cfg.clip_norm;
  opts.decay = cfg.lr_decay;
  ParameterStore& store = model.store();
  Adam adam(store, opts);

  TrainResult result;
  result.best_dev_uas = -1;
  std::vector<Matrix> best = store.Snapshot();
  bool decaying = false;
  int stale_epochs = 0;
  const size_t batch = static_cast<size_t>(cfg.batch_size);
  std::vector<size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    EpochStats stats;
    stats.epoch = epoch;
    for (size_t begin = 0; begin < order.size(); begin += batch) {
      const size_t end = std::min(order.size(), begin + batch);
      const auto inv = static_cast<Scalar>(1.0 / static_cast<double>(end - begin));
      store.ZeroGrad();
      const ForwardContext ctx = ForwardContext::Training(dropout_rng);
      double parse_loss = 0;
      for (size_t k = begin; k < end; ++k) {
        const ParseExample& ex = examples[order[k]];
        Value loss = model.ParseLoss(ex.sentence, ex.gold, ctx);
        const auto w = static_cast<Scalar>(ex.weight) * inv;
        parse_loss += static_cast<double>(w) * loss.item();
        Backward(Scale(loss, w));
      }

      double wo_loss = 0, mlm_loss = 0;
      const ForwardContext lm_ctx = ForwardContext::Training(lm_rng);
      std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
      if (use_mlm) {
        const auto w = static_cast<Scalar>(cfg.gamma_mlm / batch);
        for (size_t k = 0; k < batch; ++k) {
          MlmItem item = MaskSentence(pool[pick(lm_rng)], model.alphabets(),
                                      lm_rng, cfg.mlm_rate);
          Value loss = model.MlmLoss(item, lm_ctx);
          mlm_loss += loss.item() / batch;
          Backward(Scale(loss, w));
        }
      }
      if (use_wo) {
        const auto w = static_cast<Scalar>(cfg.gamma_wo / batch);
        for (size_t k = 0; k < batch; ++k) {
          ShuffledSentence shuffled =
              ShuffleSentence(pool[pick(lm_rng)], lm_rng, cfg.shuffle_rate);
          Value loss = model.WoLoss(shuffled, cfg.wo_exclude_used, lm_ctx);
          wo_loss += loss.item() / batch;
          Backward(Scale(loss, w));
        }
      }
      adam.Step(store);
      if (decaying) adam.DecayLearningRate();

      ++stats.steps;
      stats.parse_loss += parse_loss;
      stats.wo_loss += wo_loss;
      stats.mlm_loss += mlm_loss;
      stats.loss += CombinedLoss(parse_loss, wo_loss, mlm_loss, cfg);
    }
    if (stats.steps > 0) {
      stats.parse_loss /= stats.steps;
      stats.wo_loss /= stats.steps;
      stats.mlm_loss /= stats.steps;
      stats.loss /= stats.steps;
    }

    const AttachmentScore dev = EvaluateModel(model, *data.dev, cfg.exclude_punct);
    stats.dev_uas = dev.uas;
    stats.dev_las = dev.las;
    stats.improved = dev.uas > result.best_dev_uas;
    if (stats.improved) {
      result.best_dev_uas = dev.uas;
      result.best_dev_las = dev.las;
      result.best_epoch = epoch;
      best = store.Snapshot();
      stale_epochs = 0;
    } else {
      decaying = true;
      ++stale_epochs;
    }
    stats.decaying = decaying;
    stats.learning_rate = adam.learning_rate();
    result.history.push_back(stats);
    if (metrics) *metrics << stats.ToJson().dump() << '\n' << std::flush;
    if (stale_epochs >= cfg.patience) break;
  }
  store.Restore(best);
  return result;
}

}  // namespace udpx
