// udpx/config.h

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

#ifndef UDPX_CONFIG_H_
#define UDPX_CONFIG_H_

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "json.hpp"

namespace udpx {

// Network sizes and dropout. Defaults are the full-size parser.
struct ModelConfig {
  int word_dim = 100;
  int char_dim = 50;
  int pos_dim = 50;
  int char_filters = 50;
  int char_window = 3;
  int lstm_layers = 3;
  int lstm_hidden = 512;  // per direction
  int arc_mlp = 512;
  int label_mlp = 128;
  int wo_dim = 512;
  int lm_dim = 0;  // width of external contextual vectors; 0 disables
  double embed_dropout = 0.33;
  double hidden_dropout = 0.33;
  double layer_dropout = 0.33;
  double mlp_dropout = 0.0;

  int input_dim() const { return word_dim + char_filters + pos_dim + lm_dim; }
  int encoder_dim() const { return 2 * lstm_hidden; }

  nlohmann::json ToJson() const;
  static ModelConfig FromJson(const nlohmann::json& j);
  bool operator==(const ModelConfig&) const = default;
};

struct TrainConfig {
  double gamma_wo = 0.2;
  double gamma_mlm = 0.15;
  int batch_size = 32;
  int max_epochs = 200;
  int patience = 20;  // epochs without dev improvement before stopping
  uint64_t seed = 1;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.9;
  double epsilon = 1e-8;
  double clip_norm = 5.0;
  double lr_decay = 0.999995;
  double mlm_rate = 0.15;
  double shuffle_rate = 1.0;    // fraction of positions permuted for WO
  bool wo_exclude_used = false;  // mask already-placed words in WO softmax
  bool source_lm = true;         // include source sentences in the LM pool
  bool exclude_punct = false;    // dev scoring policy
  size_t max_vocab = 100000;
  size_t min_words = 10;  // unlabeled lines need strictly more tokens

  nlohmann::json ToJson() const;
};

struct SelfTrainConfig {
  bool same_family = false;
  // Negative means "derive from same_family".
  double alpha_c = -1;
  double beta_c = -1;
  std::vector<int> counts = {5, 5, 4, 3, 2};  // last entry repeats
  int max_rounds = 8;
  double min_gain = 0.2;  // UAS points
  size_t pool_size = 15000;
  bool clamp_conf = true;
  int jobs = 1;

  double alpha() const { return alpha_c >= 0 ? alpha_c : (same_family ? 0.6 : 0.4); }
  double beta() const { return beta_c >= 0 ? beta_c : (same_family ? 0.03 : 0.05); }
  // Models trained in 1-based round r.
  int ModelsInRound(int round) const;
  // Throws std::invalid_argument when the schedule is inconsistent.
  void Validate() const;

  nlohmann::json ToJson() const;
};

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  SelfTrainConfig selftrain;

  nlohmann::json ToJson() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Applies one "key = value" assignment. Throws ConfigError on unknown keys
// and unparsable values.
void SetConfigValue(RunConfig& config, const std::string& key,
                    const std::string& value);

// Flat "key = value" lines; '#' starts a comment. Starts from defaults.
RunConfig ParseConfig(std::istream& in);
RunConfig ParseConfigString(const std::string& text);

}  // namespace udpx

#endif  // UDPX_CONFIG_H_
