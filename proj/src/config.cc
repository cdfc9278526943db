// udpx/config.cc

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

#include "udpx/config.h"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace udpx {

namespace {

std::string Trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T out{};
  if (!(in >> out) || !(in >> std::ws).eof()) {
    throw ConfigError("bad value for " + key + ": '" + v + "'");
  }
  return out;
}

bool ParseBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

std::vector<int> ParseIntList(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    out.push_back(ParseNumber<int>(key, Trim(item)));
  }
  if (out.empty()) throw ConfigError("empty list for " + key);
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&,
                                  const std::string&)>;

template <typename T, typename Section>
Setter Field(Section RunConfig::*section, T Section::*field) {
  return [section, field](RunConfig& c, const std::string& k,
                          const std::string& v) {
    if constexpr (std::is_same_v<T, bool>) {
      c.*section.*field = ParseBool(k, v);
    } else if constexpr (std::is_same_v<T, std::vector<int>>) {
      c.*section.*field = ParseIntList(k, v);
    } else {
      c.*section.*field = ParseNumber<T>(k, v);
    }
  };
}

const std::map<std::string, Setter>& Setters() {
  static const std::map<std::string, Setter> setters = {
      {"word_dim", Field(&RunConfig::model, &ModelConfig::word_dim)},
      {"char_dim", Field(&RunConfig::model, &ModelConfig::char_dim)},
      {"pos_dim", Field(&RunConfig::model, &ModelConfig::pos_dim)},
      {"char_filters", Field(&RunConfig::model, &ModelConfig::char_filters)},
      {"char_window", Field(&RunConfig::model, &ModelConfig::char_window)},
      {"lstm_layers", Field(&RunConfig::model, &ModelConfig::lstm_layers)},
      {"lstm_hidden", Field(&RunConfig::model, &ModelConfig::lstm_hidden)},
      {"arc_mlp", Field(&RunConfig::model, &ModelConfig::arc_mlp)},
      {"label_mlp", Field(&RunConfig::model, &ModelConfig::label_mlp)},
      {"wo_dim", Field(&RunConfig::model, &ModelConfig::wo_dim)},
      {"lm_dim", Field(&RunConfig::model, &ModelConfig::lm_dim)},
      {"embed_dropout", Field(&RunConfig::model, &ModelConfig::embed_dropout)},
      {"hidden_dropout", Field(&RunConfig::model, &ModelConfig::hidden_dropout)},
      {"layer_dropout", Field(&RunConfig::model, &ModelConfig::layer_dropout)},
      {"mlp_dropout", Field(&RunConfig::model, &ModelConfig::mlp_dropout)},

      {"gamma_wo", Field(&RunConfig::train, &TrainConfig::gamma_wo)},
      {"gamma_mlm", Field(&RunConfig::train, &TrainConfig::gamma_mlm)},
      {"batch_size", Field(&RunConfig::train, &TrainConfig::batch_size)},
      {"max_epochs", Field(&RunConfig::train, &TrainConfig::max_epochs)},
      {"patience", Field(&RunConfig::train, &TrainConfig::patience)},
      {"seed", Field(&RunConfig::train, &TrainConfig::seed)},
      {"learning_rate", Field(&RunConfig::train, &TrainConfig::learning_rate)},
      {"beta1", Field(&RunConfig::train, &TrainConfig::beta1)},
      {"beta2", Field(&RunConfig::train, &TrainConfig::beta2)},
      {"epsilon", Field(&RunConfig::train, &TrainConfig::epsilon)},
      {"clip_norm", Field(&RunConfig::train, &TrainConfig::clip_norm)},
      {"lr_decay", Field(&RunConfig::train, &TrainConfig::lr_decay)},
      {"mlm_rate", Field(&RunConfig::train, &TrainConfig::mlm_rate)},
      {"shuffle_rate", Field(&RunConfig::train, &TrainConfig::shuffle_rate)},
      {"wo_exclude_used", Field(&RunConfig::train, &TrainConfig::wo_exclude_used)},
      {"source_lm", Field(&RunConfig::train, &TrainConfig::source_lm)},
      {"exclude_punct", Field(&RunConfig::train, &TrainConfig::exclude_punct)},
      {"max_vocab", Field(&RunConfig::train, &TrainConfig::max_vocab)},
      {"min_words", Field(&RunConfig::train, &TrainConfig::min_words)},

      {"same_family", Field(&RunConfig::selftrain, &SelfTrainConfig::same_family)},
      {"alpha_c", Field(&RunConfig::selftrain, &SelfTrainConfig::alpha_c)},
      {"beta_c", Field(&RunConfig::selftrain, &SelfTrainConfig::beta_c)},
      {"counts", Field(&RunConfig::selftrain, &SelfTrainConfig::counts)},
      {"max_rounds", Field(&RunConfig::selftrain, &SelfTrainConfig::max_rounds)},
      {"min_gain", Field(&RunConfig::selftrain, &SelfTrainConfig::min_gain)},
      {"pool_size", Field(&RunConfig::selftrain, &SelfTrainConfig::pool_size)},
      {"clamp_conf", Field(&RunConfig::selftrain, &SelfTrainConfig::clamp_conf)},
      {"jobs", Field(&RunConfig::selftrain, &SelfTrainConfig::jobs)},
  };
  return setters;
}

}  // namespace

nlohmann::json ModelConfig::ToJson() const {
  return {{"word_dim", word_dim},         {"char_dim", char_dim},
          {"pos_dim", pos_dim},           {"char_filters", char_filters},
          {"char_window", char_window},   {"lstm_layers", lstm_layers},
          {"lstm_hidden", lstm_hidden},   {"arc_mlp", arc_mlp},
          {"label_mlp", label_mlp},       {"wo_dim", wo_dim},
          {"lm_dim", lm_dim},             {"embed_dropout", embed_dropout},
          {"hidden_dropout", hidden_dropout},
          {"layer_dropout", layer_dropout},
          {"mlp_dropout", mlp_dropout}};
}

ModelConfig ModelConfig::FromJson(const nlohmann::json& j) {
  ModelConfig c;
  c.word_dim = j.at("word_dim");
  c.char_dim = j.at("char_dim");
  c.pos_dim = j.at("pos_dim");
  c.char_filters = j.at("char_filters");
  c.char_window = j.at("char_window");
  c.lstm_layers = j.at("lstm_layers");
  c.lstm_hidden = j.at("lstm_hidden");
  c.arc_mlp = j.at("arc_mlp");
  c.label_mlp = j.at("label_mlp");
  c.wo_dim = j.at("wo_dim");
  c.lm_dim = j.at("lm_dim");
  c.embed_dropout = j.at("embed_dropout");
  c.hidden_dropout = j.at("hidden_dropout");
  c.layer_dropout = j.at("layer_dropout");
  c.mlp_dropout = j.at("mlp_dropout");
  return c;
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"gamma_wo", gamma_wo},
          {"gamma_mlm", gamma_mlm},
          {"batch_size", batch_size},
          {"max_epochs", max_epochs},
          {"patience", patience},
          {"seed", seed},
          {"learning_rate", learning_rate},
          {"beta1", beta1},
          {"beta2", beta2},
          {"epsilon", epsilon},
          {"clip_norm", clip_norm},
          {"lr_decay", lr_decay},
          {"mlm_rate", mlm_rate},
          {"shuffle_rate", shuffle_rate},
          {"wo_exclude_used", wo_exclude_used},
          {"source_lm", source_lm},
          {"exclude_punct", exclude_punct},
          {"max_vocab", max_vocab},
          {"min_words", min_words}};
}

int SelfTrainConfig::ModelsInRound(int round) const {
  if (round < 1) throw std::invalid_argument("rounds are 1-based");
  size_t i = std::min(static_cast<size_t>(round - 1), counts.size() - 1);
  return counts[i];
}

void SelfTrainConfig::Validate() const {
  if (counts.empty()) throw std::invalid_argument("counts must be non-empty");
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 1) throw std::invalid_argument("counts must be >= 1");
    if (i > 0 && counts[i] > counts[i - 1]) {
      throw std::invalid_argument("counts must be non-increasing");
    }
  }
  if (!(alpha() > 0) || !(beta() > 0)) {
    throw std::invalid_argument("alpha_c and beta_c must be positive");
  }
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

nlohmann::json SelfTrainConfig::ToJson() const {
  return {{"same_family", same_family}, {"alpha_c", alpha()},
          {"beta_c", beta()},           {"counts", counts},
          {"max_rounds", max_rounds},   {"min_gain", min_gain},
          {"pool_size", pool_size},     {"clamp_conf", clamp_conf},
          {"jobs", jobs}};
}

nlohmann::json RunConfig::ToJson() const {
  return {{"model", model.ToJson()},
          {"train", train.ToJson()},
          {"selftrain", selftrain.ToJson()}};
}

void SetConfigValue(RunConfig& config, const std::string& key,
                    const std::string& value) {
  auto it = Setters().find(key);
  if (it == Setters().end()) throw ConfigError("unknown config key: " + key);
  it->second(config, key, value);
}

RunConfig ParseConfig(std::istream& in) {
  RunConfig config;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    SetConfigValue(config, Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  }
  if (config.train.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (config.train.gamma_wo < 0 || config.train.gamma_mlm < 0) {
    throw ConfigError("loss weights must be non-negative");
  }
  return config;
}

RunConfig ParseConfigString(const std::string& text) {
  std::istringstream in(text);
  return ParseConfig(in);
}

}  // namespace udpx
