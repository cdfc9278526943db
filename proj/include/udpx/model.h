// udpx/model.h

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

// The full multi-task network (shared encoder, parser, MLM and WO heads)
// and its on-disk checkpoint format.
//
// Checkpoint layout:
//   UDPX-CKPT-1
//   meta <n>            followed by n bytes of JSON and a newline
//   tensors <k>
//   tensor <name> <f64|f32> <rows> <cols> <offset>   (k lines)
//   data <bytes>        followed by the raw little-endian row-major arrays

#ifndef UDPX_MODEL_H_
#define UDPX_MODEL_H_

#include <memory>
#include <string>

#include "udpx/alphabet.h"
#include "udpx/config.h"
#include "udpx/conllu.h"
#include "udpx/encoder.h"
#include "udpx/lm_heads.h"
#include "udpx/parse_head.h"

namespace udpx {

inline constexpr char kCheckpointMagic[] = "UDPX-CKPT-1";

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gold heads and label classes. Throws std::invalid_argument if a token has
// no head or its relation is missing from the label alphabet.
ParsedTree GoldTree(const Sentence& s, const Alphabets& alphabets);

// Writes predicted heads and relation names into `s`.
void ApplyTree(const ParsedTree& tree, const Alphabets& alphabets, Sentence& s);

class Model {
 public:
  // Parameters are initialized from `seed`.
  Model(const ModelConfig& config, const Alphabets& alphabets, uint64_t seed);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  IndexedSentence Index(const Sentence& s) const {
    return IndexSentence(s, alphabets_);
  }

  // Per-sentence sums; MLM is the mean over its selected positions.
  Value ParseLoss(const IndexedSentence& s, const ParsedTree& gold,
                  const ForwardContext& ctx) const;
  Value MlmLoss(const MlmItem& item, const ForwardContext& ctx) const;
  Value WoLoss(const ShuffledSentence& s, bool exclude_used,
               const ForwardContext& ctx) const;

  // Inference only; builds no gradient graph.
  ParseDistribution Distribution(const IndexedSentence& s) const;
  ParsedTree Parse(const IndexedSentence& s) const;

  const ModelConfig& config() const { return config_; }
  const Alphabets& alphabets() const { return alphabets_; }
  ParameterStore& store() { return store_; }
  const ParameterStore& store() const { return store_; }
  Encoder& encoder() { return *encoder_; }
  const Encoder& encoder() const { return *encoder_; }
  const ParseHead& parser() const { return *parser_; }
  const MlmHead& mlm() const { return *mlm_; }
  const WoHead& wo() const { return *wo_; }

 private:
  ModelConfig config_;
  Alphabets alphabets_;
  ParameterStore store_;
  std::unique_ptr<Encoder> encoder_;
  std::unique_ptr<ParseHead> parser_;
  std::unique_ptr<MlmHead> mlm_;
  std::unique_ptr<WoHead> wo_;
};

// `extra` is stored under "extra" in the metadata (flags, history, ...).
void SaveCheckpoint(const Model& model, const std::string& path,
                    const nlohmann::json& extra = nlohmann::json::object());
std::unique_ptr<Model> LoadCheckpoint(const std::string& path,
                                      nlohmann::json* extra = nullptr);

}  // namespace udpx

#endif  // UDPX_MODEL_H_
