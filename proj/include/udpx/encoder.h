// udpx/encoder.h

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

// Shared contextual encoder: word, character-CNN and POS embeddings (plus
// optional external contextual vectors) fed through stacked BiLSTMs. The
// parser and both language-modeling heads read the same encoder.

#ifndef UDPX_ENCODER_H_
#define UDPX_ENCODER_H_

#include <vector>

#include "udpx/alphabet.h"
#include "udpx/config.h"
#include "udpx/embeddings.h"
#include "udpx/layers.h"

namespace udpx {

// A sentence mapped onto alphabet indices.
struct IndexedSentence {
  std::vector<int> words;
  std::vector<std::vector<int>> chars;
  std::vector<int> pos;
  Matrix lm_vectors;  // empty, or one row per token

  int size() const { return static_cast<int>(words.size()); }
};

IndexedSentence IndexSentence(const Sentence& s, const Alphabets& alphabets);

// Reorders tokens: output position k holds input token order[k].
IndexedSentence Permute(const IndexedSentence& s, const std::vector<int>& order);

enum class EncodeMode {
  kParse,  // ROOT prepended at position 0
  kWordOrder,
  kMaskedLm,  // contextual vectors withheld so masked identities stay hidden
};

class Encoder {
 public:
  Encoder(const ModelConfig& config, const Alphabets& alphabets,
          ParameterStore& store, Rng& rng);

  // Width-`char_window` convolution with ReLU and max-pooling over
  // positions; words shorter than the window are right-padded with PAD.
  // Deterministic; dropout is applied to the pooled vector by Embed.
  Value CharCnn(std::span<const int> chars) const;

  // T x input_dim token representations, sub-embeddings dropped out
  // independently at training time.
  Value Embed(const IndexedSentence& s, bool with_lm,
              const ForwardContext& ctx) const;

  // Stacked BiLSTM over T x input_dim rows; returns T x 2H with the forward
  // state in the left half.
  Value RunBiLstm(const Value& x, const ForwardContext& ctx) const;

  // Positions x 2H; parse mode has l+1 rows.
  Value Encode(const IndexedSentence& s, EncodeMode mode,
               const ForwardContext& ctx) const;

  // Copies pretrained rows into the word table. Returns how many alphabet
  // entries were found.
  size_t LoadPretrained(const WordVectors& vectors, const Alphabets& alphabets);

  const Value& word_table() const { return word_table_; }
  const Value& char_table() const { return char_table_; }
  const Value& pos_table() const { return pos_table_; }
  const Value& root() const { return root_; }
  const Linear& char_conv() const { return char_conv_; }
  const std::vector<LstmParams>& forward_layers() const { return forward_; }
  const std::vector<LstmParams>& backward_layers() const { return backward_; }

 private:
  ModelConfig config_;
  Value word_table_;
  Value char_table_;
  Value pos_table_;
  Value root_;
  Linear char_conv_;
  std::vector<LstmParams> forward_;
  std::vector<LstmParams> backward_;
};

}  // namespace udpx

#endif  // UDPX_ENCODER_H_
