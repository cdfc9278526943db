// udpx/lm_heads.h

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

// Auxiliary language-modeling objectives on the shared encoder: masked
// word prediction and pointer-style word ordering.

#ifndef UDPX_LM_HEADS_H_
#define UDPX_LM_HEADS_H_

#include <vector>

#include "udpx/alphabet.h"
#include "udpx/config.h"
#include "udpx/encoder.h"
#include "udpx/layers.h"

namespace udpx {

enum class MlmAction { kMask, kKeep, kRandom };

struct MlmItem {
  IndexedSentence corrupted;
  std::vector<int> positions;  // selected token positions, ascending
  std::vector<int> targets;    // original word index per selected position
  std::vector<MlmAction> actions;
  std::vector<bool> selected;  // one flag per token
};

// max(1, round(rate * length)).
int MlmSelectionCount(int length, double rate = 0.15);

// Selects positions uniformly without replacement, then replaces each by
// MASK (.8), keeps it (.1) or swaps in a random non-reserved word (.1). The
// character sequence follows the replacement so the CNN cannot leak the
// hidden word.
MlmItem MaskSentence(const IndexedSentence& s, const Alphabets& alphabets,
                     Rng& rng, double rate = 0.15);

// Mean over `positions` of -log softmax(logits)[row][target].
Value MaskedNll(const Value& logits, std::span<const int> positions,
                std::span<const int> targets);

class MlmHead {
 public:
  MlmHead() = default;
  MlmHead(const ModelConfig& config, int vocab_size, ParameterStore& store,
          Rng& rng);

  // `encoded` is the T x 2H encoder output in masked-LM mode.
  Value Loss(const Value& encoded, const MlmItem& item) const;
  const Linear& projection() const { return projection_; }

 private:
  Linear projection_;
};

// order[k] is the original index of the token at shuffled position k;
// inverse[i] is where original token i went.
struct Permutation {
  std::vector<int> order;
  std::vector<int> inverse;
};

Permutation IdentityPermutation(int length);

// Permutes round(rate * l) randomly chosen positions among themselves; rate
// 1 is a uniform shuffle of the whole sentence. l < 2 gives the identity.
Permutation RandomPermutation(int length, double rate, Rng& rng);

struct ShuffledSentence {
  IndexedSentence sentence;
  Permutation permutation;
};

ShuffledSentence ShuffleSentence(const IndexedSentence& s, Rng& rng,
                                 double rate = 1.0);

class WoHead {
 public:
  WoHead() = default;
  WoHead(const ModelConfig& config, ParameterStore& store, Rng& rng);

  // Token representations mapped to wo_dim. T x wo_dim.
  Value Map(const Value& encoded) const;
  // 1 x T row of U_s tanh(h + x_i). Throws ShapeError on a width mismatch.
  Value Score(const Value& h, const Value& x) const;
  // Decoder start state from the mean mapped representation.
  Value InitialState(const Value& x) const;

  // Sum over original positions t of -log p(shuffled slot of token t),
  // feeding the gold previous token to the decoder.
  Value Loss(const Value& encoded, const Permutation& perm,
             bool exclude_used = false) const;
  // Greedy reconstruction: shuffled positions in predicted original order,
  // each step fed its own argmax.
  std::vector<int> Decode(const Value& encoded, bool exclude_used = false) const;

  const Linear& map() const { return map_; }
  const Linear& init() const { return init_; }
  const LstmParams& decoder() const { return decoder_; }
  const Value& scorer() const { return scorer_; }

 private:
  // One decoder step on the representation of the token just placed.
  void Advance(const Value& x_row, Value& h, Value& c) const;

  Linear map_;
  Linear init_;
  LstmParams decoder_;
  Value scorer_;  // wo_dim x 1
};

}  // namespace udpx

#endif  // UDPX_LM_HEADS_H_
