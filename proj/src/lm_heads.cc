// udpx/lm_heads.cc

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

#include "udpx/lm_heads.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace udpx {

int MlmSelectionCount(int length, double rate) {
  if (length < 1) throw std::invalid_argument("mask_sentence: empty sentence");
  const long n = std::lround(rate * length);
  return static_cast<int>(std::clamp<long>(n, 1, length));
}

MlmItem MaskSentence(const IndexedSentence& s, const Alphabets& alphabets,
                     Rng& rng, double rate) {
  const int l = s.size();
  const int count = MlmSelectionCount(l, rate);
  MlmItem item;
  item.corrupted = s;
  item.selected.assign(static_cast<size_t>(l), false);

  std::vector<int> all(static_cast<size_t>(l));
  std::iota(all.begin(), all.end(), 0);
  // Partial Fisher-Yates: the first `count` entries are a uniform sample.
  for (int k = 0; k < count; ++k) {
    std::uniform_int_distribution<int> pick(k, l - 1);
    std::swap(all[k], all[pick(rng)]);
  }
  item.positions.assign(all.begin(), all.begin() + count);
  std::sort(item.positions.begin(), item.positions.end());

  const int vocab = alphabets.words.size();
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int p : item.positions) {
    item.selected[p] = true;
    item.targets.push_back(s.words[p]);
    const double u = coin(rng);
    if (u < 0.8) {
      item.actions.push_back(MlmAction::kMask);
      item.corrupted.words[p] = Alphabet::kMask;
      item.corrupted.chars[p] = {Alphabet::kMask};
    } else if (u < 0.9) {
      item.actions.push_back(MlmAction::kKeep);
    } else {
      item.actions.push_back(MlmAction::kRandom);
      if (vocab > Alphabet::kReserved) {
        std::uniform_int_distribution<int> word(Alphabet::kReserved, vocab - 1);
        const int w = word(rng);
        item.corrupted.words[p] = w;
        item.corrupted.chars[p] = alphabets.CharIndices(alphabets.words.Symbol(w));
      }
    }
  }
  return item;
}

Value MaskedNll(const Value& logits, std::span<const int> positions,
                std::span<const int> targets) {
  if (positions.empty()) {
    throw std::invalid_argument("mlm_loss: no selected positions");
  }
  if (positions.size() != targets.size()) {
    throw std::invalid_argument("mlm_loss: positions/targets size mismatch");
  }
  Value rows = Gather(logits, positions);
  std::vector<std::pair<int, int>> cells;
  for (size_t k = 0; k < targets.size(); ++k) {
    cells.emplace_back(static_cast<int>(k), targets[k]);
  }
  return Scale(PickSum(LogSoftmaxRows(rows), cells),
               static_cast<Scalar>(-1.0 / static_cast<double>(positions.size())));
}

MlmHead::MlmHead(const ModelConfig& config, int vocab_size,
                 ParameterStore& store, Rng& rng)
    : projection_(store, "mlm.projection", config.encoder_dim(), vocab_size,
                  rng) {}

Value MlmHead::Loss(const Value& encoded, const MlmItem& item) const {
  if (encoded.rows() != item.corrupted.size()) {
    throw ShapeError("mlm_loss: encoder rows do not match the sentence");
  }
  // Only the selected rows need the V-wide projection.
  Value rows = Gather(encoded, item.positions);
  std::vector<int> local(item.positions.size());
  std::iota(local.begin(), local.end(), 0);
  return MaskedNll(projection_(rows), local, item.targets);
}

Permutation IdentityPermutation(int length) {
  Permutation p;
  p.order.resize(static_cast<size_t>(length));
  std::iota(p.order.begin(), p.order.end(), 0);
  p.inverse = p.order;
  return p;
}

Permutation RandomPermutation(int length, double rate, Rng& rng) {
  Permutation p = IdentityPermutation(length);
  if (length < 2) return p;
  if (rate < 0 || rate > 1) {
    throw std::invalid_argument("shuffle rate must lie in [0, 1]");
  }
  const int k = static_cast<int>(std::lround(rate * length));
  if (k < 2) return p;
  std::vector<int> chosen = p.order;
  for (int a = 0; a < k; ++a) {
    std::uniform_int_distribution<int> pick(a, length - 1);
    std::swap(chosen[a], chosen[pick(rng)]);
  }
  chosen.resize(static_cast<size_t>(k));
  std::sort(chosen.begin(), chosen.end());
  std::vector<int> moved = chosen;
  for (int a = k - 1; a > 0; --a) {
    std::uniform_int_distribution<int> pick(0, a);
    std::swap(moved[a], moved[pick(rng)]);
  }
  for (int a = 0; a < k; ++a) p.order[chosen[a]] = moved[a];
  for (int pos = 0; pos < length; ++pos) p.inverse[p.order[pos]] = pos;
  return p;
}

ShuffledSentence ShuffleSentence(const IndexedSentence& s, Rng& rng,
                                 double rate) {
  ShuffledSentence out;
  out.permutation = RandomPermutation(s.size(), rate, rng);
  out.sentence = Permute(s, out.permutation.order);
  return out;
}

WoHead::WoHead(const ModelConfig& config, ParameterStore& store, Rng& rng)
    : map_(store, "wo.map", config.encoder_dim(), config.wo_dim, rng),
      init_(store, "wo.init", config.wo_dim, config.wo_dim, rng),
      decoder_(store, "wo.decoder", config.wo_dim, config.wo_dim, rng),
      scorer_(store.Add("wo.scorer", GlorotUniform(config.wo_dim, 1, rng))) {}

Value WoHead::Map(const Value& encoded) const { return map_(encoded); }

Value WoHead::Score(const Value& h, const Value& x) const {
  if (h.rows() != 1 || h.cols() != x.cols() || x.cols() != scorer_.rows()) {
    throw ShapeError("wo_score: decoder state has width " +
                     std::to_string(h.cols()) + ", token reps " +
                     std::to_string(x.cols()) + ", scorer " +
                     std::to_string(scorer_.rows()));
  }
  return Transpose(MatMul(Tanh(Add(x, h)), scorer_));
}

Value WoHead::InitialState(const Value& x) const {
  return Tanh(init_(MeanRows(x)));
}

void WoHead::Advance(const Value& x_row, Value& h, Value& c) const {
  const int hidden = decoder_.hidden();
  Value gates = Add(Add(MatMul(x_row, decoder_.input),
                        MatMul(h, decoder_.recurrent)),
                    decoder_.bias);
  Value state = LstmCell(gates, c);
  h = SliceCols(state, 0, hidden);
  c = SliceCols(state, hidden, hidden);
}

namespace {

Value UsedMask(const std::vector<bool>& used) {
  Matrix m = Matrix::Zero(1, static_cast<Eigen::Index>(used.size()));
  for (size_t k = 0; k < used.size(); ++k) {
    if (used[k]) m(0, static_cast<Eigen::Index>(k)) = static_cast<Scalar>(-1e9);
  }
  return Value::Constant(std::move(m));
}

}  // namespace

Value WoHead::Loss(const Value& encoded, const Permutation& perm,
                   bool exclude_used) const {
  const int l = static_cast<int>(encoded.rows());
  if (static_cast<int>(perm.inverse.size()) != l) {
    throw ShapeError("wo_loss: permutation does not match the sentence");
  }
  Value x = Map(encoded);
  Value h = InitialState(x);
  Value c = Value::Constant(Matrix::Zero(1, decoder_.hidden()));
  std::vector<bool> used(static_cast<size_t>(l), false);
  Value total;
  for (int t = 0; t < l; ++t) {
    Value scores = Score(h, x);
    if (exclude_used) scores = Add(scores, UsedMask(used));
    const int gold = perm.inverse[t];
    std::pair<int, int> cell(0, gold);
    Value ll = PickSum(LogSoftmaxRows(scores), std::span(&cell, 1));
    total = total.defined() ? Add(total, ll) : ll;
    used[gold] = true;
    if (t + 1 < l) Advance(SliceRows(x, gold, 1), h, c);
  }
  return Scale(total, -1);
}

std::vector<int> WoHead::Decode(const Value& encoded, bool exclude_used) const {
  NoGradGuard no_grad;
  const int l = static_cast<int>(encoded.rows());
  Value x = Map(encoded);
  Value h = InitialState(x);
  Value c = Value::Constant(Matrix::Zero(1, decoder_.hidden()));
  std::vector<bool> used(static_cast<size_t>(l), false);
  std::vector<int> out;
  for (int t = 0; t < l; ++t) {
    Value scores = Score(h, x);
    if (exclude_used) scores = Add(scores, UsedMask(used));
    Eigen::Index best = 0;
    scores.data().row(0).maxCoeff(&best);
    out.push_back(static_cast<int>(best));
    used[static_cast<size_t>(best)] = true;
    if (t + 1 < l) Advance(SliceRows(x, best, 1), h, c);
  }
  return out;
}

}  // namespace udpx
