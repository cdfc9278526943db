// udpx/encoder.cc

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

#include "udpx/encoder.h"

#include <stdexcept>

namespace udpx {

IndexedSentence IndexSentence(const Sentence& s, const Alphabets& alphabets) {
  IndexedSentence out;
  for (const Token& t : s.tokens) {
    out.words.push_back(alphabets.WordIndex(t.form));
    out.chars.push_back(alphabets.CharIndices(t.form));
    out.pos.push_back(alphabets.PosIndex(t.upos));
  }
  out.lm_vectors = s.lm_vectors;
  return out;
}

IndexedSentence Permute(const IndexedSentence& s,
                        const std::vector<int>& order) {
  IndexedSentence out;
  if (s.lm_vectors.size()) {
    out.lm_vectors.resize(s.lm_vectors.rows(), s.lm_vectors.cols());
  }
  for (size_t k = 0; k < order.size(); ++k) {
    int from = order[k];
    out.words.push_back(s.words[from]);
    out.chars.push_back(s.chars[from]);
    out.pos.push_back(s.pos[from]);
    if (s.lm_vectors.size()) {
      out.lm_vectors.row(static_cast<Eigen::Index>(k)) = s.lm_vectors.row(from);
    }
  }
  return out;
}

Encoder::Encoder(const ModelConfig& config, const Alphabets& alphabets,
                 ParameterStore& store, Rng& rng)
    : config_(config) {
  const Scalar bound = static_cast<Scalar>(0.1);
  word_table_ = store.Add(
      "encoder.word_table",
      UniformInit(alphabets.words.size(), config.word_dim, bound, rng));
  char_table_ = store.Add(
      "encoder.char_table",
      UniformInit(alphabets.chars.size(), config.char_dim, bound, rng));
  pos_table_ = store.Add(
      "encoder.pos_table",
      UniformInit(alphabets.pos.size(), config.pos_dim, bound, rng));
  root_ = store.Add("encoder.root",
                    UniformInit(1, config.input_dim(), bound, rng));
  char_conv_ = Linear(store, "encoder.char_conv",
                      config.char_window * config.char_dim,
                      config.char_filters, rng);
  int in = config.input_dim();
  for (int layer = 0; layer < config.lstm_layers; ++layer) {
    const std::string prefix = "encoder.lstm" + std::to_string(layer);
    forward_.emplace_back(store, prefix + ".fwd", in, config.lstm_hidden, rng);
    backward_.emplace_back(store, prefix + ".bwd", in, config.lstm_hidden,
                           rng);
    in = 2 * config.lstm_hidden;
  }
}

Value Encoder::CharCnn(std::span<const int> chars) const {
  std::vector<int> padded(chars.begin(), chars.end());
  const size_t window = static_cast<size_t>(config_.char_window);
  if (padded.size() < window) padded.resize(window, Alphabet::kPad);
  Value embedded = Gather(char_table_, padded);
  const Eigen::Index windows =
      static_cast<Eigen::Index>(padded.size() - window + 1);
  std::vector<Value> shifted;
  for (size_t k = 0; k < window; ++k) {
    shifted.push_back(SliceRows(embedded, static_cast<Eigen::Index>(k), windows));
  }
  Value unfolded = ConcatCols(shifted);
  return MaxRows(Relu(char_conv_(unfolded)));
}

Value Encoder::Embed(const IndexedSentence& s, bool with_lm,
                     const ForwardContext& ctx) const {
  if (s.size() == 0) throw std::invalid_argument("cannot embed an empty sentence");
  const auto rate = static_cast<Scalar>(config_.embed_dropout);
  Rng* rng = ctx.rng;
  Value words = Gather(word_table_, s.words);
  Value pos = Gather(pos_table_, s.pos);
  std::vector<Value> char_rows;
  char_rows.reserve(s.chars.size());
  for (const auto& c : s.chars) char_rows.push_back(CharCnn(c));
  Value chars = ConcatRows(char_rows);
  if (ctx.training) {
    words = Dropout(words, rate, *rng, true);
    chars = Dropout(chars, rate, *rng, true);
    pos = Dropout(pos, rate, *rng, true);
  }
  std::vector<Value> parts = {words, chars, pos};
  if (config_.lm_dim > 0) {
    Matrix lm = Matrix::Zero(s.size(), config_.lm_dim);
    if (with_lm && s.lm_vectors.size()) {
      if (s.lm_vectors.cols() != config_.lm_dim ||
          s.lm_vectors.rows() != s.size()) {
        throw ShapeError("contextual vectors are " +
                         std::to_string(s.lm_vectors.rows()) + "x" +
                         std::to_string(s.lm_vectors.cols()) +
                         ", model expects " + std::to_string(s.size()) + "x" +
                         std::to_string(config_.lm_dim));
      }
      lm = s.lm_vectors;
    }
    parts.push_back(Value::Constant(std::move(lm)));
  } else if (with_lm && s.lm_vectors.size()) {
    throw ShapeError("contextual vectors supplied but the model has lm_dim = 0");
  }
  return ConcatCols(parts);
}

Value Encoder::RunBiLstm(const Value& x, const ForwardContext& ctx) const {
  Value layer_input = x;
  const int hidden = config_.lstm_hidden;
  for (size_t layer = 0; layer < forward_.size(); ++layer) {
    Matrix fwd_mask, bwd_mask;
    if (ctx.training) {
      if (layer > 0 && config_.layer_dropout > 0) {
        layer_input = Mul(layer_input,
                          Value::Constant(DropoutMask(
                              layer_input.cols(),
                              static_cast<Scalar>(config_.layer_dropout),
                              *ctx.rng)));
      }
      if (config_.hidden_dropout > 0) {
        const auto rate = static_cast<Scalar>(config_.hidden_dropout);
        fwd_mask = DropoutMask(hidden, rate, *ctx.rng);
        bwd_mask = DropoutMask(hidden, rate, *ctx.rng);
      }
    }
    Value fwd = RunLstm(forward_[layer], layer_input, false, fwd_mask);
    Value bwd = RunLstm(backward_[layer], layer_input, true, bwd_mask);
    std::vector<Value> both = {fwd, bwd};
    layer_input = ConcatCols(both);
  }
  return layer_input;
}

Value Encoder::Encode(const IndexedSentence& s, EncodeMode mode,
                      const ForwardContext& ctx) const {
  if (s.size() == 0) throw std::invalid_argument("cannot encode an empty sentence");
  Value x = Embed(s, mode != EncodeMode::kMaskedLm, ctx);
  if (mode == EncodeMode::kParse) {
    std::vector<Value> rows = {root_, x};
    x = ConcatRows(rows);
  }
  return RunBiLstm(x, ctx);
}

size_t Encoder::LoadPretrained(const WordVectors& vectors,
                               const Alphabets& alphabets) {
  if (vectors.vectors.empty()) return 0;
  if (vectors.dim != config_.word_dim) {
    throw ShapeError("pretrained vectors have dim " +
                     std::to_string(vectors.dim) + ", model word_dim is " +
                     std::to_string(config_.word_dim));
  }
  size_t found = 0;
  Matrix& table = word_table_.mutable_data();
  for (int id = Alphabet::kReserved; id < alphabets.words.size(); ++id) {
    const std::string& form = alphabets.words.Symbol(id);
    auto it = vectors.vectors.find(form);
    if (it == vectors.vectors.end()) it = vectors.vectors.find(AsciiLower(form));
    if (it == vectors.vectors.end()) continue;
    for (int c = 0; c < config_.word_dim; ++c) table(id, c) = it->second[c];
    ++found;
  }
  return found;
}

}  // namespace udpx
