// udpx/layers.h

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

// Small building blocks shared by the encoder and the output heads.

#ifndef UDPX_LAYERS_H_
#define UDPX_LAYERS_H_

#include <string>

#include "udpx/autodiff.h"
#include "udpx/optimizer.h"

namespace udpx {

// Dropout switch and randomness for one forward pass. Inference passes use
// training = false and need no generator.
struct ForwardContext {
  bool training = false;
  Rng* rng = nullptr;

  static ForwardContext Inference() { return {}; }
  static ForwardContext Training(Rng& rng) { return {true, &rng}; }
};

Matrix GlorotUniform(int rows, int cols, Rng& rng);
Matrix UniformInit(int rows, int cols, Scalar bound, Rng& rng);

// x W + b with W: in x out, b: 1 x out.
struct Linear {
  Value weight;
  Value bias;

  Linear() = default;
  Linear(ParameterStore& store, const std::string& name, int in, int out,
         Rng& rng);
  Value operator()(const Value& x) const;
  int in_dim() const { return static_cast<int>(weight.rows()); }
  int out_dim() const { return static_cast<int>(weight.cols()); }
};

// One direction of an LSTM layer. Gate order in the 4H columns: i f g o.
struct LstmParams {
  Value input;      // in x 4H
  Value recurrent;  // H x 4H
  Value bias;       // 1 x 4H

  LstmParams() = default;
  LstmParams(ParameterStore& store, const std::string& name, int in,
             int hidden, Rng& rng);
  int hidden() const { return static_cast<int>(recurrent.rows()); }
};

// Runs one direction over the rows of `x` (T x in) and returns T x H, with
// row t the state after consuming row t. `hidden_mask`, when non-empty, is a
// 1 x H mask applied to the carried state at every step.
Value RunLstm(const LstmParams& p, const Value& x, bool reverse,
              const Matrix& hidden_mask);

}  // namespace udpx

#endif  // UDPX_LAYERS_H_
