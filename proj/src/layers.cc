// udpx/layers.cc

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

#include "udpx/layers.h"

#include <cmath>

namespace udpx {

Matrix UniformInit(int rows, int cols, Scalar bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = static_cast<Scalar>(dist(rng));
  }
  return m;
}

Matrix GlorotUniform(int rows, int cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / (rows + cols));
  return UniformInit(rows, cols, static_cast<Scalar>(bound), rng);
}

Linear::Linear(ParameterStore& store, const std::string& name, int in, int out,
               Rng& rng)
    : weight(store.Add(name + ".weight", GlorotUniform(in, out, rng))),
      bias(store.Add(name + ".bias", Matrix::Zero(1, out))) {}

Value Linear::operator()(const Value& x) const {
  return Add(MatMul(x, weight), bias);
}

LstmParams::LstmParams(ParameterStore& store, const std::string& name, int in,
                       int hidden, Rng& rng) {
  input = store.Add(name + ".input", GlorotUniform(in, 4 * hidden, rng));
  recurrent =
      store.Add(name + ".recurrent", GlorotUniform(hidden, 4 * hidden, rng));
  Matrix b = Matrix::Zero(1, 4 * hidden);
  b.middleCols(hidden, hidden).setOnes();  // forget gate starts open
  bias = store.Add(name + ".bias", std::move(b));
}

Value RunLstm(const LstmParams& p, const Value& x, bool reverse,
              const Matrix& hidden_mask) {
  const int steps = static_cast<int>(x.rows());
  const int hidden = p.hidden();
  Value projected = Add(MatMul(x, p.input), p.bias);
  Value mask = hidden_mask.size() ? Value::Constant(hidden_mask) : Value();
  Value h = Value::Constant(Matrix::Zero(1, hidden));
  Value c = Value::Constant(Matrix::Zero(1, hidden));
  std::vector<Value> outputs(static_cast<size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    const int t = reverse ? steps - 1 - k : k;
    Value carried = mask.defined() ? Mul(h, mask) : h;
    Value gates =
        Add(SliceRows(projected, t, 1), MatMul(carried, p.recurrent));
    Value state = LstmCell(gates, c);
    h = SliceCols(state, 0, hidden);
    c = SliceCols(state, hidden, hidden);
    outputs[static_cast<size_t>(t)] = h;
  }
  return ConcatRows(outputs);
}

}  // namespace udpx
