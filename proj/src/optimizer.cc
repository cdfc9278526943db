// udpx/optimizer.cc

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

#include "udpx/optimizer.h"

#include <cmath>
#include <stdexcept>

namespace udpx {

Value ParameterStore::Add(const std::string& name, Matrix init) {
  for (const Value& p : params_) {
    if (p.name() == name) {
      throw std::invalid_argument("duplicate parameter name: " + name);
    }
  }
  params_.push_back(Value::Parameter(std::move(init), name));
  return params_.back();
}

const Value& ParameterStore::Get(const std::string& name) const {
  for (const Value& p : params_) {
    if (p.name() == name) return p;
  }
  throw std::out_of_range("unknown parameter: " + name);
}

void ParameterStore::ZeroGrad() {
  for (Value& p : params_) p.ZeroGrad();
}

std::vector<Matrix> ParameterStore::Snapshot() const {
  std::vector<Matrix> out;
  out.reserve(params_.size());
  for (const Value& p : params_) out.push_back(p.data());
  return out;
}

void ParameterStore::Restore(const std::vector<Matrix>& snapshot) {
  if (snapshot.size() != params_.size()) {
    throw std::invalid_argument("snapshot has " +
                                std::to_string(snapshot.size()) +
                                " arrays, store has " +
                                std::to_string(params_.size()));
  }
  for (size_t i = 0; i < params_.size(); ++i) {
    if (snapshot[i].rows() != params_[i].rows() ||
        snapshot[i].cols() != params_[i].cols()) {
      throw ShapeError("snapshot shape mismatch for " + params_[i].name());
    }
    params_[i].mutable_data() = snapshot[i];
  }
}

Adam::Adam(const ParameterStore& store, AdamOptions options)
    : options_(options) {
  for (const Value& p : store.params()) {
    first_.push_back(Matrix::Zero(p.rows(), p.cols()));
    second_.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
}

double Adam::Step(ParameterStore& store) {
  auto& params = store.params();
  if (params.size() != first_.size()) {
    throw std::logic_error("adam: parameter store changed after construction");
  }
  double norm_sq = 0;
  for (const Value& p : params) {
    const Matrix& g = p.grad();
    if (g.hasNaN()) {
      throw NonFiniteGradient("NaN gradient in parameter " + p.name());
    }
    norm_sq += static_cast<double>(g.squaredNorm());
  }
  const double norm = std::sqrt(norm_sq);
  const double scale =
      (options_.clip_norm > 0 && norm > options_.clip_norm)
          ? options_.clip_norm / norm
          : 1.0;

  ++steps_;
  const auto b1 = static_cast<Scalar>(options_.beta1);
  const auto b2 = static_cast<Scalar>(options_.beta2);
  const auto correction1 = static_cast<Scalar>(
      1 - std::pow(options_.beta1, static_cast<double>(steps_)));
  const auto correction2 = static_cast<Scalar>(
      1 - std::pow(options_.beta2, static_cast<double>(steps_)));
  const auto lr = static_cast<Scalar>(options_.learning_rate);
  const auto eps = static_cast<Scalar>(options_.epsilon);
  for (size_t i = 0; i < params.size(); ++i) {
    Value p = params[i];
    Matrix g = p.grad() * static_cast<Scalar>(scale);
    first_[i] = b1 * first_[i] + (1 - b1) * g;
    second_[i] = b2 * second_[i] + (1 - b2) * g.cwiseProduct(g);
    auto m_hat = first_[i].array() / correction1;
    auto v_hat = second_[i].array() / correction2;
    p.mutable_data().array() -= lr * m_hat / (v_hat.sqrt() + eps);
  }
  return norm;
}

}  // namespace udpx
