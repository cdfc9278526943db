// udpx/autodiff.h

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

// Dense 2-D arrays with reverse-mode differentiation.
//
// Every array is a matrix; vectors are 1 x n rows and sequences are T x n
// with one row per position. A Value is a cheap handle onto a graph node.
// Parameters are leaves that persist across steps and accumulate gradients;
// everything produced by an op is an interior node owned by the handles that
// reference it, so a graph is released as soon as the loss goes out of scope.

#ifndef UDPX_AUTODIFF_H_
#define UDPX_AUTODIFF_H_

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace udpx {

#ifdef UDPX_FLOAT32
using Scalar = float;
#else
using Scalar = double;
#endif

using Matrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Rng = std::mt19937_64;

// Raised for shape mismatches and misuse of the graph API.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace internal {
struct Node;
}

class Value {
 public:
  Value() = default;

  // A leaf that receives gradients.
  static Value Parameter(Matrix data, std::string name = {});
  // A leaf that never receives gradients.
  static Value Constant(Matrix data);
  static Value ConstantScalar(Scalar v);

  bool defined() const { return node_ != nullptr; }
  const Matrix& data() const;
  Matrix& mutable_data();
  // Zero-filled when nothing has flowed into this node yet.
  const Matrix& grad() const;
  Matrix& mutable_grad();
  bool requires_grad() const;
  const std::string& name() const;
  Eigen::Index rows() const { return data().rows(); }
  Eigen::Index cols() const { return data().cols(); }
  Scalar item() const;
  void ZeroGrad();

  bool SameNode(const Value& other) const { return node_ == other.node_; }
  internal::Node* node() const { return node_.get(); }

 private:
  friend Value MakeNode(Matrix data, std::vector<Value> inputs,
                        std::function<void(internal::Node&)> backward);
  explicit Value(std::shared_ptr<internal::Node> node)
      : node_(std::move(node)) {}
  std::shared_ptr<internal::Node> node_;
};

namespace internal {
struct Node {
  Matrix data;
  Matrix grad;
  bool requires_grad = false;
  std::string name;
  std::vector<Value> inputs;
  std::function<void(Node&)> backward;

  Matrix& Grad() {
    if (grad.size() == 0) grad = Matrix::Zero(data.rows(), data.cols());
    return grad;
  }
};
}  // namespace internal

// Builds an interior node; `backward` reads node.grad and adds into the
// inputs' grads through AccumulateGrad. The node requires gradients iff some
// input does; otherwise `backward` is dropped.
Value MakeNode(Matrix data, std::vector<Value> inputs,
               std::function<void(internal::Node&)> backward);

// grad(v) += g, skipped when v does not require gradients.
template <typename Expr>
void AccumulateGrad(const Value& v, const Expr& g) {
  if (v.requires_grad()) v.node()->Grad() += g;
}

// While alive on a thread, ops on that thread record no backward graph.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Runs reverse accumulation from a 1x1 loss. Gradients accumulate into
// parameters; callers zero them between steps.
void Backward(const Value& loss);

// --- op family ---------------------------------------------------------

Value MatMul(const Value& a, const Value& b);
Value Transpose(const Value& a);
// Elementwise a + b. `b` may also be 1 x n (added to every row), m x 1
// (added to every column) or 1 x 1.
Value Add(const Value& a, const Value& b);
Value Sub(const Value& a, const Value& b);
// Elementwise product with the same broadcasting rules as Add.
Value Mul(const Value& a, const Value& b);
Value Scale(const Value& a, Scalar s);
Value ConcatCols(std::span<const Value> parts);
Value ConcatRows(std::span<const Value> parts);
Value SliceRows(const Value& a, Eigen::Index start, Eigen::Index count);
Value SliceCols(const Value& a, Eigen::Index start, Eigen::Index count);
Value Tanh(const Value& a);
Value Sigmoid(const Value& a);
Value Relu(const Value& a);
Value Log(const Value& a);
Value SoftmaxRows(const Value& a);
Value LogSoftmaxRows(const Value& a);
// 1x1 sum / mean of every entry.
Value Sum(const Value& a);
Value Mean(const Value& a);
// 1 x n column means.
Value MeanRows(const Value& a);
// 1 x n column maxima (max-pooling over positions).
Value MaxRows(const Value& a);
// Rows of `table` picked by index; the embedding lookup.
Value Gather(const Value& table, std::span<const int> rows);
// 1x1 sum of a[r][c] over the given cells.
Value PickSum(const Value& a, std::span<const std::pair<int, int>> cells);
// out[n][k] = dot(a[n][k*d:(k+1)*d], y[n]) with a: N x K*d, y: N x d.
// Composed with MatMul this is the per-class bilinear form x^T U_k y.
Value BlockRowDot(const Value& a, const Value& y);
// One LSTM step. `gates` holds the pre-activations [i f g o] (N x 4H) and
// `cell` the previous memory (N x H); returns [h c] as N x 2H.
Value LstmCell(const Value& gates, const Value& cell);
// Inverted dropout. Identity when !training or rate == 0.
Value Dropout(const Value& a, Scalar rate, Rng& rng, bool training);

// A 1 x n keep-mask scaled by 1/(1-rate); shared across rows by Mul it gives
// time-shared (variational) dropout.
Matrix DropoutMask(Eigen::Index n, Scalar rate, Rng& rng);

}  // namespace udpx

#endif  // UDPX_AUTODIFF_H_
