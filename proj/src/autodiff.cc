// udpx/autodiff.cc

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

#include "udpx/autodiff.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace udpx {

namespace {

std::string ShapeOf(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

[[noreturn]] void Mismatch(const char* op, const Matrix& a, const Matrix& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + ShapeOf(a) +
                   " and " + ShapeOf(b));
}

enum class Broadcast { kSame, kRow, kCol, kScalar };

Broadcast Classify(const char* op, const Matrix& a, const Matrix& b) {
  if (a.rows() == b.rows() && a.cols() == b.cols()) return Broadcast::kSame;
  if (b.rows() == 1 && b.cols() == 1) return Broadcast::kScalar;
  if (b.rows() == 1 && b.cols() == a.cols()) return Broadcast::kRow;
  if (b.cols() == 1 && b.rows() == a.rows()) return Broadcast::kCol;
  Mismatch(op, a, b);
}

// Expands b to a's shape.
Matrix Expand(const Matrix& b, Broadcast kind, Eigen::Index rows,
              Eigen::Index cols) {
  switch (kind) {
    case Broadcast::kSame:
      return b;
    case Broadcast::kRow:
      return b.replicate(rows, 1);
    case Broadcast::kCol:
      return b.replicate(1, cols);
    case Broadcast::kScalar:
      return Matrix::Constant(rows, cols, b(0, 0));
  }
  return b;
}

// Sums g back down to the broadcast operand's shape.
Matrix Reduce(const Matrix& g, Broadcast kind) {
  switch (kind) {
    case Broadcast::kSame:
      return g;
    case Broadcast::kRow:
      return g.colwise().sum();
    case Broadcast::kCol:
      return g.rowwise().sum();
    case Broadcast::kScalar:
      return Matrix::Constant(1, 1, g.sum());
  }
  return g;
}

thread_local bool grad_disabled = false;

}  // namespace

NoGradGuard::NoGradGuard() : previous_(grad_disabled) { grad_disabled = true; }
NoGradGuard::~NoGradGuard() { grad_disabled = previous_; }

// --- Value ---------------------------------------------------------------

Value Value::Parameter(Matrix data, std::string name) {
  auto node = std::make_shared<internal::Node>();
  node->data = std::move(data);
  node->requires_grad = true;
  node->name = std::move(name);
  return Value(std::move(node));
}

Value Value::Constant(Matrix data) {
  auto node = std::make_shared<internal::Node>();
  node->data = std::move(data);
  return Value(std::move(node));
}

Value Value::ConstantScalar(Scalar v) {
  return Constant(Matrix::Constant(1, 1, v));
}

const Matrix& Value::data() const { return node_->data; }
Matrix& Value::mutable_data() { return node_->data; }
const Matrix& Value::grad() const { return node_->Grad(); }
Matrix& Value::mutable_grad() { return node_->Grad(); }
bool Value::requires_grad() const { return node_->requires_grad; }
const std::string& Value::name() const { return node_->name; }

Scalar Value::item() const {
  if (rows() != 1 || cols() != 1) {
    throw ShapeError("item: expected 1x1, got " + ShapeOf(data()));
  }
  return data()(0, 0);
}

void Value::ZeroGrad() {
  if (node_->grad.size() != 0) node_->grad.setZero();
}

Value MakeNode(Matrix data, std::vector<Value> inputs,
               std::function<void(internal::Node&)> backward) {
  auto node = std::make_shared<internal::Node>();
  node->data = std::move(data);
  node->requires_grad = !grad_disabled && std::any_of(inputs.begin(), inputs.end(),
                                    [](const Value& v) {
                                      return v.requires_grad();
                                    });
  if (node->requires_grad) {
    node->inputs = std::move(inputs);
    node->backward = std::move(backward);
  }
  return Value(std::move(node));
}

void Backward(const Value& loss) {
  if (!loss.defined() || loss.rows() != 1 || loss.cols() != 1) {
    throw ShapeError("backward: loss must be 1x1, got " +
                     (loss.defined() ? ShapeOf(loss.data()) : "undefined"));
  }
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS; reversed it is a topological order.
  std::vector<internal::Node*> order;
  std::unordered_set<internal::Node*> seen;
  std::vector<std::pair<internal::Node*, size_t>> stack;
  stack.emplace_back(loss.node(), 0);
  seen.insert(loss.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      internal::Node* child = node->inputs[next++].node();
      if (child->requires_grad && seen.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  loss.node()->Grad()(0, 0) += 1;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    internal::Node* node = *it;
    if (node->backward && node->grad.size() != 0) node->backward(*node);
  }
  // Interior grads are scratch; free them so a retained graph does not pin
  // memory. Parameters (no backward rule) keep theirs.
  for (internal::Node* node : order) {
    if (node->backward) node->grad.resize(0, 0);
  }
}

// --- ops -----------------------------------------------------------------

Value MatMul(const Value& a, const Value& b) {
  if (a.cols() != b.rows()) Mismatch("matmul", a.data(), b.data());
  Matrix out = a.data() * b.data();
  return MakeNode(std::move(out), {a, b}, [a, b](internal::Node& n) {
    if (a.requires_grad()) AccumulateGrad(a, n.grad * b.data().transpose());
    if (b.requires_grad()) AccumulateGrad(b, a.data().transpose() * n.grad);
  });
}

Value Transpose(const Value& a) {
  Matrix out = a.data().transpose();
  return MakeNode(std::move(out), {a}, [a](internal::Node& n) {
    AccumulateGrad(a, n.grad.transpose());
  });
}

Value Add(const Value& a, const Value& b) {
  Broadcast kind = Classify("add", a.data(), b.data());
  Matrix out = a.data() + Expand(b.data(), kind, a.rows(), a.cols());
  return MakeNode(std::move(out), {a, b}, [a, b, kind](internal::Node& n) {
    AccumulateGrad(a, n.grad);
    if (b.requires_grad()) AccumulateGrad(b, Reduce(n.grad, kind));
  });
}

Value Sub(const Value& a, const Value& b) {
  Broadcast kind = Classify("sub", a.data(), b.data());
  Matrix out = a.data() - Expand(b.data(), kind, a.rows(), a.cols());
  return MakeNode(std::move(out), {a, b}, [a, b, kind](internal::Node& n) {
    AccumulateGrad(a, n.grad);
    if (b.requires_grad()) AccumulateGrad(b, -Reduce(n.grad, kind));
  });
}

Value Mul(const Value& a, const Value& b) {
  Broadcast kind = Classify("mul", a.data(), b.data());
  Matrix bx = Expand(b.data(), kind, a.rows(), a.cols());
  Matrix out = a.data().cwiseProduct(bx);
  return MakeNode(std::move(out), {a, b},
                  [a, b, kind, bx = std::move(bx)](internal::Node& n) {
                    if (a.requires_grad()) {
                      AccumulateGrad(a, n.grad.cwiseProduct(bx));
                    }
                    if (b.requires_grad()) {
                      AccumulateGrad(
                          b, Reduce(n.grad.cwiseProduct(a.data()), kind));
                    }
                  });
}

Value Scale(const Value& a, Scalar s) {
  Matrix out = a.data() * s;
  return MakeNode(std::move(out), {a}, [a, s](internal::Node& n) {
    AccumulateGrad(a, n.grad * s);
  });
}

Value ConcatCols(std::span<const Value> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  Eigen::Index rows = parts[0].rows(), cols = 0;
  for (const Value& p : parts) {
    if (p.rows() != rows) Mismatch("concat_cols", parts[0].data(), p.data());
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const Value& p : parts) {
    out.middleCols(at, p.cols()) = p.data();
    at += p.cols();
  }
  std::vector<Value> inputs(parts.begin(), parts.end());
  return MakeNode(std::move(out), inputs, [inputs](internal::Node& n) {
    Eigen::Index at = 0;
    for (const Value& p : inputs) {
      AccumulateGrad(p, n.grad.middleCols(at, p.cols()));
      at += p.cols();
    }
  });
}

Value ConcatRows(std::span<const Value> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  Eigen::Index cols = parts[0].cols(), rows = 0;
  for (const Value& p : parts) {
    if (p.cols() != cols) Mismatch("concat_rows", parts[0].data(), p.data());
    rows += p.rows();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const Value& p : parts) {
    out.middleRows(at, p.rows()) = p.data();
    at += p.rows();
  }
  std::vector<Value> inputs(parts.begin(), parts.end());
  return MakeNode(std::move(out), inputs, [inputs](internal::Node& n) {
    Eigen::Index at = 0;
    for (const Value& p : inputs) {
      AccumulateGrad(p, n.grad.middleRows(at, p.rows()));
      at += p.rows();
    }
  });
}

Value SliceRows(const Value& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.rows()) {
    throw ShapeError("slice_rows: [" + std::to_string(start) + ", " +
                     std::to_string(start + count) + ") out of " +
                     ShapeOf(a.data()));
  }
  Matrix out = a.data().middleRows(start, count);
  return MakeNode(std::move(out), {a}, [a, start, count](internal::Node& n) {
    if (a.requires_grad()) a.node()->Grad().middleRows(start, count) += n.grad;
  });
}

Value SliceCols(const Value& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw ShapeError("slice_cols: [" + std::to_string(start) + ", " +
                     std::to_string(start + count) + ") out of " +
                     ShapeOf(a.data()));
  }
  Matrix out = a.data().middleCols(start, count);
  return MakeNode(std::move(out), {a}, [a, start, count](internal::Node& n) {
    if (a.requires_grad()) a.node()->Grad().middleCols(start, count) += n.grad;
  });
}

Value Tanh(const Value& a) {
  Matrix out = a.data().array().tanh().matrix();
  return MakeNode(out, {a}, [a](internal::Node& n) {
    AccumulateGrad(
        a, (n.grad.array() * (1 - n.data.array().square())).matrix());
  });
}

Value Sigmoid(const Value& a) {
  Matrix out = (1 / (1 + (-a.data().array()).exp())).matrix();
  return MakeNode(out, {a}, [a](internal::Node& n) {
    AccumulateGrad(a, (n.grad.array() * n.data.array() *
                       (1 - n.data.array()))
                          .matrix());
  });
}

Value Relu(const Value& a) {
  Matrix out = a.data().cwiseMax(Scalar(0));
  return MakeNode(std::move(out), {a}, [a](internal::Node& n) {
    AccumulateGrad(
        a, (a.data().array() > 0).select(n.grad, Matrix::Zero(n.grad.rows(),
                                                              n.grad.cols())));
  });
}

Value Log(const Value& a) {
  Matrix out = a.data().array().log().matrix();
  return MakeNode(std::move(out), {a}, [a](internal::Node& n) {
    AccumulateGrad(a, (n.grad.array() / a.data().array()).matrix());
  });
}

namespace {
Matrix RowSoftmax(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    Scalar mx = x.row(r).maxCoeff();
    // std::exp, not the vectorized kernel: masked entries must be exactly 0.
    out.row(r) = (x.row(r).array() - mx).unaryExpr([](Scalar v) { return std::exp(v); }).matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}
}  // namespace

Value SoftmaxRows(const Value& a) {
  Matrix out = RowSoftmax(a.data());
  return MakeNode(out, {a}, [a](internal::Node& n) {
    // dx = y * (g - sum(g * y))
    Matrix dot = (n.grad.cwiseProduct(n.data)).rowwise().sum();
    AccumulateGrad(a, n.data.cwiseProduct(n.grad - dot.replicate(1, n.grad.cols())));
  });
}

Value LogSoftmaxRows(const Value& a) {
  const Matrix& x = a.data();
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    Scalar mx = x.row(r).maxCoeff();
    Scalar lse = mx + std::log((x.row(r).array() - mx).exp().sum());
    out.row(r) = (x.row(r).array() - lse).matrix();
  }
  return MakeNode(out, {a}, [a](internal::Node& n) {
    // dx = g - softmax * sum(g)
    Matrix prob = n.data.array().exp().matrix();
    Matrix total = n.grad.rowwise().sum();
    AccumulateGrad(a, n.grad - prob.cwiseProduct(total.replicate(1, prob.cols())));
  });
}

Value Sum(const Value& a) {
  Matrix out = Matrix::Constant(1, 1, a.data().sum());
  return MakeNode(std::move(out), {a}, [a](internal::Node& n) {
    AccumulateGrad(a, Matrix::Constant(a.rows(), a.cols(), n.grad(0, 0)));
  });
}

Value Mean(const Value& a) {
  if (a.data().size() == 0) throw ShapeError("mean: empty input");
  Scalar count = static_cast<Scalar>(a.data().size());
  Matrix out = Matrix::Constant(1, 1, a.data().sum() / count);
  return MakeNode(std::move(out), {a}, [a, count](internal::Node& n) {
    AccumulateGrad(a,
                   Matrix::Constant(a.rows(), a.cols(), n.grad(0, 0) / count));
  });
}

Value MeanRows(const Value& a) {
  if (a.rows() == 0) throw ShapeError("mean_rows: no rows");
  Scalar count = static_cast<Scalar>(a.rows());
  Matrix out = a.data().colwise().sum() / count;
  return MakeNode(std::move(out), {a}, [a, count](internal::Node& n) {
    AccumulateGrad(a, (n.grad / count).replicate(a.rows(), 1));
  });
}

Value MaxRows(const Value& a) {
  if (a.rows() == 0) throw ShapeError("max_rows: no rows");
  std::vector<Eigen::Index> arg(a.cols());
  Matrix out(1, a.cols());
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    Eigen::Index best = 0;
    // First maximum wins on ties.
    for (Eigen::Index r = 1; r < a.rows(); ++r) {
      if (a.data()(r, c) > a.data()(best, c)) best = r;
    }
    arg[c] = best;
    out(0, c) = a.data()(best, c);
  }
  return MakeNode(std::move(out), {a}, [a, arg](internal::Node& n) {
    if (!a.requires_grad()) return;
    Matrix& g = a.node()->Grad();
    for (Eigen::Index c = 0; c < n.grad.cols(); ++c) g(arg[c], c) += n.grad(0, c);
  });
}

Value Gather(const Value& table, std::span<const int> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), table.cols());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= table.rows()) {
      throw ShapeError("gather: row " + std::to_string(rows[i]) +
                       " out of " + ShapeOf(table.data()));
    }
    out.row(static_cast<Eigen::Index>(i)) = table.data().row(rows[i]);
  }
  std::vector<int> idx(rows.begin(), rows.end());
  return MakeNode(std::move(out), {table},
                  [table, idx = std::move(idx)](internal::Node& n) {
                    if (!table.requires_grad()) return;
                    Matrix& g = table.node()->Grad();
                    for (size_t i = 0; i < idx.size(); ++i) {
                      g.row(idx[i]) += n.grad.row(static_cast<Eigen::Index>(i));
                    }
                  });
}

Value PickSum(const Value& a, std::span<const std::pair<int, int>> cells) {
  Scalar total = 0;
  for (auto [r, c] : cells) {
    if (r < 0 || r >= a.rows() || c < 0 || c >= a.cols()) {
      throw ShapeError("pick_sum: cell (" + std::to_string(r) + "," +
                       std::to_string(c) + ") out of " + ShapeOf(a.data()));
    }
    total += a.data()(r, c);
  }
  std::vector<std::pair<int, int>> picked(cells.begin(), cells.end());
  return MakeNode(Matrix::Constant(1, 1, total), {a},
                  [a, picked = std::move(picked)](internal::Node& n) {
                    if (!a.requires_grad()) return;
                    Matrix& g = a.node()->Grad();
                    for (auto [r, c] : picked) g(r, c) += n.grad(0, 0);
                  });
}

Value BlockRowDot(const Value& a, const Value& y) {
  const Eigen::Index d = y.cols();
  if (a.rows() != y.rows() || d == 0 || a.cols() % d != 0) {
    Mismatch("block_row_dot", a.data(), y.data());
  }
  const Eigen::Index classes = a.cols() / d;
  Matrix out(a.rows(), classes);
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index k = 0; k < classes; ++k) {
      out(r, k) = a.data().row(r).segment(k * d, d).dot(y.data().row(r));
    }
  }
  return MakeNode(std::move(out), {a, y}, [a, y, d, classes](internal::Node& n) {
    if (a.requires_grad()) {
      Matrix& ga = a.node()->Grad();
      for (Eigen::Index r = 0; r < n.grad.rows(); ++r) {
        for (Eigen::Index k = 0; k < classes; ++k) {
          ga.row(r).segment(k * d, d) += n.grad(r, k) * y.data().row(r);
        }
      }
    }
    if (y.requires_grad()) {
      Matrix& gy = y.node()->Grad();
      for (Eigen::Index r = 0; r < n.grad.rows(); ++r) {
        for (Eigen::Index k = 0; k < classes; ++k) {
          gy.row(r) += n.grad(r, k) * a.data().row(r).segment(k * d, d);
        }
      }
    }
  });
}

Value LstmCell(const Value& gates, const Value& cell) {
  const Eigen::Index h = cell.cols();
  if (gates.cols() != 4 * h || gates.rows() != cell.rows()) {
    Mismatch("lstm_cell", gates.data(), cell.data());
  }
  auto sigmoid = [](const auto& x) {
    return (1 / (1 + (-x.array()).exp())).matrix().eval();
  };
  Matrix i = sigmoid(gates.data().middleCols(0, h));
  Matrix f = sigmoid(gates.data().middleCols(h, h));
  Matrix g = gates.data().middleCols(2 * h, h).array().tanh().matrix();
  Matrix o = sigmoid(gates.data().middleCols(3 * h, h));
  Matrix c = f.cwiseProduct(cell.data()) + i.cwiseProduct(g);
  Matrix tc = c.array().tanh().matrix();
  Matrix out(cell.rows(), 2 * h);
  out.leftCols(h) = o.cwiseProduct(tc);
  out.rightCols(h) = c;
  return MakeNode(
      std::move(out), {gates, cell},
      [gates, cell, h, i = std::move(i), f = std::move(f), g = std::move(g),
       o = std::move(o), tc = std::move(tc)](internal::Node& n) {
        auto dh = n.grad.leftCols(h).array();
        auto dc = (n.grad.rightCols(h).array() +
                   dh * o.array() * (1 - tc.array().square()))
                      .eval();
        if (gates.requires_grad()) {
          Matrix dz(n.grad.rows(), 4 * h);
          dz.middleCols(0, h) =
              (dc * g.array() * i.array() * (1 - i.array())).matrix();
          dz.middleCols(h, h) =
              (dc * cell.data().array() * f.array() * (1 - f.array())).matrix();
          dz.middleCols(2 * h, h) =
              (dc * i.array() * (1 - g.array().square())).matrix();
          dz.middleCols(3 * h, h) =
              (dh * tc.array() * o.array() * (1 - o.array())).matrix();
          AccumulateGrad(gates, dz);
        }
        if (cell.requires_grad()) AccumulateGrad(cell, (dc * f.array()).matrix());
      });
}

Matrix DropoutMask(Eigen::Index n, Scalar rate, Rng& rng) {
  Matrix mask(1, n);
  std::bernoulli_distribution keep(1.0 - static_cast<double>(rate));
  const Scalar scale = 1 / (1 - rate);
  for (Eigen::Index i = 0; i < n; ++i) mask(0, i) = keep(rng) ? scale : 0;
  return mask;
}

Value Dropout(const Value& a, Scalar rate, Rng& rng, bool training) {
  if (!training || rate <= 0) return a;
  if (rate >= 1) throw ShapeError("dropout: rate must be < 1");
  std::bernoulli_distribution keep(1.0 - static_cast<double>(rate));
  const Scalar scale = 1 / (1 - rate);
  Matrix mask(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = keep(rng) ? scale : 0;
  }
  return Mul(a, Value::Constant(std::move(mask)));
}

}  // namespace udpx
