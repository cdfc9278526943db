// udpx/tests/unit/autodiff_test.cc

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

#include <cmath>

#include "doctest.h"
#include "gradient_suite.h"

namespace udpx {
namespace {

Matrix RandomMatrix(int rows, int cols, Rng& rng, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> d(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
  return m;
}

TEST_CASE("softmax of equal logits is uniform") {
  Value p = SoftmaxRows(Value::Constant(Matrix::Zero(1, 2)));
  CHECK(p.data()(0, 0) == doctest::Approx(0.5));
  CHECK(p.data()(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("softmax rows sum to one") {
  Rng rng(3);
  Value p = SoftmaxRows(Value::Constant(RandomMatrix(7, 9, rng, -30, 30)));
  for (Eigen::Index r = 0; r < 7; ++r) {
    CHECK(std::abs(p.data().row(r).sum() - 1.0) < 1e-9);
  }
}

TEST_CASE("relu clips negatives") {
  Matrix m(1, 2);
  m << -1, 2;
  Value r = Relu(Value::Constant(m));
  CHECK(r.data()(0, 0) == 0);
  CHECK(r.data()(0, 1) == 2);
}

TEST_CASE("dropout with rate 0 or at inference is the identity") {
  Rng rng(1);
  Matrix m = RandomMatrix(3, 4, rng);
  Value x = Value::Constant(m);
  CHECK(Dropout(x, 0, rng, true).data() == m);
  CHECK(Dropout(x, Scalar(0.5), rng, false).data() == m);
}

TEST_CASE("dropout zeroes and rescales") {
  Rng rng(2);
  Value x = Value::Constant(Matrix::Ones(200, 50));
  const Matrix d = Dropout(x, Scalar(0.25), rng, true).data();
  int zeros = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d.data()[i] == 0) {
      ++zeros;
    } else {
      CHECK(d.data()[i] == doctest::Approx(1 / 0.75));
    }
  }
  CHECK(std::abs(zeros / 10000.0 - 0.25) < 0.02);
}

TEST_CASE("backward of w*w gives 2w") {
  Value w = Value::Parameter(Matrix::Constant(1, 1, 3), "w");
  Backward(Sum(Mul(w, w)));
  CHECK(w.grad()(0, 0) == 6);
}

TEST_CASE("backward of a constant leaves parameter grads at zero") {
  Value w = Value::Parameter(Matrix::Constant(2, 2, 1), "w");
  Backward(Value::ConstantScalar(4));
  CHECK(w.grad().isZero());
}

TEST_CASE("backward rejects a non-scalar loss") {
  Value w = Value::Parameter(Matrix::Ones(2, 2), "w");
  CHECK_THROWS_AS(Backward(w), ShapeError);
}

TEST_CASE("gradients accumulate across backward calls") {
  Value w = Value::Parameter(Matrix::Constant(1, 1, 2), "w");
  Backward(Sum(Mul(w, w)));
  Backward(Sum(Mul(w, w)));
  CHECK(w.grad()(0, 0) == 8);
  w.ZeroGrad();
  CHECK(w.grad()(0, 0) == 0);
}

TEST_CASE("shape mismatch names the op and shapes") {
  Value a = Value::Constant(Matrix::Ones(2, 3));
  Value b = Value::Constant(Matrix::Ones(2, 3));
  try {
    MatMul(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    CHECK(what.find("matmul") != std::string::npos);
    CHECK(what.find("2x3") != std::string::npos);
  }
  CHECK_THROWS_AS(Add(a, Value::Constant(Matrix::Ones(3, 2))), ShapeError);
}

TEST_CASE("no-grad guard records no graph") {
  Value w = Value::Parameter(Matrix::Ones(1, 1), "w");
  Value y;
  {
    NoGradGuard guard;
    y = Mul(w, w);
  }
  CHECK_FALSE(y.requires_grad());
  CHECK(Mul(w, w).requires_grad());
}

TEST_CASE("finite differences for every op family") {
  for (const auto& c : testing::OpGradientCases()) {
    SUBCASE(c.name.c_str()) {
      const auto r = c.run();
      INFO("worst entry " << r.worst << " rel err " << r.max_rel_error);
      CHECK(r.checked > 0);
      CHECK(r.max_rel_error < 1e-4);
    }
  }
}

TEST_CASE("block-row-dot matches the per-class bilinear form") {
  Rng rng(16);
  const Matrix x = RandomMatrix(2, 3, rng);
  const Matrix u = RandomMatrix(3, 2 * 3, rng);
  const Matrix y = RandomMatrix(2, 3, rng);
  Value out = BlockRowDot(MatMul(Value::Constant(x), Value::Constant(u)),
                          Value::Constant(y));
  for (int n = 0; n < 2; ++n) {
    for (int k = 0; k < 2; ++k) {
      double expect = 0;
      for (int p = 0; p < 3; ++p) {
        for (int q = 0; q < 3; ++q) expect += x(n, p) * u(p, k * 3 + q) * y(n, q);
      }
      CHECK(out.data()(n, k) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("lstm cell matches the gate equations") {
  Matrix g(1, 4);
  g << 0.1, -0.2, 0.3, 0.4;
  Matrix c(1, 1);
  c << 0.5;
  Value out = LstmCell(Value::Constant(g), Value::Constant(c));
  auto sig = [](double v) { return 1 / (1 + std::exp(-v)); };
  const double c_new = sig(-0.2) * 0.5 + sig(0.1) * std::tanh(0.3);
  CHECK(out.data()(0, 1) == doctest::Approx(c_new).epsilon(1e-14));
  CHECK(out.data()(0, 0) == doctest::Approx(sig(0.4) * std::tanh(c_new)).epsilon(1e-14));
}

}  // namespace
}  // namespace udpx
