// udpx/parse_head.cc

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

#include "udpx/parse_head.h"

#include <cmath>
#include <stdexcept>

namespace udpx {

ParseDistribution::ParseDistribution(Matrix arc, Matrix label)
    : arc_(std::move(arc)), label_(std::move(label)) {
  if (arc_.cols() != arc_.rows() + 1 ||
      label_.rows() != arc_.rows() * arc_.cols()) {
    throw ShapeError("parse distribution: inconsistent arc/label shapes");
  }
}

bool ParseDistribution::IsNormalized(double tol) const {
  for (Eigen::Index r = 0; r < arc_.rows(); ++r) {
    if (std::abs(static_cast<double>(arc_.row(r).sum()) - 1) > tol) return false;
  }
  for (Eigen::Index r = 0; r < label_.rows(); ++r) {
    if (std::abs(static_cast<double>(label_.row(r).sum()) - 1) > tol) return false;
  }
  return true;
}

ParseHead::ParseHead(const ModelConfig& config, int num_labels,
                     ParameterStore& store, Rng& rng)
    : config_(config), num_labels_(num_labels) {
  if (num_labels < 1) throw std::invalid_argument("label set is empty");
  const int enc = config.encoder_dim();
  arc_head_mlp_ = Linear(store, "parser.arc_head_mlp", enc, config.arc_mlp, rng);
  arc_dep_mlp_ = Linear(store, "parser.arc_dep_mlp", enc, config.arc_mlp, rng);
  label_head_mlp_ =
      Linear(store, "parser.label_head_mlp", enc, config.label_mlp, rng);
  label_dep_mlp_ =
      Linear(store, "parser.label_dep_mlp", enc, config.label_mlp, rng);
  arc_u1_ = store.Add("parser.arc_u1", Matrix::Zero(config.arc_mlp, config.arc_mlp));
  arc_u2_ = store.Add("parser.arc_u2", Matrix::Zero(config.arc_mlp, 1));
  arc_u3_ = store.Add("parser.arc_u3", Matrix::Zero(config.arc_mlp, 1));
  arc_b_ = store.Add("parser.arc_b", Matrix::Zero(1, 1));
  label_u_ = store.Add("parser.label_u",
                       Matrix::Zero(config.label_mlp, num_labels * config.label_mlp));
  label_w_ = store.Add("parser.label_w",
                       GlorotUniform(2 * config.label_mlp, num_labels, rng));
  label_b_ = store.Add("parser.label_b", Matrix::Zero(1, num_labels));
}

HeadRepresentations ParseHead::Project(const Value& encoded,
                                       const ForwardContext& ctx) const {
  const auto rate = static_cast<Scalar>(config_.mlp_dropout);
  auto mlp = [&](const Linear& layer) {
    Value in = ctx.training ? Dropout(encoded, rate, *ctx.rng, true) : encoded;
    Value out = Relu(layer(in));
    return ctx.training ? Dropout(out, rate, *ctx.rng, true) : out;
  };
  HeadRepresentations reps;
  reps.arc_head = mlp(arc_head_mlp_);
  reps.arc_dep = mlp(arc_dep_mlp_);
  reps.label_head = mlp(label_head_mlp_);
  reps.label_dep = mlp(label_dep_mlp_);
  return reps;
}

Value ParseHead::ScoreArcs(const HeadRepresentations& reps) const {
  const int l = reps.length();
  if (l < 1) throw std::invalid_argument("score_arcs: sentence has no tokens");
  // (l+1) x (l+1) with rows = heads, then transposed to rows = dependents.
  Value bilinear =
      MatMul(MatMul(reps.arc_head, arc_u1_), Transpose(reps.arc_dep));
  Value head_term = MatMul(reps.arc_head, arc_u2_);  // (l+1) x 1
  Value dep_term = Transpose(MatMul(reps.arc_dep, arc_u3_));  // 1 x (l+1)
  Value by_head = Add(Add(bilinear, head_term), dep_term);
  Value scores = Add(Transpose(by_head), arc_b_);
  Matrix mask = Matrix::Zero(l, l + 1);
  for (int i = 1; i <= l; ++i) mask(i - 1, i) = kMaskedScore;
  return Add(SliceRows(scores, 1, l), Value::Constant(std::move(mask)));
}

Value ParseHead::ScoreLabelPairs(const HeadRepresentations& reps,
                                 std::span<const int> dependents,
                                 std::span<const int> heads) const {
  if (dependents.size() != heads.size()) {
    throw std::invalid_argument("score_labels: dependent/head count mismatch");
  }
  const int l = reps.length();
  for (int h : heads) {
    if (h < 0 || h > l) {
      throw std::out_of_range("score_labels: head index " + std::to_string(h) +
                              " out of range for length " + std::to_string(l));
    }
  }
  Value dep = Gather(reps.label_dep, dependents);
  Value head = Gather(reps.label_head, heads);
  Value bilinear = BlockRowDot(MatMul(dep, label_u_), head);
  std::vector<Value> both = {dep, head};
  Value linear = MatMul(ConcatCols(both), label_w_);
  return Add(Add(bilinear, linear), label_b_);
}

Value ParseHead::ScoreLabels(const HeadRepresentations& reps,
                             std::span<const int> heads) const {
  std::vector<int> dependents(heads.size());
  for (size_t i = 0; i < heads.size(); ++i) dependents[i] = static_cast<int>(i) + 1;
  return ScoreLabelPairs(reps, dependents, heads);
}

ParseDistribution ParseHead::Distribution(const HeadRepresentations& reps) const {
  const int l = reps.length();
  Matrix arc = SoftmaxRows(ScoreArcs(reps)).data();
  std::vector<int> dependents, heads;
  dependents.reserve(static_cast<size_t>(l * (l + 1)));
  heads.reserve(dependents.capacity());
  for (int i = 1; i <= l; ++i) {
    for (int j = 0; j <= l; ++j) {
      dependents.push_back(i);
      heads.push_back(j);
    }
  }
  Matrix label = SoftmaxRows(ScoreLabelPairs(reps, dependents, heads)).data();
  return ParseDistribution(std::move(arc), std::move(label));
}

Value ParseNll(const Value& arc_scores, const Value& label_scores,
               const ParsedTree& gold) {
  const int l = static_cast<int>(gold.heads.size());
  if (arc_scores.rows() != l || label_scores.rows() != l ||
      static_cast<int>(gold.labels.size()) != l) {
    throw ShapeError("parse_nll: scores do not match the gold tree length");
  }
  std::vector<std::pair<int, int>> arcs, labels;
  for (int i = 0; i < l; ++i) {
    arcs.emplace_back(i, gold.heads[i]);
    labels.emplace_back(i, gold.labels[i]);
  }
  Value arc_ll = PickSum(LogSoftmaxRows(arc_scores), arcs);
  Value label_ll = PickSum(LogSoftmaxRows(label_scores), labels);
  return Scale(Add(arc_ll, label_ll), -1);
}

}  // namespace udpx
