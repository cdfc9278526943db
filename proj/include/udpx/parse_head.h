// udpx/parse_head.h

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

// Biaffine arc and label scoring on top of the encoder, the parsing
// likelihood, and maximum-spanning-tree decoding.
//
// Shapes: for a sentence of l tokens the encoder yields l+1 rows (row 0 is
// ROOT). Arc scores are l x (l+1): row i-1 scores every candidate head of
// token i, column j = 0 is ROOT. Self-arcs carry kMaskedScore.

#ifndef UDPX_PARSE_HEAD_H_
#define UDPX_PARSE_HEAD_H_

#include <span>
#include <vector>

#include "udpx/config.h"
#include "udpx/layers.h"

namespace udpx {

// Added to self-arc scores; exp() of it underflows to exactly 0.
inline constexpr Scalar kMaskedScore = static_cast<Scalar>(-1e9);

// Per-sentence arc and label distributions.
class ParseDistribution {
 public:
  ParseDistribution() = default;
  // arc: l x (l+1); label: l*(l+1) x K with row (i-1)*(l+1)+j for arc j->i.
  ParseDistribution(Matrix arc, Matrix label);

  int length() const { return static_cast<int>(arc_.rows()); }
  int num_labels() const { return static_cast<int>(label_.cols()); }
  // Probability that token i (1-based) has head j (0 = ROOT).
  Scalar arc(int i, int j) const { return arc_(i - 1, j); }
  Scalar label(int i, int j, int k) const { return label_(Row(i, j), k); }
  const Matrix& arc_matrix() const { return arc_; }
  const Matrix& label_matrix() const { return label_; }
  Matrix& mutable_arc_matrix() { return arc_; }
  Matrix& mutable_label_matrix() { return label_; }

  // Rows of both tensors sum to 1 within `tol`.
  bool IsNormalized(double tol = 1e-6) const;

 private:
  int Row(int i, int j) const { return (i - 1) * (length() + 1) + j; }
  Matrix arc_;
  Matrix label_;
};

// Heads (entry i-1 = head of token i) and label classes of a tree.
struct ParsedTree {
  std::vector<int> heads;
  std::vector<int> labels;
};

// MLP projections of the encoder output, each (l+1) x dim.
struct HeadRepresentations {
  Value arc_head;
  Value arc_dep;
  Value label_head;
  Value label_dep;
  int length() const { return static_cast<int>(arc_head.rows()) - 1; }
};

class ParseHead {
 public:
  ParseHead(const ModelConfig& config, int num_labels, ParameterStore& store,
            Rng& rng);

  HeadRepresentations Project(const Value& encoded,
                              const ForwardContext& ctx) const;

  // S[i][j] = r_j^head U1 r_i^dep + u2.r_j^head + u3.r_i^dep + b over
  // dependents i in 1..l, self-arcs masked. l x (l+1).
  Value ScoreArcs(const HeadRepresentations& reps) const;

  // One row of label scores per (dependent, head) pair: U_k bilinear term,
  // a linear term over [r_dep; r_head] and a per-label bias.
  Value ScoreLabelPairs(const HeadRepresentations& reps,
                        std::span<const int> dependents,
                        std::span<const int> heads) const;
  // Label scores for tokens 1..l attached to heads[i-1]. l x K.
  Value ScoreLabels(const HeadRepresentations& reps,
                    std::span<const int> heads) const;

  // Inference-time distribution over every head candidate and label.
  ParseDistribution Distribution(const HeadRepresentations& reps) const;

  int num_labels() const { return num_labels_; }
  const Linear& arc_head_mlp() const { return arc_head_mlp_; }
  const Linear& arc_dep_mlp() const { return arc_dep_mlp_; }
  const Linear& label_head_mlp() const { return label_head_mlp_; }
  const Linear& label_dep_mlp() const { return label_dep_mlp_; }
  const Value& arc_bilinear() const { return arc_u1_; }
  const Value& arc_head_bias() const { return arc_u2_; }
  const Value& arc_dep_bias() const { return arc_u3_; }
  const Value& arc_bias() const { return arc_b_; }
  // label_mlp x K*label_mlp: block k is U_k, dependent features on rows.
  const Value& label_bilinear() const { return label_u_; }
  const Value& label_linear() const { return label_w_; }
  const Value& label_bias() const { return label_b_; }

 private:
  ModelConfig config_;
  int num_labels_;
  Linear arc_head_mlp_;
  Linear arc_dep_mlp_;
  Linear label_head_mlp_;
  Linear label_dep_mlp_;
  Value arc_u1_;
  Value arc_u2_;
  Value arc_u3_;
  Value arc_b_;
  Value label_u_;
  Value label_w_;
  Value label_b_;
};

// Negative log-likelihood of a tree: sum over dependents of the arc NLL plus
// the label NLL conditioned on the gold head. `label_scores` must have been
// computed for `gold.heads`.
Value ParseNll(const Value& arc_scores, const Value& label_scores,
               const ParsedTree& gold);

// Maximum arborescence under log p^arc with exactly one child of ROOT;
// labels are the argmax on each chosen arc. Always a valid tree.
ParsedTree MstDecode(const ParseDistribution& dist);

// Chu-Liu-Edmonds on a dense (n+1) x (n+1) weight matrix w(head, dep) rooted
// at node 0. Returns heads[d] for d = 1..n (heads[0] = -1). Ties go to the
// smaller head index.
std::vector<int> ChuLiuEdmonds(const Eigen::MatrixXd& weights);

// The MST objective: sum over tokens of log p^arc(i, heads[i-1]), summed in
// token order.
double ArcLogProb(const ParseDistribution& dist, std::span<const int> heads);

// Sum over tokens of log p^arc + log p^label. Throws std::invalid_argument
// for a tree that does not match the distribution.
double SentenceLogProb(const ParseDistribution& dist, const ParsedTree& tree);

}  // namespace udpx

#endif  // UDPX_PARSE_HEAD_H_
