// udpx/mst.cc

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

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "udpx/parse_head.h"

namespace udpx {

namespace {

constexpr double kNoEdge = -std::numeric_limits<double>::infinity();
// Keeps log() finite so that contracted edge weights never become NaN.
constexpr double kProbFloor = 1e-300;
constexpr double kForbidden = -1e100;

// Highest-scoring head of every non-root node; ties go to the smaller head.
std::vector<int> BestHeads(const Eigen::MatrixXd& w) {
  const int n = static_cast<int>(w.rows());
  std::vector<int> heads(static_cast<size_t>(n), -1);
  for (int d = 1; d < n; ++d) {
    double best = kNoEdge;
    for (int h = 0; h < n; ++h) {
      if (h == d) continue;
      if (heads[d] < 0 || w(h, d) > best) {
        best = w(h, d);
        heads[d] = h;
      }
    }
  }
  return heads;
}

// Nodes of some cycle in the head graph, or empty.
std::vector<int> FindCycle(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  std::vector<int> state(static_cast<size_t>(n), 0);  // 0 new, 1 on path, 2 done
  state[0] = 2;
  for (int start = 1; start < n; ++start) {
    if (state[start]) continue;
    std::vector<int> path;
    int v = start;
    while (state[v] == 0) {
      state[v] = 1;
      path.push_back(v);
      v = heads[v];
    }
    if (state[v] == 1) {
      std::vector<int> cycle;
      int u = v;
      do {
        cycle.push_back(u);
        u = heads[u];
      } while (u != v);
      return cycle;
    }
    for (int p : path) state[p] = 2;
  }
  return {};
}

std::vector<int> Contract(const Eigen::MatrixXd& w) {
  const int n = static_cast<int>(w.rows());
  std::vector<int> heads = BestHeads(w);
  std::vector<int> cycle = FindCycle(heads);
  if (cycle.empty()) return heads;

  std::vector<bool> in_cycle(static_cast<size_t>(n), false);
  for (int v : cycle) in_cycle[v] = true;
  std::vector<int> to_new(static_cast<size_t>(n), -1), to_old;
  for (int v = 0; v < n; ++v) {
    if (in_cycle[v]) continue;
    to_new[v] = static_cast<int>(to_old.size());
    to_old.push_back(v);
  }
  const int c = static_cast<int>(to_old.size());
  const int m = c + 1;

  Eigen::MatrixXd cw = Eigen::MatrixXd::Constant(m, m, kNoEdge);
  std::vector<int> enter_dst(static_cast<size_t>(n), -1);
  std::vector<int> leave_src(static_cast<size_t>(n), -1);
  for (int u = 0; u < n; ++u) {
    for (int v = 1; v < n; ++v) {
      if (u == v) continue;
      if (!in_cycle[u] && !in_cycle[v]) {
        cw(to_new[u], to_new[v]) = w(u, v);
      } else if (!in_cycle[u] && in_cycle[v]) {
        const double score = w(u, v) - w(heads[v], v);
        if (enter_dst[u] < 0 || score > cw(to_new[u], c)) {
          cw(to_new[u], c) = score;
          enter_dst[u] = v;
        }
      } else if (in_cycle[u] && !in_cycle[v]) {
        if (leave_src[v] < 0 || w(u, v) > cw(c, to_new[v])) {
          cw(c, to_new[v]) = w(u, v);
          leave_src[v] = u;
        }
      }
    }
  }

  std::vector<int> sub = Contract(cw);
  for (int v = 1; v < n; ++v) {
    if (in_cycle[v]) continue;
    const int h = sub[to_new[v]];
    heads[v] = h == c ? leave_src[v] : to_old[h];
  }
  const int u = to_old[sub[c]];
  heads[enter_dst[u]] = u;
  return heads;
}

double TreeWeight(const Eigen::MatrixXd& w, const std::vector<int>& heads) {
  double total = 0;
  for (size_t d = 1; d < heads.size(); ++d) total += w(heads[d], d);
  return total;
}

}  // namespace

std::vector<int> ChuLiuEdmonds(const Eigen::MatrixXd& weights) {
  if (weights.rows() != weights.cols() || weights.rows() < 1) {
    throw std::invalid_argument("chu_liu_edmonds: weights must be square");
  }
  if (weights.rows() == 1) return {-1};
  return Contract(weights);
}

ParsedTree MstDecode(const ParseDistribution& dist) {
  const int l = dist.length();
  if (l < 1) throw std::invalid_argument("mst_decode: empty distribution");
  Eigen::MatrixXd w(l + 1, l + 1);
  for (int h = 0; h <= l; ++h) {
    w(h, 0) = kForbidden;
    for (int d = 1; d <= l; ++d) {
      w(h, d) = h == d ? kForbidden
                       : std::log(std::max<double>(dist.arc(d, h), kProbFloor));
    }
  }
  std::vector<int> heads = ChuLiuEdmonds(w);
  int root_children = 0;
  for (int d = 1; d <= l; ++d) root_children += heads[d] == 0;
  if (root_children != 1) {
    double best = kNoEdge;
    std::vector<int> best_heads;
    for (int r = 1; r <= l; ++r) {
      Eigen::MatrixXd wr = w;
      for (int d = 1; d <= l; ++d) {
        if (d != r) wr(0, d) = kForbidden;
      }
      std::vector<int> candidate = ChuLiuEdmonds(wr);
      const double score = TreeWeight(w, candidate);
      if (best_heads.empty() || score > best) {
        best = score;
        best_heads = std::move(candidate);
      }
    }
    heads = std::move(best_heads);
  }

  ParsedTree tree;
  tree.heads.assign(heads.begin() + 1, heads.end());
  for (int d = 1; d <= l; ++d) {
    int arg = 0;
    for (int k = 1; k < dist.num_labels(); ++k) {
      if (dist.label(d, heads[d], k) > dist.label(d, heads[d], arg)) arg = k;
    }
    tree.labels.push_back(arg);
  }
  return tree;
}

double ArcLogProb(const ParseDistribution& dist, std::span<const int> heads) {
  const int l = dist.length();
  if (static_cast<int>(heads.size()) != l) {
    throw std::invalid_argument("arc_log_prob: tree length " +
                                std::to_string(heads.size()) +
                                " != distribution length " + std::to_string(l));
  }
  double total = 0;
  for (int i = 1; i <= l; ++i) {
    const int h = heads[i - 1];
    if (h < 0 || h > l) throw std::invalid_argument("arc_log_prob: bad head");
    total += std::log(static_cast<double>(dist.arc(i, h)));
  }
  return total;
}

double SentenceLogProb(const ParseDistribution& dist, const ParsedTree& tree) {
  const int l = dist.length();
  if (static_cast<int>(tree.labels.size()) != l) {
    throw std::invalid_argument("sentence_prob: label count does not match");
  }
  double total = ArcLogProb(dist, tree.heads);
  for (int i = 1; i <= l; ++i) {
    const int k = tree.labels[i - 1];
    if (k < 0 || k >= dist.num_labels()) {
      throw std::invalid_argument("sentence_prob: label class out of range");
    }
    total += std::log(static_cast<double>(dist.label(i, tree.heads[i - 1], k)));
  }
  return total;
}

}  // namespace udpx
