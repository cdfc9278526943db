// udpx/evaluator.cc

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

#include "udpx/evaluator.h"

#include <numeric>

namespace udpx {

SentenceScore& SentenceScore::operator+=(const SentenceScore& o) {
  counted += o.counted;
  excluded += o.excluded;
  correct_heads += o.correct_heads;
  correct_labeled += o.correct_labeled;
  return *this;
}

AttachmentScore AttachmentScore::From(const SentenceScore& totals) {
  AttachmentScore s;
  s.counted_tokens = totals.counted;
  s.excluded_tokens = totals.excluded;
  if (totals.counted > 0) {
    s.uas = static_cast<double>(totals.correct_heads) /
            static_cast<double>(totals.counted);
    s.las = static_cast<double>(totals.correct_labeled) /
            static_cast<double>(totals.counted);
  }
  return s;
}

nlohmann::json AttachmentScore::ToJson() const {
  return {{"uas", uas},
          {"las", las},
          {"counted_tokens", counted_tokens},
          {"excluded_tokens", excluded_tokens}};
}

std::vector<SentenceScore> ScoreSentences(const Treebank& pred,
                                          const Treebank& gold,
                                          bool exclude_punct) {
  if (pred.sentences.size() != gold.sentences.size()) {
    throw AlignmentError("prediction has " +
                         std::to_string(pred.sentences.size()) +
                         " sentences, gold has " +
                         std::to_string(gold.sentences.size()));
  }
  std::vector<SentenceScore> scores;
  scores.reserve(gold.sentences.size());
  for (size_t s = 0; s < gold.sentences.size(); ++s) {
    const Sentence& p = pred.sentences[s];
    const Sentence& g = gold.sentences[s];
    if (p.size() != g.size()) {
      throw AlignmentError("sentence " + std::to_string(s + 1) + ": prediction has " +
                           std::to_string(p.size()) + " tokens, gold has " +
                           std::to_string(g.size()));
    }
    SentenceScore score;
    for (size_t i = 0; i < g.tokens.size(); ++i) {
      const Token& gt = g.tokens[i];
      const Token& pt = p.tokens[i];
      if (!gt.head) {
        throw AlignmentError("sentence " + std::to_string(s + 1) + ": gold token " +
                             std::to_string(i + 1) + " has no head");
      }
      if (exclude_punct && gt.is_punct) {
        ++score.excluded;
        continue;
      }
      ++score.counted;
      if (pt.head && *pt.head == *gt.head) {
        ++score.correct_heads;
        if (pt.deprel && gt.deprel && *pt.deprel == *gt.deprel) {
          ++score.correct_labeled;
        }
      }
    }
    scores.push_back(score);
  }
  return scores;
}

AttachmentScore UasLas(const Treebank& pred, const Treebank& gold,
                       bool exclude_punct) {
  SentenceScore totals;
  for (const SentenceScore& s : ScoreSentences(pred, gold, exclude_punct)) {
    totals += s;
  }
  return AttachmentScore::From(totals);
}

Treebank RightArcBaseline(const Treebank& sentences) {
  Treebank out = sentences;
  for (Sentence& s : out.sentences) {
    for (size_t i = 0; i < s.tokens.size(); ++i) {
      s.tokens[i].head = static_cast<int>(i);
      s.tokens[i].deprel = kBaselineLabel;
    }
  }
  return out;
}

nlohmann::json Significance::ToJson() const {
  return {{"p_uas", p_uas}, {"p_las", p_las}};
}

Significance BootstrapSignificance(std::span<const SentenceScore> a,
                                   std::span<const SentenceScore> b, Rng& rng,
                                   size_t sample_size, int trials) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("bootstrap: systems scored on different test sets");
  }
  if (a.size() < sample_size || sample_size == 0) {
    throw std::invalid_argument("bootstrap: test set has " +
                                std::to_string(a.size()) +
                                " sentences, need at least " +
                                std::to_string(sample_size));
  }
  if (trials < 1) throw std::invalid_argument("bootstrap: trials must be positive");
  auto ratio = [](size_t num, size_t den) {
    return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
  };
  std::vector<size_t> index(a.size());
  std::iota(index.begin(), index.end(), 0);
  int uas_not_better = 0, las_not_better = 0;
  for (int t = 0; t < trials; ++t) {
    for (size_t k = 0; k < sample_size; ++k) {
      std::uniform_int_distribution<size_t> pick(k, index.size() - 1);
      std::swap(index[k], index[pick(rng)]);
    }
    SentenceScore sa, sb;
    for (size_t k = 0; k < sample_size; ++k) {
      sa += a[index[k]];
      sb += b[index[k]];
    }
    uas_not_better += ratio(sa.correct_heads, sa.counted) <=
                      ratio(sb.correct_heads, sb.counted);
    las_not_better += ratio(sa.correct_labeled, sa.counted) <=
                      ratio(sb.correct_labeled, sb.counted);
  }
  return {static_cast<double>(uas_not_better) / trials,
          static_cast<double>(las_not_better) / trials};
}

}  // namespace udpx
