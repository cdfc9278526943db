// udpx/evaluator.h

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

// Attachment scores, the right-arc baseline and paired bootstrap testing.

#ifndef UDPX_EVALUATOR_H_
#define UDPX_EVALUATOR_H_

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "udpx/autodiff.h"
#include "udpx/conllu.h"

namespace udpx {

class AlignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Token counts for one sentence or a whole treebank.
struct SentenceScore {
  size_t counted = 0;
  size_t excluded = 0;
  size_t correct_heads = 0;
  size_t correct_labeled = 0;  // head and relation both correct

  SentenceScore& operator+=(const SentenceScore& o);
};

struct AttachmentScore {
  double uas = 0;
  double las = 0;
  size_t counted_tokens = 0;
  size_t excluded_tokens = 0;

  static AttachmentScore From(const SentenceScore& totals);
  nlohmann::json ToJson() const;
};

// Throws AlignmentError naming the sentence index when token counts differ
// or a gold token has no head. Predicted tokens without a head are wrong.
// With `exclude_punct`, gold punctuation tokens leave both the numerator and
// the denominator.
std::vector<SentenceScore> ScoreSentences(const Treebank& pred,
                                          const Treebank& gold,
                                          bool exclude_punct);
AttachmentScore UasLas(const Treebank& pred, const Treebank& gold,
                       bool exclude_punct);

inline constexpr char kBaselineLabel[] = "dep";

// Every word attaches to the word before it; the first word to ROOT.
Treebank RightArcBaseline(const Treebank& sentences);

struct Significance {
  double p_uas = 0;
  double p_las = 0;
  nlohmann::json ToJson() const;
};

// For each trial draws `sample_size` sentences without replacement and
// compares sub-test scores; p is the fraction of trials where a <= b.
// Throws std::invalid_argument if the systems differ in size or the test
// set is smaller than `sample_size`.
Significance BootstrapSignificance(std::span<const SentenceScore> a,
                                   std::span<const SentenceScore> b, Rng& rng,
                                   size_t sample_size = 50, int trials = 1000);

}  // namespace udpx

#endif  // UDPX_EVALUATOR_H_
