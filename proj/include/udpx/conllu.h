// udpx/conllu.h

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

// Sentences, treebanks and the two text formats they come from: CoNLL-U
// for annotated data and one-sentence-per-line text for unlabeled data.

#ifndef UDPX_CONLLU_H_
#define UDPX_CONLLU_H_

#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "udpx/autodiff.h"

namespace udpx {

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  explicit FormatError(const std::string& what)
      : std::runtime_error(what), line_(0) {}
  // 1-based; 0 when the problem is not tied to one line.
  size_t line() const { return line_; }

 private:
  size_t line_;
};

struct Token {
  std::string form;
  // Empty when the source carried no tag.
  std::string upos;
  // 0 is ROOT, otherwise the 1-based index of the head token.
  std::optional<int> head;
  std::optional<std::string> deprel;
  bool is_punct = false;
};

// Position 0 is a virtual ROOT and is not stored in `tokens`.
struct Sentence {
  std::vector<Token> tokens;
  // Optional precomputed contextual vectors, one row per token.
  Matrix lm_vectors;

  int size() const { return static_cast<int>(tokens.size()); }
  bool has_heads() const;
  bool fully_annotated() const;
  // Heads as a 0-based vector (entry i is the head of token i+1).
  std::vector<int> heads() const;
};

enum class Split { kTrain, kDev, kTest };

struct Treebank {
  std::vector<Sentence> sentences;
  Split split = Split::kTrain;

  size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
};

struct ReadOptions {
  // UPOS values flagged as punctuation.
  std::set<std::string> punct_tags = {"PUNCT"};
};

// True iff `heads` (entry i = head of token i+1, 0 = ROOT) describe an
// arborescence rooted at 0: every head in range, no self-loops, no cycles.
bool IsTree(const std::vector<int>& heads);

Treebank ParseConllu(std::istream& in, const ReadOptions& options = {});
Treebank ParseConlluString(const std::string& text,
                           const ReadOptions& options = {});

// Writes one block per sentence with ID/FORM/UPOS/HEAD/DEPREL filled and
// every other column "_". Throws FormatError on an unheaded sentence.
void SerializeConllu(const Treebank& tb, std::ostream& out);
std::string SerializeConlluString(const Treebank& tb);

// Keeps lines with strictly more than `min_words` whitespace-separated
// tokens. A token "form/TAG" with an all-uppercase TAG carries its UPOS.
std::vector<Sentence> LoadUnlabeled(std::istream& in, size_t min_words = 10,
                                    const ReadOptions& options = {});

// Strips heads and labels.
Sentence Unannotated(const Sentence& s);

bool IsValidUtf8(const std::string& s);
// Code points of a UTF-8 string, each as its own byte string.
std::vector<std::string> Utf8Chars(const std::string& s);

}  // namespace udpx

#endif  // UDPX_CONLLU_H_
