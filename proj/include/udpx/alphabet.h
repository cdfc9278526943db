// udpx/alphabet.h

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

#ifndef UDPX_ALPHABET_H_
#define UDPX_ALPHABET_H_

#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "udpx/conllu.h"

namespace udpx {

// Symbol <-> dense index map. Indices 0..3 are reserved in every alphabet.
class Alphabet {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kMask = 2;
  static constexpr int kRoot = 3;
  static constexpr int kReserved = 4;

  Alphabet();
  explicit Alphabet(const std::vector<std::string>& symbols);

  // Returns the existing index when already present.
  int Add(const std::string& symbol);
  // kUnk when absent.
  int Lookup(const std::string& symbol) const;
  bool Contains(const std::string& symbol) const;
  const std::string& Symbol(int index) const;

  // Total including reserved entries.
  int size() const { return static_cast<int>(symbols_.size()); }
  int num_symbols() const { return size() - kReserved; }
  std::vector<std::string> symbols() const;

  bool operator==(const Alphabet& other) const {
    return symbols_ == other.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

struct Alphabets {
  Alphabet words;
  Alphabet chars;
  Alphabet pos;
  // Dependency labels; class k of the label scorer is index kReserved + k.
  Alphabet labels;

  // Case-preserving lookup with a lowercase fallback before UNK.
  int WordIndex(const std::string& form) const;
  int PosIndex(const std::string& upos) const;
  std::vector<int> CharIndices(const std::string& form) const;
  int num_labels() const { return labels.num_symbols(); }
  // Class index of a label, or -1 when unknown.
  int LabelClass(const std::string& deprel) const;
  const std::string& LabelName(int label_class) const;

  bool operator==(const Alphabets& other) const = default;

  nlohmann::json ToJson() const;
  static Alphabets FromJson(const nlohmann::json& j);
};

inline constexpr size_t kDefaultMaxVocab = 100000;

// Words: the max_vocab most frequent forms over labeled + unlabeled, ties
// broken by first occurrence. Chars and POS: everything seen. Labels: exactly
// the deprels of `labeled`, in first-occurrence order.
Alphabets BuildAlphabets(const Treebank& labeled,
                         const std::vector<Sentence>& unlabeled,
                         size_t max_vocab = kDefaultMaxVocab);

std::string AsciiLower(const std::string& s);

}  // namespace udpx

#endif  // UDPX_ALPHABET_H_
