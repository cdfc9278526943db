// udpx/alphabet.cc

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

#include "udpx/alphabet.h"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace udpx {

namespace {
const char* const kReservedNames[Alphabet::kReserved] = {"<pad>", "<unk>",
                                                         "<mask>", "<root>"};
}

Alphabet::Alphabet() {
  for (int i = 0; i < kReserved; ++i) {
    symbols_.emplace_back(kReservedNames[i]);
    index_.emplace(kReservedNames[i], i);
  }
}

Alphabet::Alphabet(const std::vector<std::string>& symbols) : Alphabet() {
  for (const std::string& s : symbols) Add(s);
}

int Alphabet::Add(const std::string& symbol) {
  auto it = index_.find(symbol);
  if (it != index_.end()) return it->second;
  int id = size();
  symbols_.push_back(symbol);
  index_.emplace(symbol, id);
  return id;
}

int Alphabet::Lookup(const std::string& symbol) const {
  auto it = index_.find(symbol);
  return it == index_.end() ? kUnk : it->second;
}

bool Alphabet::Contains(const std::string& symbol) const {
  return index_.count(symbol) != 0;
}

const std::string& Alphabet::Symbol(int index) const {
  return symbols_.at(static_cast<size_t>(index));
}

std::vector<std::string> Alphabet::symbols() const {
  return {symbols_.begin() + kReserved, symbols_.end()};
}

std::string AsciiLower(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

int Alphabets::WordIndex(const std::string& form) const {
  int id = words.Lookup(form);
  if (id != Alphabet::kUnk) return id;
  return words.Lookup(AsciiLower(form));
}

int Alphabets::PosIndex(const std::string& upos) const {
  return upos.empty() ? Alphabet::kUnk : pos.Lookup(upos);
}

std::vector<int> Alphabets::CharIndices(const std::string& form) const {
  std::vector<int> out;
  for (const std::string& c : Utf8Chars(form)) out.push_back(chars.Lookup(c));
  return out;
}

int Alphabets::LabelClass(const std::string& deprel) const {
  if (!labels.Contains(deprel)) return -1;
  int id = labels.Lookup(deprel);
  return id < Alphabet::kReserved ? -1 : id - Alphabet::kReserved;
}

const std::string& Alphabets::LabelName(int label_class) const {
  return labels.Symbol(label_class + Alphabet::kReserved);
}

nlohmann::json Alphabets::ToJson() const {
  return {{"words", words.symbols()},
          {"chars", chars.symbols()},
          {"pos", pos.symbols()},
          {"labels", labels.symbols()}};
}

Alphabets Alphabets::FromJson(const nlohmann::json& j) {
  Alphabets a;
  a.words = Alphabet(j.at("words").get<std::vector<std::string>>());
  a.chars = Alphabet(j.at("chars").get<std::vector<std::string>>());
  a.pos = Alphabet(j.at("pos").get<std::vector<std::string>>());
  a.labels = Alphabet(j.at("labels").get<std::vector<std::string>>());
  return a;
}

Alphabets BuildAlphabets(const Treebank& labeled,
                         const std::vector<Sentence>& unlabeled,
                         size_t max_vocab) {
  if (labeled.empty()) {
    throw std::invalid_argument("cannot build alphabets from an empty treebank");
  }
  Alphabets a;
  // form -> (count, first occurrence)
  std::unordered_map<std::string, std::pair<size_t, size_t>> counts;
  std::vector<std::string> order;
  auto visit = [&](const Sentence& s) {
    for (const Token& t : s.tokens) {
      auto [it, fresh] = counts.try_emplace(t.form, 0, order.size());
      if (fresh) order.push_back(t.form);
      ++it->second.first;
      for (const std::string& c : Utf8Chars(t.form)) a.chars.Add(c);
      if (!t.upos.empty()) a.pos.Add(t.upos);
    }
  };
  for (const Sentence& s : labeled.sentences) {
    visit(s);
    for (const Token& t : s.tokens) {
      if (t.deprel) a.labels.Add(*t.deprel);
    }
  }
  for (const Sentence& s : unlabeled) visit(s);

  std::stable_sort(order.begin(), order.end(),
                   [&](const std::string& x, const std::string& y) {
                     return counts[x].first > counts[y].first;
                   });
  if (order.size() > max_vocab) order.resize(max_vocab);
  for (const std::string& w : order) a.words.Add(w);
  return a;
}

}  // namespace udpx
