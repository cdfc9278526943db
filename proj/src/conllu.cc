// udpx/conllu.cc

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

#include "udpx/conllu.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace udpx {

namespace {

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::optional<int> ParseInt(const std::string& s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

bool IsUpperTag(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isupper(c) || c == '_';
  });
}

void FinishBlock(std::vector<Token>& tokens,
                 const std::vector<size_t>& token_lines, size_t block_line,
                 Treebank& tb) {
  if (tokens.empty()) return;
  const int n = static_cast<int>(tokens.size());
  size_t headed = 0;
  for (int i = 0; i < n; ++i) {
    const Token& t = tokens[i];
    if (!t.head) continue;
    ++headed;
    if (*t.head < 0 || *t.head > n) {
      throw FormatError("HEAD " + std::to_string(*t.head) +
                            " out of range for sentence of length " +
                            std::to_string(n),
                        token_lines[i]);
    }
    if (*t.head == i + 1) {
      throw FormatError("token is its own head", token_lines[i]);
    }
  }
  if (headed != 0 && headed != tokens.size()) {
    throw FormatError("sentence is partially headed", block_line);
  }
  Sentence s;
  s.tokens = std::move(tokens);
  if (headed != 0 && !IsTree(s.heads())) {
    throw FormatError("heads do not form a tree rooted at 0", block_line);
  }
  tb.sentences.push_back(std::move(s));
  tokens.clear();
}

}  // namespace

bool Sentence::has_heads() const {
  return !tokens.empty() &&
         std::all_of(tokens.begin(), tokens.end(),
                     [](const Token& t) { return t.head.has_value(); });
}

bool Sentence::fully_annotated() const {
  return has_heads() &&
         std::all_of(tokens.begin(), tokens.end(),
                     [](const Token& t) { return t.deprel.has_value(); });
}

std::vector<int> Sentence::heads() const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.head.value_or(-1));
  return out;
}

bool IsTree(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  for (int i = 0; i < n; ++i) {
    if (heads[i] < 0 || heads[i] > n || heads[i] == i + 1) return false;
  }
  // 0 = unvisited, 1 = on the current path, 2 = known to reach ROOT.
  std::vector<char> state(n + 1, 0);
  state[0] = 2;
  for (int start = 1; start <= n; ++start) {
    std::vector<int> path;
    int v = start;
    while (state[v] == 0) {
      state[v] = 1;
      path.push_back(v);
      v = heads[v - 1];
    }
    if (state[v] == 1) return false;
    for (int u : path) state[u] = 2;
  }
  return true;
}

Treebank ParseConllu(std::istream& in, const ReadOptions& options) {
  Treebank tb;
  std::vector<Token> tokens;
  std::vector<size_t> token_lines;
  size_t block_line = 0;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      FinishBlock(tokens, token_lines, block_line, tb);
      token_lines.clear();
      continue;
    }
    if (line[0] == '#') continue;
    if (!IsValidUtf8(line)) throw FormatError("invalid UTF-8", line_no);
    std::vector<std::string> fields = SplitTabs(line);
    if (fields.size() != 10) {
      throw FormatError("expected 10 tab-separated columns, found " +
                            std::to_string(fields.size()),
                        line_no);
    }
    const std::string& id = fields[0];
    // Multiword ranges ("3-4") and empty nodes ("3.1") carry no head.
    if (id.find('-') != std::string::npos ||
        id.find('.') != std::string::npos) {
      continue;
    }
    std::optional<int> id_value = ParseInt(id);
    if (!id_value || *id_value != static_cast<int>(tokens.size()) + 1) {
      throw FormatError("unexpected ID '" + id + "'", line_no);
    }
    if (tokens.empty()) block_line = line_no;
    Token t;
    t.form = fields[1];
    t.upos = fields[3] == "_" ? "" : fields[3];
    if (fields[6] != "_") {
      t.head = ParseInt(fields[6]);
      if (!t.head) {
        throw FormatError("non-integer HEAD '" + fields[6] + "'", line_no);
      }
    }
    if (fields[7] != "_") t.deprel = fields[7];
    t.is_punct = options.punct_tags.count(t.upos) != 0;
    tokens.push_back(std::move(t));
    token_lines.push_back(line_no);
  }
  FinishBlock(tokens, token_lines, block_line, tb);
  return tb;
}

Treebank ParseConlluString(const std::string& text,
                           const ReadOptions& options) {
  std::istringstream in(text);
  return ParseConllu(in, options);
}

void SerializeConllu(const Treebank& tb, std::ostream& out) {
  for (size_t s = 0; s < tb.sentences.size(); ++s) {
    const Sentence& sentence = tb.sentences[s];
    if (!sentence.has_heads()) {
      throw FormatError("sentence " + std::to_string(s) +
                        " has no heads and cannot be written as CoNLL-U");
    }
    for (size_t i = 0; i < sentence.tokens.size(); ++i) {
      const Token& t = sentence.tokens[i];
      out << (i + 1) << '\t' << t.form << "\t_\t"
          << (t.upos.empty() ? "_" : t.upos) << "\t_\t_\t" << *t.head << '\t'
          << t.deprel.value_or("_") << "\t_\t_\n";
    }
    out << '\n';
  }
}

std::string SerializeConlluString(const Treebank& tb) {
  std::ostringstream out;
  SerializeConllu(tb, out);
  return out.str();
}

std::vector<Sentence> LoadUnlabeled(std::istream& in, size_t min_words,
                                    const ReadOptions& options) {
  std::vector<Sentence> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!IsValidUtf8(line)) throw FormatError("invalid UTF-8", line_no);
    std::istringstream words(line);
    Sentence s;
    std::string word;
    while (words >> word) {
      Token t;
      size_t slash = word.rfind('/');
      if (slash != std::string::npos && slash > 0 &&
          IsUpperTag(word.substr(slash + 1))) {
        t.form = word.substr(0, slash);
        t.upos = word.substr(slash + 1);
      } else {
        t.form = word;
      }
      t.is_punct = options.punct_tags.count(t.upos) != 0;
      s.tokens.push_back(std::move(t));
    }
    if (s.tokens.size() > min_words) out.push_back(std::move(s));
  }
  return out;
}

Sentence Unannotated(const Sentence& s) {
  Sentence out = s;
  for (Token& t : out.tokens) {
    t.head.reset();
    t.deprel.reset();
  }
  return out;
}

bool IsValidUtf8(const std::string& s) {
  size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    size_t extra;
    uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (size_t k = 1; k <= extra; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong encodings, surrogates and out-of-range code points.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
        (extra == 3 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

std::vector<std::string> Utf8Chars(const std::string& s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    size_t len = c < 0x80 ? 1 : (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3
                                                                           : 4;
    len = std::min(len, s.size() - i);
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

}  // namespace udpx
