// udpx/embeddings.cc

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

#include "udpx/embeddings.h"

#include <sstream>

namespace udpx {

namespace {

bool ParseFloats(std::istringstream& fields, std::vector<Scalar>& out) {
  std::string item;
  while (fields >> item) {
    try {
      size_t used = 0;
      double v = std::stod(item, &used);
      if (used != item.size()) return false;
      out.push_back(static_cast<Scalar>(v));
    } catch (const std::exception&) {
      return false;
    }
  }
  return true;
}

bool IsCountDimHeader(const std::string& line) {
  std::istringstream in(line);
  std::string a, b, extra;
  if (!(in >> a >> b) || (in >> extra)) return false;
  auto digits = [](const std::string& s) {
    return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
  };
  return digits(a) && digits(b);
}

}  // namespace

WordVectors LoadWordVectors(std::istream& in) {
  WordVectors wv;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && IsCountDimHeader(line)) continue;
    std::istringstream fields(line);
    std::string form;
    fields >> form;
    std::vector<Scalar> values;
    if (!ParseFloats(fields, values) || values.empty()) {
      throw FormatError("malformed embedding entry", line_no);
    }
    if (wv.dim == 0) wv.dim = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != wv.dim) {
      throw FormatError("expected " + std::to_string(wv.dim) +
                            " values, found " + std::to_string(values.size()),
                        line_no);
    }
    wv.vectors.try_emplace(form, std::move(values));
  }
  return wv;
}

std::vector<Matrix> LoadContextualVectors(std::istream& in) {
  std::vector<Matrix> blocks;
  std::vector<std::vector<Scalar>> rows;
  std::string line;
  size_t line_no = 0;
  auto flush = [&]() {
    if (rows.empty()) return;
    Matrix m(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows[0].size()));
    for (size_t r = 0; r < rows.size(); ++r) {
      for (size_t c = 0; c < rows[r].size(); ++c) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            rows[r][c];
      }
    }
    blocks.push_back(std::move(m));
    rows.clear();
  };
  int dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      flush();
      continue;
    }
    std::istringstream fields(line);
    std::vector<Scalar> values;
    if (!ParseFloats(fields, values)) {
      throw FormatError("non-numeric contextual vector", line_no);
    }
    if (dim < 0) dim = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != dim) {
      throw FormatError("expected " + std::to_string(dim) + " values, found " +
                            std::to_string(values.size()),
                        line_no);
    }
    rows.push_back(std::move(values));
  }
  flush();
  return blocks;
}

void AttachContextualVectors(std::vector<Matrix> blocks,
                             std::vector<Sentence>& sentences) {
  if (blocks.size() != sentences.size()) {
    throw FormatError("contextual vectors cover " +
                      std::to_string(blocks.size()) + " sentences, corpus has " +
                      std::to_string(sentences.size()));
  }
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].rows() != sentences[i].size()) {
      throw FormatError("contextual vectors for sentence " + std::to_string(i) +
                        " have " + std::to_string(blocks[i].rows()) +
                        " rows, sentence has " +
                        std::to_string(sentences[i].size()) + " tokens");
    }
    sentences[i].lm_vectors = std::move(blocks[i]);
  }
}

}  // namespace udpx
