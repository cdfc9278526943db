// udpx/embeddings.h

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

// Readers for externally produced vectors: static word embeddings in the
// usual "form v1 ... vd" text layout, and per-token contextual vectors
// exported from a pretrained language model.

#ifndef UDPX_EMBEDDINGS_H_
#define UDPX_EMBEDDINGS_H_

#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

#include "udpx/autodiff.h"
#include "udpx/conllu.h"

namespace udpx {

struct WordVectors {
  int dim = 0;
  std::unordered_map<std::string, std::vector<Scalar>> vectors;
};

// An optional "count dim" first line is detected and skipped.
WordVectors LoadWordVectors(std::istream& in);

// Blocks of "v1 ... vd" lines, one line per token, blank-line separated.
std::vector<Matrix> LoadContextualVectors(std::istream& in);

// Attaches block i to sentence i. Throws FormatError when counts or lengths
// disagree.
void AttachContextualVectors(std::vector<Matrix> blocks,
                             std::vector<Sentence>& sentences);

}  // namespace udpx

#endif  // UDPX_EMBEDDINGS_H_
