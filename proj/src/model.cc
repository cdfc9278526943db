// udpx/model.cc

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

#include "udpx/model.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace udpx {

ParsedTree GoldTree(const Sentence& s, const Alphabets& alphabets) {
  ParsedTree tree;
  for (int i = 0; i < s.size(); ++i) {
    const Token& t = s.tokens[static_cast<size_t>(i)];
    if (!t.head || !t.deprel) {
      throw std::invalid_argument("token " + std::to_string(i + 1) +
                                  " has no gold head or relation");
    }
    const int k = alphabets.LabelClass(*t.deprel);
    if (k < 0) {
      throw std::invalid_argument("relation '" + *t.deprel +
                                  "' is not in the label alphabet");
    }
    tree.heads.push_back(*t.head);
    tree.labels.push_back(k);
  }
  return tree;
}

void ApplyTree(const ParsedTree& tree, const Alphabets& alphabets, Sentence& s) {
  if (static_cast<int>(tree.heads.size()) != s.size()) {
    throw std::invalid_argument("apply_tree: length mismatch");
  }
  for (size_t i = 0; i < tree.heads.size(); ++i) {
    s.tokens[i].head = tree.heads[i];
    s.tokens[i].deprel = alphabets.LabelName(tree.labels[i]);
  }
}

Model::Model(const ModelConfig& config, const Alphabets& alphabets,
             uint64_t seed)
    : config_(config), alphabets_(alphabets) {
  Rng rng(seed);
  encoder_ = std::make_unique<Encoder>(config_, alphabets_, store_, rng);
  parser_ = std::make_unique<ParseHead>(config_, alphabets_.num_labels(),
                                        store_, rng);
  mlm_ = std::make_unique<MlmHead>(config_, alphabets_.words.size(), store_, rng);
  wo_ = std::make_unique<WoHead>(config_, store_, rng);
}

Value Model::ParseLoss(const IndexedSentence& s, const ParsedTree& gold,
                       const ForwardContext& ctx) const {
  Value encoded = encoder_->Encode(s, EncodeMode::kParse, ctx);
  HeadRepresentations reps = parser_->Project(encoded, ctx);
  Value arcs = parser_->ScoreArcs(reps);
  Value labels = parser_->ScoreLabels(reps, gold.heads);
  return ParseNll(arcs, labels, gold);
}

Value Model::MlmLoss(const MlmItem& item, const ForwardContext& ctx) const {
  Value encoded = encoder_->Encode(item.corrupted, EncodeMode::kMaskedLm, ctx);
  return mlm_->Loss(encoded, item);
}

Value Model::WoLoss(const ShuffledSentence& s, bool exclude_used,
                    const ForwardContext& ctx) const {
  Value encoded = encoder_->Encode(s.sentence, EncodeMode::kWordOrder, ctx);
  return wo_->Loss(encoded, s.permutation, exclude_used);
}

ParseDistribution Model::Distribution(const IndexedSentence& s) const {
  NoGradGuard no_grad;
  const ForwardContext ctx = ForwardContext::Inference();
  Value encoded = encoder_->Encode(s, EncodeMode::kParse, ctx);
  return parser_->Distribution(parser_->Project(encoded, ctx));
}

ParsedTree Model::Parse(const IndexedSentence& s) const {
  return MstDecode(Distribution(s));
}

namespace {

constexpr const char* kDtype = sizeof(Scalar) == 8 ? "f64" : "f32";

template <typename T>
void AppendLittleEndian(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  out.append(bytes, sizeof(T));
}

template <typename T>
T ReadLittleEndian(const char* p) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::string ReadLine(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) {
    throw CheckpointError(path + ": truncated checkpoint");
  }
  return line;
}

}  // namespace

void SaveCheckpoint(const Model& model, const std::string& path,
                    const nlohmann::json& extra) {
  nlohmann::json meta;
  meta["model"] = model.config().ToJson();
  meta["alphabets"] = model.alphabets().ToJson();
  meta["extra"] = extra;
  const std::string meta_text = meta.dump();

  std::ostringstream header;
  std::string data;
  header << kCheckpointMagic << '\n'
         << "meta " << meta_text.size() << '\n'
         << meta_text << '\n'
         << "tensors " << model.store().params().size() << '\n';
  for (const Value& p : model.store().params()) {
    const Matrix& m = p.data();
    header << "tensor " << p.name() << ' ' << kDtype << ' ' << m.rows() << ' '
           << m.cols() << ' ' << data.size() << '\n';
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      AppendLittleEndian(data, m.data()[i]);
    }
  }
  header << "data " << data.size() << '\n';

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write " + path);
    out << header.str();
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw CheckpointError("write failed for " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw CheckpointError("cannot rename " + tmp + " to " + path);
  }
}

std::unique_ptr<Model> LoadCheckpoint(const std::string& path,
                                      nlohmann::json* extra) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path);
  if (ReadLine(in, path) != kCheckpointMagic) {
    throw CheckpointError(path + ": not a " + std::string(kCheckpointMagic) +
                          " checkpoint");
  }
  std::string tag;
  size_t meta_size = 0;
  std::istringstream(ReadLine(in, path)) >> tag >> meta_size;
  if (tag != "meta") throw CheckpointError(path + ": missing meta block");
  std::string meta_text(meta_size, '\0');
  in.read(meta_text.data(), static_cast<std::streamsize>(meta_size));
  ReadLine(in, path);

  std::unique_ptr<Model> model;
  try {
    const nlohmann::json meta = nlohmann::json::parse(meta_text);
    model = std::make_unique<Model>(ModelConfig::FromJson(meta.at("model")),
                                    Alphabets::FromJson(meta.at("alphabets")),
                                    0);
    if (extra) *extra = meta.value("extra", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(path + ": bad metadata: " + e.what());
  }

  struct Entry {
    std::string name, dtype;
    Eigen::Index rows = 0, cols = 0;
    size_t offset = 0;
  };
  size_t count = 0;
  std::istringstream(ReadLine(in, path)) >> tag >> count;
  if (tag != "tensors") throw CheckpointError(path + ": missing manifest");
  std::vector<Entry> entries(count);
  for (Entry& e : entries) {
    std::istringstream(ReadLine(in, path)) >> tag >> e.name >> e.dtype >>
        e.rows >> e.cols >> e.offset;
    if (tag != "tensor") throw CheckpointError(path + ": bad manifest line");
  }
  size_t data_size = 0;
  std::istringstream(ReadLine(in, path)) >> tag >> data_size;
  if (tag != "data") throw CheckpointError(path + ": missing data block");
  std::string data(data_size, '\0');
  in.read(data.data(), static_cast<std::streamsize>(data_size));
  if (static_cast<size_t>(in.gcount()) != data_size) {
    throw CheckpointError(path + ": truncated data block");
  }

  const auto& params = model->store().params();
  if (entries.size() != params.size()) {
    throw CheckpointError(path + ": has " + std::to_string(entries.size()) +
                          " tensors, model expects " +
                          std::to_string(params.size()));
  }
  for (const Entry& e : entries) {
    Value p;
    try {
      p = model->store().Get(e.name);
    } catch (const std::exception&) {
      throw CheckpointError(path + ": unknown tensor " + e.name);
    }
    Matrix& m = p.mutable_data();
    if (m.rows() != e.rows || m.cols() != e.cols) {
      throw CheckpointError(path + ": tensor " + e.name + " has shape " +
                            std::to_string(e.rows) + "x" +
                            std::to_string(e.cols) + ", expected " +
                            std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
    }
    const size_t width = e.dtype == "f64" ? 8 : e.dtype == "f32" ? 4 : 0;
    if (width == 0) throw CheckpointError(path + ": unknown dtype " + e.dtype);
    if (e.offset + width * static_cast<size_t>(m.size()) > data.size()) {
      throw CheckpointError(path + ": tensor " + e.name + " overruns data");
    }
    const char* base = data.data() + e.offset;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] =
          width == 8
              ? static_cast<Scalar>(ReadLittleEndian<double>(base + 8 * i))
              : static_cast<Scalar>(ReadLittleEndian<float>(base + 4 * i));
    }
  }
  return model;
}

}  // namespace udpx
