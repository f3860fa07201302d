// ectc/data_io.hpp

// Copyright 2026  ECTC Toolkit Authors

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

// Dataset and checkpoint serialization. Corpora are line-delimited JSON
// records (see docs/record-schema.json); vocabularies are one action name
// per line. Checkpoints are single JSON documents whose tensors round-trip
// bit-exactly.

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ectc/lattice.hpp"
#include "ectc/model.hpp"
#include "ectc/types.hpp"

namespace ectc::io {

using nlohmann::json;

// One video worth of data. Empty optional fields are simply absent from the
// on-disk record.
struct DatasetRecord {
  std::string id;
  MatrixXd features;                                      // T x d
  std::vector<std::string> frame_labels;                  // ground truth, optional
  std::vector<std::string> ordering;                      // weak label, optional
  std::vector<std::pair<int, std::string>> annotations;   // sparse anchors, optional
};

inline void write_vocab(const LabelVocab& vocab, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open vocabulary file for writing: " + path);
  for (const std::string& name : vocab.actions) out << name << "\n";
}

inline LabelVocab read_vocab(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open vocabulary file: " + path);
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) names.push_back(line);
  }
  return LabelVocab::from_names(std::move(names));
}

namespace detail {

inline json record_to_json(const DatasetRecord& record) {
  json j;
  j["id"] = record.id;
  json rows = json::array();
  for (int t = 0; t < record.features.rows(); ++t) {
    json row = json::array();
    for (int k = 0; k < record.features.cols(); ++k) row.push_back(record.features(t, k));
    rows.push_back(std::move(row));
  }
  j["features"] = std::move(rows);
  if (!record.frame_labels.empty()) j["frame_labels"] = record.frame_labels;
  if (!record.ordering.empty()) j["ordering"] = record.ordering;
  if (!record.annotations.empty()) {
    json ann = json::array();
    for (const auto& [frame, name] : record.annotations) ann.push_back(json::array({frame, name}));
    j["annotations"] = std::move(ann);
  }
  return j;
}

inline void validate_record(const DatasetRecord& record, const LabelVocab& vocab) {
  const auto fail = [&record](const std::string& message) {
    throw ParseError("record '" + record.id + "': " + message);
  };
  if (record.id.empty()) throw ParseError("record with empty id");
  const int T = static_cast<int>(record.features.rows());
  if (T < 1 || record.features.cols() < 1) fail("features must be a non-empty T x d matrix");
  if (!record.features.allFinite()) fail("features contain non-finite values");

  Path label_indices;
  if (!record.frame_labels.empty()) {
    if (static_cast<int>(record.frame_labels.size()) != T) {
      fail("frame_labels length does not match the frame count");
    }
    for (const std::string& name : record.frame_labels) {
      label_indices.push_back(vocab.index_of(name));
    }
  }
  Ordering ordering_indices;
  if (!record.ordering.empty()) {
    for (const std::string& name : record.ordering) {
      ordering_indices.push_back(vocab.index_of(name));
    }
    try {
      validate_ordering(ordering_indices, vocab.size());
    } catch (const InvalidInputError& e) {
      fail(e.what());
    }
  }
  if (!label_indices.empty() && !ordering_indices.empty() &&
      lattice::collapse(label_indices) != ordering_indices) {
    fail("frame_labels do not collapse to the ordering");
  }
  int prev_frame = -1;
  for (const auto& [frame, name] : record.annotations) {
    if (frame < 0 || frame >= T) fail("annotation frame out of range");
    if (frame <= prev_frame) fail("annotation frames must be strictly increasing");
    prev_frame = frame;
    const int action = vocab.index_of(name);
    if (!label_indices.empty() && label_indices[static_cast<std::size_t>(frame)] != action) {
      fail("annotation disagrees with frame_labels at frame " + std::to_string(frame));
    }
  }
}

inline DatasetRecord record_from_json(const json& j, const LabelVocab& vocab, int line_number) {
  const auto fail = [line_number](const std::string& message) {
    throw ParseError("line " + std::to_string(line_number) + ": " + message);
  };
  if (!j.is_object()) fail("record must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "id" && key != "features" && key != "frame_labels" && key != "ordering" &&
        key != "annotations") {
      fail("unknown field '" + key + "'");
    }
  }
  if (!j.contains("id") || !j["id"].is_string()) fail("missing string field 'id'");
  if (!j.contains("features") || !j["features"].is_array() || j["features"].empty()) {
    fail("missing non-empty array field 'features'");
  }

  DatasetRecord record;
  record.id = j["id"].get<std::string>();
  const auto& rows = j["features"];
  const std::size_t dim = rows[0].is_array() ? rows[0].size() : 0;
  if (dim == 0) fail("feature rows must be non-empty arrays");
  record.features.resize(static_cast<int>(rows.size()), static_cast<int>(dim));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (!rows[t].is_array() || rows[t].size() != dim) {
      fail("feature row " + std::to_string(t) + " has inconsistent width");
    }
    for (std::size_t k = 0; k < dim; ++k) {
      if (!rows[t][k].is_number()) fail("feature entries must be numbers");
      record.features(static_cast<int>(t), static_cast<int>(k)) = rows[t][k].get<double>();
    }
  }
  if (j.contains("frame_labels")) {
    for (const auto& name : j["frame_labels"]) {
      if (!name.is_string()) fail("frame_labels entries must be strings");
      record.frame_labels.push_back(name.get<std::string>());
    }
  }
  if (j.contains("ordering")) {
    for (const auto& name : j["ordering"]) {
      if (!name.is_string()) fail("ordering entries must be strings");
      record.ordering.push_back(name.get<std::string>());
    }
  }
  if (j.contains("annotations")) {
    for (const auto& pair : j["annotations"]) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
          !pair[1].is_string()) {
        fail("annotations must be [frame, action] pairs");
      }
      record.annotations.emplace_back(pair[0].get<int>(), pair[1].get<std::string>());
    }
  }
  validate_record(record, vocab);
  return record;
}

}  // namespace detail

inline void write_corpus(const std::vector<DatasetRecord>& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open corpus file for writing: " + path);
  for (const DatasetRecord& record : corpus) {
    out << detail::record_to_json(record).dump() << "\n";
  }
}

inline std::vector<DatasetRecord> read_corpus(const std::string& path, const LabelVocab& vocab) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open corpus file: " + path);
  std::vector<DatasetRecord> corpus;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(line_number) + ": " + e.what());
    }
    corpus.push_back(detail::record_from_json(j, vocab, line_number));
  }
  return corpus;
}

// Index-encodes records for the trainer. The ordering falls back to the
// collapsed frame labels when the record does not carry one.
inline std::vector<model::TrainingExample> to_examples(const std::vector<DatasetRecord>& corpus,
                                                       const LabelVocab& vocab,
                                                       bool need_ordering = true) {
  std::vector<model::TrainingExample> examples;
  examples.reserve(corpus.size());
  for (const DatasetRecord& record : corpus) {
    model::TrainingExample ex;
    ex.id = record.id;
    ex.features = record.features;
    for (const std::string& name : record.frame_labels) {
      ex.frame_labels.push_back(vocab.index_of(name));
    }
    for (const std::string& name : record.ordering) {
      ex.ordering.push_back(vocab.index_of(name));
    }
    if (ex.ordering.empty() && !ex.frame_labels.empty()) {
      ex.ordering = lattice::collapse(ex.frame_labels);
    }
    if (need_ordering && ex.ordering.empty()) {
      throw InvalidInputError("record '" + record.id +
                              "' carries neither an ordering nor frame labels");
    }
    for (const auto& [frame, name] : record.annotations) {
      ex.anchors.anchors.emplace_back(frame, vocab.index_of(name));
    }
    examples.push_back(std::move(ex));
  }
  return examples;
}

// ---------------------------------------------------------------------------
// Checkpoints.
// ---------------------------------------------------------------------------

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  int format_version = kCheckpointVersion;
  LabelVocab vocab;
  model::TrainConfig config;
  std::string annot_spec;  // the trainer's annotation derivation, "" if none
  model::ModelParams params;
};

namespace detail {

template <typename Tensor>
json tensor_to_json(const Tensor& tensor) {
  json j;
  j["dims"] = json::array({tensor.rows(), tensor.cols()});
  json data = json::array();
  for (int i = 0; i < tensor.size(); ++i) data.push_back(tensor.data()[i]);
  j["data"] = std::move(data);
  return j;
}

template <typename Tensor>
void tensor_from_json(const json& j, Tensor& tensor, const std::string& name) {
  if (!j.contains("dims") || !j.contains("data") || j["dims"].size() != 2) {
    throw ParseError("checkpoint tensor '" + name + "' is malformed");
  }
  const auto rows = j["dims"][0].get<long>();
  const auto cols = j["dims"][1].get<long>();
  if (rows != tensor.rows() || cols != tensor.cols() ||
      j["data"].size() != static_cast<std::size_t>(tensor.size())) {
    throw ParseError("checkpoint tensor '" + name + "' has dims " + std::to_string(rows) + "x" +
                     std::to_string(cols) + ", expected " + std::to_string(tensor.rows()) + "x" +
                     std::to_string(tensor.cols()));
  }
  for (int i = 0; i < tensor.size(); ++i) {
    if (!j["data"][static_cast<std::size_t>(i)].is_number()) {
      throw ParseError("checkpoint tensor '" + name + "' has non-numeric entries");
    }
    tensor.data()[i] = j["data"][static_cast<std::size_t>(i)].get<double>();
  }
}

inline json config_to_json(const model::TrainConfig& cfg) {
  json j;
  j["hidden"] = cfg.hidden;
  j["learning_rate"] = cfg.learning_rate;
  j["weight_decay"] = cfg.weight_decay;
  j["clip"] = cfg.clip;
  j["rms_decay"] = cfg.rms_decay;
  j["rms_epsilon"] = cfg.rms_epsilon;
  j["epochs"] = cfg.epochs;
  j["seed"] = cfg.seed;
  j["mode"] = model::to_string(cfg.mode);
  j["theta"] = cfg.theta;
  j["similarity"] = similarity::to_string(cfg.similarity);
  j["cluster_len"] = cfg.cluster_len;
  j["cluster_iters"] = cfg.cluster_iters;
  return j;
}

inline model::TrainConfig config_from_json(const json& j) {
  model::TrainConfig cfg;
  cfg.hidden = j.at("hidden").get<int>();
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.weight_decay = j.at("weight_decay").get<double>();
  cfg.clip = j.at("clip").get<double>();
  cfg.rms_decay = j.at("rms_decay").get<double>();
  cfg.rms_epsilon = j.at("rms_epsilon").get<double>();
  cfg.epochs = j.at("epochs").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.mode = model::mode_from_string(j.at("mode").get<std::string>());
  cfg.theta = j.at("theta").get<double>();
  cfg.similarity = similarity::mode_from_string(j.at("similarity").get<std::string>());
  cfg.cluster_len = j.at("cluster_len").get<int>();
  cfg.cluster_iters = j.at("cluster_iters").get<int>();
  return cfg;
}

}  // namespace detail

inline void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  bool finite = true;
  model::visit_tensors(ckpt.params, [&finite](const auto& tensor) {
    finite = finite && tensor.allFinite();
  });
  if (!finite) throw NumericError("refusing to save non-finite parameters");

  json j;
  j["format_version"] = ckpt.format_version;
  j["vocab"] = ckpt.vocab.actions;
  j["config"] = detail::config_to_json(ckpt.config);
  j["annot_spec"] = ckpt.annot_spec;
  j["input_dim"] = ckpt.params.input_dim;
  j["hidden_dim"] = ckpt.params.hidden_dim;
  j["num_actions"] = ckpt.params.num_actions;
  json tensors;
  tensors["fwd.w_input"] = detail::tensor_to_json(ckpt.params.fwd.w_input);
  tensors["fwd.w_recur"] = detail::tensor_to_json(ckpt.params.fwd.w_recur);
  tensors["fwd.bias"] = detail::tensor_to_json(ckpt.params.fwd.bias);
  tensors["bwd.w_input"] = detail::tensor_to_json(ckpt.params.bwd.w_input);
  tensors["bwd.w_recur"] = detail::tensor_to_json(ckpt.params.bwd.w_recur);
  tensors["bwd.bias"] = detail::tensor_to_json(ckpt.params.bwd.bias);
  tensors["w_out"] = detail::tensor_to_json(ckpt.params.w_out);
  tensors["b_out"] = detail::tensor_to_json(ckpt.params.b_out);
  j["tensors"] = std::move(tensors);

  std::ofstream out(path);
  if (!out) throw ParseError("cannot open checkpoint file for writing: " + path);
  out << j.dump() << "\n";
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open checkpoint file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint parse error: ") + e.what());
  }
  if (!j.contains("format_version") || !j["format_version"].is_number_integer()) {
    throw ParseError("checkpoint is missing its format version");
  }
  const int version = j["format_version"].get<int>();
  if (version != kCheckpointVersion) {
    throw ParseError("checkpoint format version " + std::to_string(version) +
                     " is not supported (expected " + std::to_string(kCheckpointVersion) + ")");
  }

  Checkpoint ckpt;
  ckpt.format_version = version;
  ckpt.vocab = LabelVocab::from_names(j.at("vocab").get<std::vector<std::string>>());
  ckpt.config = detail::config_from_json(j.at("config"));
  ckpt.annot_spec = j.value("annot_spec", std::string());
  const int input_dim = j.at("input_dim").get<int>();
  const int hidden_dim = j.at("hidden_dim").get<int>();
  const int num_actions = j.at("num_actions").get<int>();
  if (num_actions != ckpt.vocab.size()) {
    throw ParseError("checkpoint action count disagrees with its vocabulary");
  }
  ckpt.params = model::init_model(input_dim, hidden_dim, num_actions, 0);
  const json& tensors = j.at("tensors");
  detail::tensor_from_json(tensors.at("fwd.w_input"), ckpt.params.fwd.w_input, "fwd.w_input");
  detail::tensor_from_json(tensors.at("fwd.w_recur"), ckpt.params.fwd.w_recur, "fwd.w_recur");
  detail::tensor_from_json(tensors.at("fwd.bias"), ckpt.params.fwd.bias, "fwd.bias");
  detail::tensor_from_json(tensors.at("bwd.w_input"), ckpt.params.bwd.w_input, "bwd.w_input");
  detail::tensor_from_json(tensors.at("bwd.w_recur"), ckpt.params.bwd.w_recur, "bwd.w_recur");
  detail::tensor_from_json(tensors.at("bwd.bias"), ckpt.params.bwd.bias, "bwd.bias");
  detail::tensor_from_json(tensors.at("w_out"), ckpt.params.w_out, "w_out");
  detail::tensor_from_json(tensors.at("b_out"), ckpt.params.b_out, "b_out");
  return ckpt;
}

// Strict name-level equality between a checkpoint and a corpus vocabulary;
// silent re-indexing is never attempted.
inline void require_same_vocab(const LabelVocab& checkpoint_vocab, const LabelVocab& corpus_vocab) {
  if (checkpoint_vocab.actions != corpus_vocab.actions) {
    throw VocabMismatchError("checkpoint and corpus vocabularies differ");
  }
}

}  // namespace ectc::io
