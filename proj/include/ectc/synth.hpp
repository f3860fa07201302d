// ectc/synth.hpp

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

// Synthetic corpora with controllable vocabulary, segment structure, feature
// noise, and annotation sparsity, plus full ground truth for every metric.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "ectc/data_io.hpp"
#include "ectc/random.hpp"
#include "ectc/types.hpp"

namespace ectc::synth {

// How sparse anchors are sampled from ground-truth labels.
struct AnnotationSpec {
  enum class Plan { kNone, kOnePerSegment, kFraction };
  Plan plan = Plan::kNone;
  double fraction = 0.1;
};

// Accepts "none", "per-segment-1", or a fraction in (0, 1].
inline AnnotationSpec parse_annotation_spec(const std::string& text) {
  AnnotationSpec spec;
  if (text.empty() || text == "none") {
    spec.plan = AnnotationSpec::Plan::kNone;
    return spec;
  }
  if (text == "per-segment-1") {
    spec.plan = AnnotationSpec::Plan::kOnePerSegment;
    return spec;
  }
  std::size_t consumed = 0;
  double fraction = 0.0;
  try {
    fraction = std::stod(text, &consumed);
  } catch (const std::exception&) {
    throw InvalidInputError("cannot parse annotation spec '" + text + "'");
  }
  if (consumed != text.size() || !(fraction > 0.0) || fraction > 1.0) {
    throw InvalidInputError("annotation fraction must lie in (0, 1], got '" + text + "'");
  }
  spec.plan = AnnotationSpec::Plan::kFraction;
  spec.fraction = fraction;
  return spec;
}

inline std::string to_string(const AnnotationSpec& spec) {
  switch (spec.plan) {
    case AnnotationSpec::Plan::kNone: return "none";
    case AnnotationSpec::Plan::kOnePerSegment: return "per-segment-1";
    case AnnotationSpec::Plan::kFraction: return std::to_string(spec.fraction);
  }
  throw InvalidInputError("invalid annotation plan");
}

// Samples anchors from ground-truth frame labels: either one uniform frame
// per segment or round(fraction * T) distinct frames.
inline SparseAnnotations sample_annotations(const Path& frame_labels, const AnnotationSpec& spec,
                                            Rng& rng) {
  SparseAnnotations ann;
  if (spec.plan == AnnotationSpec::Plan::kNone) return ann;
  const int T = static_cast<int>(frame_labels.size());
  if (T == 0) throw InvalidInputError("cannot annotate an empty label sequence");

  if (spec.plan == AnnotationSpec::Plan::kOnePerSegment) {
    int start = 0;
    for (int t = 1; t <= T; ++t) {
      if (t == T || frame_labels[static_cast<std::size_t>(t)] !=
                        frame_labels[static_cast<std::size_t>(start)]) {
        const int frame = rng.uniform_int(start, t - 1);
        ann.anchors.emplace_back(frame, frame_labels[static_cast<std::size_t>(frame)]);
        start = t;
      }
    }
    return ann;
  }

  int count = static_cast<int>(std::lround(spec.fraction * T));
  count = std::max(1, std::min(count, T));
  std::vector<int> frames(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) frames[static_cast<std::size_t>(t)] = t;
  rng.shuffle(frames);
  frames.resize(static_cast<std::size_t>(count));
  std::sort(frames.begin(), frames.end());
  for (int frame : frames) {
    ann.anchors.emplace_back(frame, frame_labels[static_cast<std::size_t>(frame)]);
  }
  return ann;
}

struct SyntheticSpec {
  int num_actions = 5;         // K
  int feature_dim = 16;        // d
  double prototype_scale = 1.0;
  double noise_sigma = 0.1;
  int min_segments = 3;
  int max_segments = 5;
  int min_segment_len = 15;
  int max_segment_len = 30;
  int num_videos = 20;
  double drift = 0.0;          // within-segment random-walk step scale
  std::uint64_t seed = 0;
  AnnotationSpec annot;

  void validate() const {
    if (num_actions < 2) throw InvalidInputError("need at least two actions");
    if (feature_dim < 1) throw InvalidInputError("feature dimension must be positive");
    if (min_segments < 1 || max_segments < min_segments) {
      throw InvalidInputError("invalid segment count range");
    }
    if (min_segment_len < 1 || max_segment_len < min_segment_len) {
      throw InvalidInputError("invalid segment length range");
    }
    if (num_videos < 1) throw InvalidInputError("need at least one video");
    if (noise_sigma < 0.0 || drift < 0.0) {
      throw InvalidInputError("noise and drift must be non-negative");
    }
    if (!(prototype_scale > 0.0)) throw InvalidInputError("prototype scale must be positive");
  }
};

// Single-letter names for small vocabularies, numbered ones otherwise.
inline LabelVocab make_vocab(int num_actions) {
  std::vector<std::string> names;
  for (int k = 0; k < num_actions; ++k) {
    if (num_actions <= 26) {
      names.push_back(std::string(1, static_cast<char>('a' + k)));
    } else {
      names.push_back("a" + std::to_string(k));
    }
  }
  return LabelVocab::from_names(std::move(names));
}

// Action prototypes are a pure function of the spec seed, so corpora drawn
// with different streams (train/test splits) share them.
inline MatrixXd make_prototypes(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  MatrixXd protos(spec.num_actions, spec.feature_dim);
  for (int k = 0; k < spec.num_actions; ++k) {
    for (int i = 0; i < spec.feature_dim; ++i) {
      protos(k, i) = spec.prototype_scale * rng.normal();
    }
  }
  return protos;
}

// Generates one split. Frame features are the action prototype plus a
// within-segment random walk plus white noise; ground-truth labels,
// ordering, and anchors are attached per the spec.
inline std::vector<io::DatasetRecord> generate_corpus(const SyntheticSpec& spec,
                                                      const std::string& id_prefix = "vid",
                                                      std::uint64_t stream = 0) {
  spec.validate();
  const LabelVocab vocab = make_vocab(spec.num_actions);
  const MatrixXd protos = make_prototypes(spec);
  Rng rng(spec.seed * 0x9e3779b97f4a7c15ULL + 0x100000001b3ULL * (stream + 1));

  std::vector<io::DatasetRecord> corpus;
  corpus.reserve(static_cast<std::size_t>(spec.num_videos));
  for (int v = 0; v < spec.num_videos; ++v) {
    const int segments = rng.uniform_int(spec.min_segments, spec.max_segments);
    Ordering ordering;
    for (int s = 0; s < segments; ++s) {
      int action = rng.uniform_int(0, spec.num_actions - 1);
      while (s > 0 && action == ordering.back()) {
        action = rng.uniform_int(0, spec.num_actions - 1);
      }
      ordering.push_back(action);
    }
    std::vector<int> lengths;
    int total = 0;
    for (int s = 0; s < segments; ++s) {
      lengths.push_back(rng.uniform_int(spec.min_segment_len, spec.max_segment_len));
      total += lengths.back();
    }

    io::DatasetRecord record;
    char id_buf[32];
    std::snprintf(id_buf, sizeof(id_buf), "%s_%04d", id_prefix.c_str(), v);
    record.id = id_buf;
    record.features.resize(total, spec.feature_dim);
    Path labels;
    labels.reserve(static_cast<std::size_t>(total));
    int t = 0;
    VectorXd walk(spec.feature_dim);
    for (int s = 0; s < segments; ++s) {
      walk.setZero();
      const int action = ordering[static_cast<std::size_t>(s)];
      for (int i = 0; i < lengths[static_cast<std::size_t>(s)]; ++i) {
        for (int k = 0; k < spec.feature_dim; ++k) {
          record.features(t, k) = protos(action, k) + walk(k) + spec.noise_sigma * rng.normal();
        }
        for (int k = 0; k < spec.feature_dim; ++k) walk(k) += spec.drift * rng.normal();
        labels.push_back(action);
        ++t;
      }
    }

    for (int label : labels) record.frame_labels.push_back(vocab.name_of(label));
    for (int label : ordering) record.ordering.push_back(vocab.name_of(label));
    const SparseAnnotations ann = sample_annotations(labels, spec.annot, rng);
    for (const auto& [frame, action] : ann.anchors) {
      record.annotations.emplace_back(frame, vocab.name_of(action));
    }
    corpus.push_back(std::move(record));
  }
  return corpus;
}

// Mean cosine similarity between consecutive same-segment frames, a corpus
// statistic surfaced by the generator CLI.
inline double mean_within_segment_cosine(const std::vector<io::DatasetRecord>& corpus) {
  double total = 0.0;
  long count = 0;
  for (const io::DatasetRecord& record : corpus) {
    for (int t = 0; t + 1 < record.features.rows(); ++t) {
      if (record.frame_labels.empty() ||
          record.frame_labels[static_cast<std::size_t>(t)] !=
              record.frame_labels[static_cast<std::size_t>(t + 1)]) {
        continue;
      }
      const double na = record.features.row(t).norm();
      const double nb = record.features.row(t + 1).norm();
      if (na == 0.0 || nb == 0.0) continue;
      total += record.features.row(t).dot(record.features.row(t + 1)) / (na * nb);
      ++count;
    }
  }
  return count > 0 ? total / static_cast<double>(count) : 0.0;
}

}  // namespace ectc::synth
