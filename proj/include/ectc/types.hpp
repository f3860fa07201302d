// ectc/types.hpp

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

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ectc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Errors. The CLI maps these onto its exit codes.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments to an operation (wrong shape, out-of-range index, ...).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// The label sequence cannot be realized over the given frames
// (S > T, or hard similarity constraints leave no consistent path).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Sparse frame annotations contradict the label sequence.
class InfeasibleSupervisionError : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

// Non-finite values where finite ones are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// An enumeration would exceed its configured cap.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

// Action names disagree between two artifacts (corpus vs. checkpoint, ...).
class VocabMismatchError : public Error {
 public:
  using Error::Error;
};

// File-level syntax or schema violations.
class ParseError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Core sequence types. All frame and action indices are 0-based.
// ---------------------------------------------------------------------------

// One action index per frame.
using Path = std::vector<int>;

// Collapsed action sequence: no two adjacent entries equal.
using Ordering = std::vector<int>;

// Per-frame softmax probabilities, one row per frame (T x A).
using PosteriorGrid = MatrixXd;

// Gradients of the loss w.r.t. the pre-softmax scores (T x A).
using GradientGrid = MatrixXd;

struct LabelVocab {
  std::vector<std::string> actions;

  int size() const { return static_cast<int>(actions.size()); }

  int index_of(const std::string& name) const {
    for (int i = 0; i < size(); ++i) {
      if (actions[i] == name) return i;
    }
    throw VocabMismatchError("unknown action name: '" + name + "'");
  }

  const std::string& name_of(int index) const {
    if (index < 0 || index >= size()) {
      throw InvalidInputError("action index " + std::to_string(index) +
                              " out of range (A=" + std::to_string(size()) + ")");
    }
    return actions[static_cast<std::size_t>(index)];
  }

  static LabelVocab from_names(std::vector<std::string> names) {
    if (names.empty()) throw InvalidInputError("vocabulary must contain at least one action");
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t j = i + 1; j < names.size(); ++j) {
        if (names[i] == names[j]) {
          throw InvalidInputError("duplicate action name: '" + names[i] + "'");
        }
      }
    }
    return LabelVocab{std::move(names)};
  }
};

// Pairs of consecutive frames with this similarity are pinned to the same
// label: the stay probability becomes exactly 1 in the renormalized step.
inline constexpr double kInfiniteSimilarity = std::numeric_limits<double>::infinity();

// Consecutive-frame similarities plus the minimum-similarity floor theta.
// Finite entries live in [0, 1]; kInfiniteSimilarity encodes a hard
// same-label constraint. Similarities at or below theta have no effect.
struct SimilarityTrack {
  std::vector<double> sims;  // length T-1
  double theta = 0.5;
};

// Builds a track of the given length whose entries all have no effect.
inline SimilarityTrack neutral_similarity(int num_frames, double theta = 0.5) {
  if (num_frames < 1) throw InvalidInputError("similarity track needs at least one frame");
  return SimilarityTrack{std::vector<double>(static_cast<std::size_t>(num_frames - 1), 0.0), theta};
}

// Sparse frame-level supervision: (frame, action) anchors sorted by frame.
struct SparseAnnotations {
  std::vector<std::pair<int, int>> anchors;

  bool empty() const { return anchors.empty(); }
};

// Log-domain forward/backward grids over (label position s, frame t).
// Cells outside the feasible band (s > t or S-1-s > T-1-t) stay at -inf.
struct Lattice {
  MatrixXd log_alpha;  // S x T
  MatrixXd log_beta;   // S x T, empty until the backward pass runs
  double log_likelihood = -std::numeric_limits<double>::infinity();

  int num_labels() const { return static_cast<int>(log_alpha.rows()); }
  int num_frames() const { return static_cast<int>(log_alpha.cols()); }
};

// ---------------------------------------------------------------------------
// Shared validation helpers.
// ---------------------------------------------------------------------------

inline void validate_ordering(const Ordering& ell, int num_actions) {
  if (ell.empty()) throw InvalidInputError("ordering must be non-empty");
  for (std::size_t s = 0; s < ell.size(); ++s) {
    if (ell[s] < 0 || ell[s] >= num_actions) {
      throw InvalidInputError("ordering entry " + std::to_string(ell[s]) +
                              " out of range (A=" + std::to_string(num_actions) + ")");
    }
    if (s > 0 && ell[s] == ell[s - 1]) {
      throw InvalidInputError("ordering has adjacent repeats at position " + std::to_string(s));
    }
  }
}

inline void validate_posteriors(const PosteriorGrid& z) {
  const int T = static_cast<int>(z.rows());
  if (T < 1 || z.cols() < 1) throw InvalidInputError("posterior grid must be non-empty");
  for (int t = 0; t < T; ++t) {
    double row_sum = 0.0;
    for (int k = 0; k < z.cols(); ++k) {
      const double v = z(t, k);
      if (!std::isfinite(v) || v <= 0.0) {
        throw InvalidInputError("posterior entry (" + std::to_string(t) + "," +
                                std::to_string(k) + ") not strictly positive");
      }
      row_sum += v;
    }
    if (std::abs(row_sum - 1.0) > 1e-9) {
      throw InvalidInputError("posterior row " + std::to_string(t) + " sums to " +
                              std::to_string(row_sum) + ", expected 1");
    }
  }
}

inline void validate_similarity(const SimilarityTrack& sim, int num_frames) {
  if (static_cast<int>(sim.sims.size()) != num_frames - 1) {
    throw InvalidInputError("similarity track has " + std::to_string(sim.sims.size()) +
                            " entries, expected " + std::to_string(num_frames - 1));
  }
  if (!(sim.theta > 0.0) || sim.theta > 1.0) {
    throw InvalidInputError("theta must lie in (0, 1], got " + std::to_string(sim.theta));
  }
  for (double s : sim.sims) {
    if (s == kInfiniteSimilarity) continue;
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
      throw InvalidInputError("finite similarity entries must lie in [0, 1], got " +
                              std::to_string(s));
    }
  }
}

// Structural checks on the anchor list plus the eager part of feasibility:
// every anchored action must occur in the ordering at all. Whether the
// anchors embed into the ordering in sequence is left to the forward pass.
inline void validate_annotations(const SparseAnnotations& ann, const Ordering& ell,
                                 int num_frames) {
  int prev_frame = -1;
  for (const auto& [frame, action] : ann.anchors) {
    if (frame < 0 || frame >= num_frames) {
      throw InvalidInputError("annotation frame " + std::to_string(frame) +
                              " out of range (T=" + std::to_string(num_frames) + ")");
    }
    if (frame <= prev_frame) {
      throw InvalidInputError("annotation frames must be strictly increasing");
    }
    prev_frame = frame;
    bool in_ordering = false;
    for (int label : ell) {
      if (label == action) {
        in_ordering = true;
        break;
      }
    }
    if (!in_ordering) {
      throw InfeasibleSupervisionError("annotated action " + std::to_string(action) +
                                       " at frame " + std::to_string(frame) +
                                       " does not occur in the ordering");
    }
  }
}

}  // namespace ectc
