// ectc/oracle.hpp

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

// Brute-force reference implementations, exact but exponential. These exist
// as ground truth for the dynamic-programming lattice and are only meant for
// desk-scale instances.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ectc/lattice.hpp"
#include "ectc/logmath.hpp"
#include "ectc/types.hpp"

namespace ectc::oracle {

inline constexpr std::uint64_t kDefaultPathCap = 10'000'000;

struct PathSet {
  std::vector<Path> paths;
  double total_log_prob = kLogZero;  // filled by score_paths / brute_likelihood
};

// C(T-1, S-1): the number of ways to place S segments over T frames.
// Saturates at the cap sentinel instead of overflowing.
inline std::uint64_t count_segmentations(int num_frames, int num_labels,
                                         std::uint64_t cap = kDefaultPathCap) {
  if (num_labels < 1 || num_labels > num_frames) return 0;
  const std::uint64_t sentinel = cap + 1;
  std::uint64_t n = static_cast<std::uint64_t>(num_frames - 1);
  std::uint64_t k = static_cast<std::uint64_t>(num_labels - 1);
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    if (result > sentinel) return sentinel;
    result = result * (n - k + i) / i;
  }
  return result > sentinel ? sentinel : result;
}

namespace detail {

inline void place_segments(const Ordering& ell, int num_frames, const std::vector<int>& anchor,
                           int seg, int start, Path& scratch, std::vector<Path>& out) {
  const int S = static_cast<int>(ell.size());
  const int remaining_labels = S - seg - 1;
  const int max_len = num_frames - start - remaining_labels;
  const int label = ell[static_cast<std::size_t>(seg)];
  for (int len = 1; len <= max_len; ++len) {
    bool ok = true;
    for (int t = start; t < start + len; ++t) {
      const int a = anchor[static_cast<std::size_t>(t)];
      if (a >= 0 && a != label) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    for (int t = start; t < start + len; ++t) scratch[static_cast<std::size_t>(t)] = label;
    if (seg + 1 == S) {
      if (start + len == num_frames) out.push_back(scratch);
    } else {
      place_segments(ell, num_frames, anchor, seg + 1, start + len, scratch, out);
    }
  }
}

}  // namespace detail

// All paths that collapse to the ordering and honor the anchors, generated
// by boundary placement so the cap binds on consistent paths only. An empty
// result under anchors is a legal return, not an error.
inline PathSet enumerate_paths(const Ordering& ell, int num_frames,
                               const SparseAnnotations* ann = nullptr,
                               std::uint64_t cap = kDefaultPathCap) {
  if (ell.empty()) throw InvalidInputError("ordering must be non-empty");
  if (static_cast<int>(ell.size()) > num_frames) {
    throw InfeasibleError("ordering longer than the frame count");
  }
  const std::uint64_t total = count_segmentations(num_frames, static_cast<int>(ell.size()), cap);
  if (total > cap) {
    throw SizeLimitError("consistent-path count exceeds the cap of " + std::to_string(cap));
  }
  std::vector<int> anchor(static_cast<std::size_t>(num_frames), -1);
  if (ann != nullptr) {
    for (const auto& [frame, action] : ann->anchors) {
      if (frame < 0 || frame >= num_frames) {
        throw InvalidInputError("annotation frame out of range");
      }
      anchor[static_cast<std::size_t>(frame)] = action;
    }
  }
  PathSet set;
  Path scratch(static_cast<std::size_t>(num_frames));
  detail::place_segments(ell, num_frames, anchor, 0, 0, scratch, set.paths);
  return set;
}

// log of the normalized path probability: the raw emission at frame 0 times
// the renormalized step distribution at every later frame. Summed over all
// A^T paths this is exactly 1.
inline double path_log_prob(const Path& path, const PosteriorGrid& z,
                            const SimilarityTrack& sim) {
  const int T = static_cast<int>(z.rows());
  if (static_cast<int>(path.size()) != T) {
    throw InvalidInputError("path length does not match the posterior grid");
  }
  validate_similarity(sim, T);
  double acc = std::log(z(0, path[0]));
  for (int t = 1; t < T; ++t) {
    const VectorXd row = z.row(t).transpose();
    const VectorXd q =
        lattice::step_weights(row, path[static_cast<std::size_t>(t - 1)],
                              sim.sims[static_cast<std::size_t>(t - 1)], sim.theta);
    const double step = q(path[static_cast<std::size_t>(t)]);
    acc += step > 0.0 ? std::log(step) : kLogZero;
  }
  return acc;
}

// Plain stepwise product of emissions, the similarity-free limit. Kept as an
// independent route: it never touches step_weights.
inline double ctc_path_log_prob(const Path& path, const PosteriorGrid& z) {
  const int T = static_cast<int>(z.rows());
  if (static_cast<int>(path.size()) != T) {
    throw InvalidInputError("path length does not match the posterior grid");
  }
  double acc = 0.0;
  for (int t = 0; t < T; ++t) acc += std::log(z(t, path[static_cast<std::size_t>(t)]));
  return acc;
}

// Fills total_log_prob over the renormalized probabilities and returns it.
inline double score_paths(PathSet& set, const PosteriorGrid& z, const SimilarityTrack& sim) {
  double acc = kLogZero;
  for (const Path& path : set.paths) acc = log_add(acc, path_log_prob(path, z, sim));
  set.total_log_prob = acc;
  return acc;
}

// Ground truth for lattice::forward.
inline double brute_likelihood(const PosteriorGrid& z, const Ordering& ell,
                               const SimilarityTrack& sim,
                               const SparseAnnotations* ann = nullptr,
                               std::uint64_t cap = kDefaultPathCap) {
  PathSet set = enumerate_paths(ell, static_cast<int>(z.rows()), ann, cap);
  return score_paths(set, z, sim);
}

// Similarity-free brute-force likelihood via ctc_path_log_prob.
inline double brute_ctc_likelihood(const PosteriorGrid& z, const Ordering& ell,
                                   const SparseAnnotations* ann = nullptr,
                                   std::uint64_t cap = kDefaultPathCap) {
  PathSet set = enumerate_paths(ell, static_cast<int>(z.rows()), ann, cap);
  double acc = kLogZero;
  for (const Path& path : set.paths) acc = log_add(acc, ctc_path_log_prob(path, z));
  return acc;
}

// Sum of exp(path_log_prob) over every one of the A^T paths. Guarded by a
// much tighter bound than the segmentation enumeration.
inline double total_probability_all_paths(const PosteriorGrid& z, const SimilarityTrack& sim,
                                          std::uint64_t cap = 7'000'000) {
  const int T = static_cast<int>(z.rows());
  const int A = static_cast<int>(z.cols());
  double count = std::pow(static_cast<double>(A), static_cast<double>(T));
  if (count > static_cast<double>(cap)) {
    throw SizeLimitError("A^T enumeration too large");
  }
  Path path(static_cast<std::size_t>(T), 0);
  double total = 0.0;
  while (true) {
    total += std::exp(path_log_prob(path, z, sim));
    int pos = T - 1;
    while (pos >= 0 && path[static_cast<std::size_t>(pos)] == A - 1) {
      path[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++path[static_cast<std::size_t>(pos)];
  }
  return total;
}

// Central finite differences of a black-box loss over pre-softmax scores.
inline MatrixXd fd_gradient(const std::function<double(const MatrixXd&)>& loss_fn,
                            const MatrixXd& y, double h = 1e-5) {
  if (!(h > 0.0)) throw InvalidInputError("finite-difference step must be positive");
  MatrixXd grad(y.rows(), y.cols());
  MatrixXd probe = y;
  for (int t = 0; t < y.rows(); ++t) {
    for (int k = 0; k < y.cols(); ++k) {
      probe(t, k) = y(t, k) + h;
      const double up = loss_fn(probe);
      probe(t, k) = y(t, k) - h;
      const double down = loss_fn(probe);
      probe(t, k) = y(t, k);
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NumericError("non-finite loss at finite-difference probe point");
      }
      grad(t, k) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

}  // namespace ectc::oracle
