// ectc/similarity.hpp

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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ectc/types.hpp"

namespace ectc::similarity {

// Temporally contiguous over-segmentation of a frame sequence.
struct ClusterSegmentation {
  std::vector<int> segment_id;  // length T, non-decreasing in steps of 0 or 1
  int num_segments = 0;
};

enum class Mode { kNone, kKmeans, kCosine, kBoth };

inline Mode mode_from_string(const std::string& name) {
  if (name == "none") return Mode::kNone;
  if (name == "kmeans") return Mode::kKmeans;
  if (name == "cosine") return Mode::kCosine;
  if (name == "both") return Mode::kBoth;
  throw InvalidInputError("unknown similarity mode: '" + name + "'");
}

inline std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::kNone: return "none";
    case Mode::kKmeans: return "kmeans";
    case Mode::kCosine: return "cosine";
    case Mode::kBoth: return "both";
  }
  throw InvalidInputError("invalid similarity mode value");
}

namespace detail {

// Collapse the raw assignment into contiguous segments, merging single-frame
// runs into whichever neighboring run is closer in feature space.
inline ClusterSegmentation finalize_contiguity(const MatrixXd& features,
                                               std::vector<int> assignment) {
  const int T = static_cast<int>(assignment.size());

  struct Run {
    int start;
    int end;  // inclusive
    int length() const { return end - start + 1; }
  };
  auto build_runs = [&assignment, T]() {
    std::vector<Run> runs;
    int start = 0;
    for (int t = 1; t <= T; ++t) {
      if (t == T || assignment[static_cast<std::size_t>(t)] !=
                        assignment[static_cast<std::size_t>(start)]) {
        runs.push_back({start, t - 1});
        start = t;
      }
    }
    return runs;
  };

  auto run_mean = [&features](const Run& run) {
    VectorXd mean = VectorXd::Zero(features.cols());
    for (int t = run.start; t <= run.end; ++t) mean += features.row(t).transpose();
    return VectorXd(mean / run.length());
  };

  std::vector<Run> runs = build_runs();
  while (runs.size() > 1) {
    int victim = -1;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (runs[i].length() < 2) {
        victim = static_cast<int>(i);
        break;
      }
    }
    if (victim < 0) break;
    const Run& run = runs[static_cast<std::size_t>(victim)];
    const VectorXd frame = run_mean(run);
    int target;
    if (victim == 0) {
      target = victim + 1;
    } else if (victim + 1 == static_cast<int>(runs.size())) {
      target = victim - 1;
    } else {
      const double left = (frame - run_mean(runs[static_cast<std::size_t>(victim - 1)])).norm();
      const double right = (frame - run_mean(runs[static_cast<std::size_t>(victim + 1)])).norm();
      target = left <= right ? victim - 1 : victim + 1;
    }
    const int absorbed_id = assignment[static_cast<std::size_t>(
        runs[static_cast<std::size_t>(target)].start)];
    for (int t = run.start; t <= run.end; ++t) {
      assignment[static_cast<std::size_t>(t)] = absorbed_id;
    }
    runs = build_runs();
  }

  ClusterSegmentation seg;
  seg.segment_id.resize(static_cast<std::size_t>(T));
  int id = 0;
  for (int t = 0; t < T; ++t) {
    if (t > 0 && assignment[static_cast<std::size_t>(t)] !=
                     assignment[static_cast<std::size_t>(t - 1)]) {
      ++id;
    }
    seg.segment_id[static_cast<std::size_t>(t)] = id;
  }
  seg.num_segments = id + 1;
  return seg;
}

}  // namespace detail

// k-means over-segmentation with a temporal candidate window, in the spirit
// of superpixel clustering. ceil(T/M) centers start at uniform temporal
// positions; each frame is assigned to the feature-nearest center within a
// window of 2M (ties broken by temporal distance, then center index), centers
// are re-estimated, and a final pass enforces temporal contiguity.
inline ClusterSegmentation temporal_cluster(const MatrixXd& features, int mean_len = 20,
                                            int iters = 10) {
  const int T = static_cast<int>(features.rows());
  const int d = static_cast<int>(features.cols());
  if (T < 1 || d < 1) throw InvalidInputError("features must be a non-empty T x d matrix");
  if (mean_len < 2) throw InvalidInputError("mean cluster length must be at least 2");
  if (!features.allFinite()) throw InvalidInputError("features contain non-finite values");

  const int num_centers = (T + mean_len - 1) / mean_len;
  if (num_centers <= 1) {
    ClusterSegmentation seg;
    seg.segment_id.assign(static_cast<std::size_t>(T), 0);
    seg.num_segments = 1;
    return seg;
  }

  std::vector<double> position(static_cast<std::size_t>(num_centers));
  MatrixXd centroid(num_centers, d);
  for (int c = 0; c < num_centers; ++c) {
    const int lo = static_cast<int>(static_cast<long long>(c) * T / num_centers);
    const int hi = static_cast<int>(static_cast<long long>(c + 1) * T / num_centers);
    position[static_cast<std::size_t>(c)] = 0.5 * (lo + hi - 1);
    VectorXd mean = VectorXd::Zero(d);
    for (int t = lo; t < hi; ++t) mean += features.row(t).transpose();
    centroid.row(c) = (mean / std::max(1, hi - lo)).transpose();
  }

  const double window = 2.0 * mean_len;
  std::vector<int> assignment(static_cast<std::size_t>(T), 0);
  for (int iter = 0; iter < iters; ++iter) {
    for (int t = 0; t < T; ++t) {
      int best = -1;
      double best_dist = 0.0;
      double best_tdist = 0.0;
      for (int c = 0; c < num_centers; ++c) {
        const double tdist = std::abs(position[static_cast<std::size_t>(c)] - t);
        if (tdist > window) continue;
        const double dist = (features.row(t) - centroid.row(c)).squaredNorm();
        if (best < 0 || dist < best_dist ||
            (dist == best_dist && tdist < best_tdist)) {
          best = c;
          best_dist = dist;
          best_tdist = tdist;
        }
      }
      if (best < 0) {
        // No center in the window; fall back to the temporally nearest.
        double nearest = std::numeric_limits<double>::max();
        for (int c = 0; c < num_centers; ++c) {
          const double tdist = std::abs(position[static_cast<std::size_t>(c)] - t);
          if (tdist < nearest) {
            nearest = tdist;
            best = c;
          }
        }
      }
      assignment[static_cast<std::size_t>(t)] = best;
    }
    for (int c = 0; c < num_centers; ++c) {
      VectorXd mean = VectorXd::Zero(d);
      double tsum = 0.0;
      int count = 0;
      for (int t = 0; t < T; ++t) {
        if (assignment[static_cast<std::size_t>(t)] != c) continue;
        mean += features.row(t).transpose();
        tsum += t;
        ++count;
      }
      if (count == 0) continue;
      centroid.row(c) = (mean / count).transpose();
      position[static_cast<std::size_t>(c)] = tsum / count;
    }
  }

  return detail::finalize_contiguity(features, std::move(assignment));
}

// Consecutive-frame cosine similarity mapped affinely onto [0, 1].
// Pairs involving a zero-norm frame get similarity 0.
inline std::vector<double> cosine_track(const MatrixXd& features) {
  const int T = static_cast<int>(features.rows());
  if (T < 1) throw InvalidInputError("features must be non-empty");
  std::vector<double> track(static_cast<std::size_t>(T - 1));
  for (int t = 0; t + 1 < T; ++t) {
    const double na = features.row(t).norm();
    const double nb = features.row(t + 1).norm();
    if (na == 0.0 || nb == 0.0) {
      track[static_cast<std::size_t>(t)] = 0.0;
      continue;
    }
    const double cosine = features.row(t).dot(features.row(t + 1)) / (na * nb);
    track[static_cast<std::size_t>(t)] = std::clamp(0.5 * (1.0 + cosine), 0.0, 1.0);
  }
  return track;
}

// Hard same-label constraints inside clusters, the given similarities at
// cluster boundaries.
inline SimilarityTrack compose_track(const ClusterSegmentation& seg,
                                     const std::vector<double>& boundary_sims, double theta) {
  const int T = static_cast<int>(seg.segment_id.size());
  if (static_cast<int>(boundary_sims.size()) != T - 1) {
    throw InvalidInputError("boundary similarity track length must be T-1");
  }
  SimilarityTrack track;
  track.theta = theta;
  track.sims.resize(static_cast<std::size_t>(T - 1));
  for (int t = 0; t + 1 < T; ++t) {
    track.sims[static_cast<std::size_t>(t)] =
        seg.segment_id[static_cast<std::size_t>(t)] ==
                seg.segment_id[static_cast<std::size_t>(t + 1)]
            ? kInfiniteSimilarity
            : boundary_sims[static_cast<std::size_t>(t)];
  }
  return track;
}

// The four similarity configurations exposed by the trainer.
inline SimilarityTrack build_track(const MatrixXd& features, Mode mode, double theta,
                                   int mean_len = 20, int iters = 10) {
  const int T = static_cast<int>(features.rows());
  switch (mode) {
    case Mode::kNone:
      return neutral_similarity(T, theta);
    case Mode::kCosine:
      return SimilarityTrack{cosine_track(features), theta};
    case Mode::kKmeans: {
      const ClusterSegmentation seg = temporal_cluster(features, mean_len, iters);
      return compose_track(seg, std::vector<double>(static_cast<std::size_t>(T - 1), 0.0),
                           theta);
    }
    case Mode::kBoth: {
      const ClusterSegmentation seg = temporal_cluster(features, mean_len, iters);
      return compose_track(seg, cosine_track(features), theta);
    }
  }
  throw InvalidInputError("invalid similarity mode value");
}

}  // namespace ectc::similarity
