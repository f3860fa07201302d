// ectc/metrics.hpp

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
#include <vector>

#include "ectc/types.hpp"

namespace ectc::metrics {

struct Segment {
  int action;
  int start;  // inclusive
  int end;    // inclusive
};

using SegmentList = std::vector<Segment>;

// Run-length encoding of per-frame labels into contiguous segments.
inline SegmentList to_segments(const Path& frame_labels) {
  if (frame_labels.empty()) throw InvalidInputError("cannot segment an empty label sequence");
  SegmentList segments;
  int start = 0;
  const int T = static_cast<int>(frame_labels.size());
  for (int t = 1; t <= T; ++t) {
    if (t == T || frame_labels[static_cast<std::size_t>(t)] !=
                      frame_labels[static_cast<std::size_t>(start)]) {
      segments.push_back({frame_labels[static_cast<std::size_t>(start)], start, t - 1});
      start = t;
    }
  }
  return segments;
}

// Fraction of frames labeled correctly.
inline double frame_accuracy(const Path& pred, const Path& gt) {
  if (pred.size() != gt.size() || gt.empty()) {
    throw InvalidInputError("frame accuracy needs two equal-length non-empty paths");
  }
  int matches = 0;
  for (std::size_t t = 0; t < gt.size(); ++t) {
    if (pred[t] == gt[t]) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(gt.size());
}

// Minimal-cost global alignment of the two unit sequences (substitution,
// insertion and deletion all cost 1), normalized by the ground-truth length:
// max(0, 1 - (S+I+D)/|gt|).
inline double unit_accuracy(const Ordering& pred_units, const Ordering& gt_units) {
  if (gt_units.empty()) throw InvalidInputError("ground-truth units must be non-empty");
  const std::size_t n = pred_units.size();
  const std::size_t m = gt_units.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const int sub = prev[j - 1] + (pred_units[i - 1] == gt_units[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  const double errors = prev[m];
  return std::max(0.0, 1.0 - errors / static_cast<double>(m));
}

// Mean intersection-over-union between each ground-truth segment and the
// full set of frames predicted as that segment's action.
inline double jaccard(const Path& pred, const SegmentList& gt_segments) {
  if (gt_segments.empty()) throw InvalidInputError("ground-truth segments must be non-empty");
  const int T = static_cast<int>(pred.size());
  if (gt_segments.back().end != T - 1 || gt_segments.front().start != 0) {
    throw InvalidInputError("ground-truth segments must cover the prediction length");
  }
  double total = 0.0;
  for (const Segment& seg : gt_segments) {
    int predicted = 0;
    int intersection = 0;
    for (int t = 0; t < T; ++t) {
      if (pred[static_cast<std::size_t>(t)] != seg.action) continue;
      ++predicted;
      if (t >= seg.start && t <= seg.end) ++intersection;
    }
    const int seg_len = seg.end - seg.start + 1;
    const int uni = seg_len + predicted - intersection;
    total += uni > 0 ? static_cast<double>(intersection) / uni : 0.0;
  }
  return total / static_cast<double>(gt_segments.size());
}

}  // namespace ectc::metrics
