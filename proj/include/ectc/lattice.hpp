// ectc/lattice.hpp

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

#include <cmath>
#include <string>
#include <vector>

#include "ectc/logmath.hpp"
#include "ectc/types.hpp"

namespace ectc::lattice {

// Removes consecutive label repetitions from a per-frame path.
// Idempotent: collapsing an already collapsed sequence returns it unchanged.
inline Ordering collapse(const Path& path) {
  if (path.empty()) throw InvalidInputError("cannot collapse an empty path");
  Ordering out;
  out.reserve(path.size());
  for (int label : path) {
    if (out.empty() || out.back() != label) out.push_back(label);
  }
  return out;
}

// Renormalized emission row for one frame, conditioned on the label of the
// neighboring frame: the entry matching `prev` is weighted by max(theta, sim),
// every other entry by theta, and the row is normalized back to a
// distribution. sim == kInfiniteSimilarity is the exact limit: the row
// becomes one-hot on `prev`. sim <= theta leaves the row unchanged.
inline VectorXd step_weights(const VectorXd& z_row, int prev, double sim, double theta) {
  const int num_actions = static_cast<int>(z_row.size());
  if (prev < 0 || prev >= num_actions) {
    throw InvalidInputError("previous label " + std::to_string(prev) +
                            " out of range (A=" + std::to_string(num_actions) + ")");
  }
  if (!(theta > 0.0)) throw InvalidInputError("theta must be positive");
  if (sim == kInfiniteSimilarity) {
    VectorXd q = VectorXd::Zero(num_actions);
    q(prev) = 1.0;
    return q;
  }
  const double stay_weight = std::max(theta, sim);
  VectorXd q = theta * z_row;
  q(prev) = stay_weight * z_row(prev);
  const double norm = q.sum();
  if (!(norm > 0.0)) throw NumericError("degenerate step: all weighted emissions are zero");
  return q / norm;
}

namespace detail {

// log of the renormalized probability of emitting `label` at frame `t`, given
// that the neighboring frame (predecessor in the forward pass, successor in
// the backward pass) carries `cond_label` and the connecting similarity is
// `sim`. Computed directly in log space; the normalizer
// max(theta,sim)*z(cond) + theta*(1-z(cond)) stays in [theta, 1] for finite
// similarities, so only z itself ever needs the log.
inline double log_step(const PosteriorGrid& z, const MatrixXd& log_z, int t, int cond_label,
                       int label, double sim, double theta) {
  if (sim == kInfiniteSimilarity) return label == cond_label ? 0.0 : kLogZero;
  const double stay_weight = std::max(theta, sim);
  const double z_cond = z(t, cond_label);
  const double norm = stay_weight * z_cond + theta * (1.0 - z_cond);
  const double weight = label == cond_label ? stay_weight : theta;
  return std::log(weight) + log_z(t, label) - std::log(norm);
}

struct Problem {
  int num_frames = 0;
  int num_labels = 0;
  MatrixXd log_z;
  std::vector<int> anchor_action;  // per frame; -1 when unconstrained

  bool masked(int s, int t, const Ordering& ell) const {
    const int a = anchor_action[static_cast<std::size_t>(t)];
    return a >= 0 && ell[static_cast<std::size_t>(s)] != a;
  }

  // Cells outside [lo(t), hi(t)] cannot lie on any complete path.
  int band_lo(int t) const { return std::max(0, num_labels - (num_frames - t)); }
  int band_hi(int t) const { return std::min(num_labels - 1, t); }
};

inline Problem make_problem(const PosteriorGrid& z, const Ordering& ell,
                            const SimilarityTrack& sim, const SparseAnnotations* ann) {
  validate_posteriors(z);
  Problem p;
  p.num_frames = static_cast<int>(z.rows());
  p.num_labels = static_cast<int>(ell.size());
  validate_ordering(ell, static_cast<int>(z.cols()));
  validate_similarity(sim, p.num_frames);
  if (p.num_labels > p.num_frames) {
    throw InfeasibleError("ordering of length " + std::to_string(p.num_labels) +
                          " cannot fit in " + std::to_string(p.num_frames) + " frames");
  }
  p.log_z = z.array().log().matrix();
  p.anchor_action.assign(static_cast<std::size_t>(p.num_frames), -1);
  if (ann != nullptr) {
    validate_annotations(*ann, ell, p.num_frames);
    for (const auto& [frame, action] : ann->anchors) {
      p.anchor_action[static_cast<std::size_t>(frame)] = action;
    }
  }
  return p;
}

}  // namespace detail

// Forward pass: fills log_alpha and the log-likelihood. alpha(s,t) sums the
// renormalized probabilities of all length-(t+1) prefixes collapsing to the
// first s+1 labels of the ordering. Frame 0 has no predecessor and uses the
// raw emission row. Anchored frames zero out every cell whose label
// disagrees. The likelihood is read from alpha(S-1, T-1): the path must
// consume the whole ordering.
inline Lattice forward(const PosteriorGrid& z, const Ordering& ell, const SimilarityTrack& sim,
                       const SparseAnnotations* ann = nullptr) {
  const detail::Problem p = detail::make_problem(z, ell, sim, ann);
  const int T = p.num_frames;
  const int S = p.num_labels;
  const double theta = sim.theta;

  Lattice lat;
  lat.log_alpha = MatrixXd::Constant(S, T, kLogZero);
  if (!p.masked(0, 0, ell)) lat.log_alpha(0, 0) = p.log_z(0, ell[0]);

  for (int t = 1; t < T; ++t) {
    const double s_prev = sim.sims[static_cast<std::size_t>(t - 1)];
    const int lo = p.band_lo(t);
    const int hi = p.band_hi(t);
    for (int s = lo; s <= hi; ++s) {
      if (p.masked(s, t, ell)) continue;
      const int label = ell[static_cast<std::size_t>(s)];
      double acc = kLogZero;
      const double stay_from = lat.log_alpha(s, t - 1);
      if (stay_from != kLogZero) {
        acc = stay_from + detail::log_step(z, p.log_z, t, label, label, s_prev, theta);
      }
      if (s > 0) {
        const double advance_from = lat.log_alpha(s - 1, t - 1);
        if (advance_from != kLogZero) {
          const int prev_label = ell[static_cast<std::size_t>(s - 1)];
          acc = log_add(acc, advance_from + detail::log_step(z, p.log_z, t, prev_label, label,
                                                             s_prev, theta));
        }
      }
      lat.log_alpha(s, t) = acc;
    }
  }

  lat.log_likelihood = lat.log_alpha(S - 1, T - 1);
  if (ann != nullptr && !ann->empty() && lat.log_likelihood == kLogZero) {
    throw InfeasibleSupervisionError("no path is consistent with both the ordering and the " +
                                     std::to_string(ann->anchors.size()) + " frame anchors");
  }
  return lat;
}

// Backward pass: fills log_beta on an existing lattice. beta(s,t) sums the
// renormalized probabilities of all suffixes starting at frame t that
// complete the ordering from label position s, with each step conditioned on
// the successor frame's label. Frame T-1 has no successor and uses the raw
// emission row, mirroring the forward initialization.
inline void backward(Lattice& lat, const PosteriorGrid& z, const Ordering& ell,
                     const SimilarityTrack& sim, const SparseAnnotations* ann = nullptr) {
  const detail::Problem p = detail::make_problem(z, ell, sim, ann);
  const int T = p.num_frames;
  const int S = p.num_labels;
  const double theta = sim.theta;
  if (lat.log_alpha.rows() != S || lat.log_alpha.cols() != T) {
    throw InvalidInputError("lattice shape does not match the inputs");
  }

  lat.log_beta = MatrixXd::Constant(S, T, kLogZero);
  if (!p.masked(S - 1, T - 1, ell)) lat.log_beta(S - 1, T - 1) = p.log_z(T - 1, ell[S - 1]);

  for (int t = T - 2; t >= 0; --t) {
    const double s_next = sim.sims[static_cast<std::size_t>(t)];
    const int lo = p.band_lo(t);
    const int hi = p.band_hi(t);
    for (int s = lo; s <= hi; ++s) {
      if (p.masked(s, t, ell)) continue;
      const int label = ell[static_cast<std::size_t>(s)];
      double acc = kLogZero;
      const double stay_to = lat.log_beta(s, t + 1);
      if (stay_to != kLogZero) {
        acc = stay_to + detail::log_step(z, p.log_z, t, label, label, s_next, theta);
      }
      if (s + 1 < S) {
        const double advance_to = lat.log_beta(s + 1, t + 1);
        if (advance_to != kLogZero) {
          const int next_label = ell[static_cast<std::size_t>(s + 1)];
          acc = log_add(acc, advance_to + detail::log_step(z, p.log_z, t, next_label, label,
                                                           s_next, theta));
        }
      }
      lat.log_beta(s, t) = acc;
    }
  }
}

inline Lattice forward_backward(const PosteriorGrid& z, const Ordering& ell,
                                const SimilarityTrack& sim,
                                const SparseAnnotations* ann = nullptr) {
  Lattice lat = forward(z, ell, sim, ann);
  backward(lat, z, ell, sim, ann);
  return lat;
}

// Softmax target per frame: gamma(t,k) gathers alpha(s,t)*beta(s,t)/z(t,l_s)
// over the label positions carrying action k, normalized by the likelihood.
// Actions that never occur in the ordering get zero columns.
inline MatrixXd posterior_target(const Lattice& lat, const PosteriorGrid& z,
                                 const Ordering& ell) {
  const int T = static_cast<int>(z.rows());
  const int A = static_cast<int>(z.cols());
  const int S = static_cast<int>(ell.size());
  if (lat.log_alpha.rows() != S || lat.log_alpha.cols() != T || lat.log_beta.size() == 0) {
    throw InvalidInputError("posterior_target needs a lattice with both passes filled");
  }
  if (lat.log_likelihood == kLogZero) {
    throw InfeasibleError("no consistent path: likelihood is zero");
  }
  MatrixXd gamma = MatrixXd::Zero(T, A);
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      const double a = lat.log_alpha(s, t);
      const double b = lat.log_beta(s, t);
      if (a == kLogZero || b == kLogZero) continue;
      const int k = ell[static_cast<std::size_t>(s)];
      gamma(t, k) += std::exp(a + b - std::log(z(t, k)) - lat.log_likelihood);
    }
  }
  return gamma;
}

struct LossGrad {
  double loss = 0.0;
  GradientGrid grad;  // T x A, d(loss)/d(pre-softmax score)
};

// Negative log-likelihood of the ordering and its gradient w.r.t. the
// pre-softmax scores: grad = z - gamma. A zero likelihood is always raised
// as an error, never returned as an infinite loss.
inline LossGrad ectc_loss_grad(const PosteriorGrid& z, const Ordering& ell,
                               const SimilarityTrack& sim,
                               const SparseAnnotations* ann = nullptr) {
  Lattice lat = forward(z, ell, sim, ann);
  if (lat.log_likelihood == kLogZero) {
    throw InfeasibleError("no path consistent with the ordering has nonzero probability");
  }
  backward(lat, z, ell, sim, ann);
  LossGrad out;
  out.loss = -lat.log_likelihood;
  out.grad = z - posterior_target(lat, z, ell);
  if (!out.grad.allFinite() || !std::isfinite(out.loss)) {
    throw NumericError("non-finite loss gradient");
  }
  return out;
}

}  // namespace ectc::lattice
