// ectc/checks.hpp

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

// Randomized verification probes comparing the lattice against the
// brute-force oracle. Shared by the `check` subcommand and the acceptance
// suite.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ectc/lattice.hpp"
#include "ectc/oracle.hpp"
#include "ectc/random.hpp"
#include "ectc/types.hpp"

namespace ectc::checks {

// ---------------------------------------------------------------------------
// Random instance generators.
// ---------------------------------------------------------------------------

inline PosteriorGrid random_posteriors(Rng& rng, int num_frames, int num_actions,
                                       double logit_scale = 2.0) {
  MatrixXd y(num_frames, num_actions);
  for (int t = 0; t < num_frames; ++t) {
    for (int k = 0; k < num_actions; ++k) y(t, k) = logit_scale * rng.normal();
  }
  PosteriorGrid z(num_frames, num_actions);
  for (int t = 0; t < num_frames; ++t) {
    const double m = y.row(t).maxCoeff();
    z.row(t) = (y.row(t).array() - m).exp();
    z.row(t) /= z.row(t).sum();
  }
  return z;
}

inline Ordering random_ordering(Rng& rng, int num_actions, int length) {
  Ordering ell;
  ell.reserve(static_cast<std::size_t>(length));
  for (int s = 0; s < length; ++s) {
    int label = rng.uniform_int(0, num_actions - 1);
    while (s > 0 && label == ell.back()) label = rng.uniform_int(0, num_actions - 1);
    ell.push_back(label);
  }
  return ell;
}

inline Path random_consistent_path(Rng& rng, const Ordering& ell, int num_frames) {
  const int S = static_cast<int>(ell.size());
  std::vector<int> lengths(static_cast<std::size_t>(S), 1);
  for (int extra = 0; extra < num_frames - S; ++extra) {
    ++lengths[static_cast<std::size_t>(rng.uniform_int(0, S - 1))];
  }
  Path path;
  path.reserve(static_cast<std::size_t>(num_frames));
  for (int s = 0; s < S; ++s) {
    for (int i = 0; i < lengths[static_cast<std::size_t>(s)]; ++i) {
      path.push_back(ell[static_cast<std::size_t>(s)]);
    }
  }
  return path;
}

// Hard constraints are only placed inside constant-label runs of `safe_path`
// when one is given, so that path keeps positive probability.
inline SimilarityTrack random_similarity(Rng& rng, int num_frames, double theta,
                                         double infinite_prob = 0.0,
                                         const Path* safe_path = nullptr) {
  SimilarityTrack track;
  track.theta = theta;
  track.sims.resize(static_cast<std::size_t>(num_frames - 1));
  for (int t = 0; t + 1 < num_frames; ++t) {
    const bool same_label = safe_path == nullptr ||
                            (*safe_path)[static_cast<std::size_t>(t)] ==
                                (*safe_path)[static_cast<std::size_t>(t + 1)];
    if (infinite_prob > 0.0 && same_label && rng.uniform() < infinite_prob) {
      track.sims[static_cast<std::size_t>(t)] = kInfiniteSimilarity;
    } else {
      track.sims[static_cast<std::size_t>(t)] = rng.uniform();
    }
  }
  return track;
}

// ---------------------------------------------------------------------------
// Probes.
// ---------------------------------------------------------------------------

struct ProbeResult {
  std::string name;
  int trials = 0;
  double max_err = 0.0;
  double threshold = 0.0;
  bool pass = true;
};

// Sum of all A^T normalized path probabilities must be exactly 1.
inline ProbeResult markov_normalization(int trials, std::uint64_t seed, int num_actions = 3,
                                        int num_frames = 6, double tolerance = 1e-9) {
  Rng rng(seed);
  ProbeResult result{"markov_normalization", trials, 0.0, tolerance, true};
  for (int trial = 0; trial < trials; ++trial) {
    const PosteriorGrid z = random_posteriors(rng, num_frames, num_actions);
    const SimilarityTrack sim = random_similarity(rng, num_frames, rng.uniform(0.05, 1.0),
                                                  trial % 4 == 0 ? 0.3 : 0.0);
    const double total = oracle::total_probability_all_paths(z, sim);
    result.max_err = std::max(result.max_err, std::abs(total - 1.0));
  }
  result.pass = result.max_err <= tolerance;
  return result;
}

// exp(forward log-likelihood) vs. the brute-force path sum, with and without
// anchors, with mixed finite and infinite similarities.
inline ProbeResult oracle_equivalence(int trials, std::uint64_t seed, int max_actions = 4,
                                      int max_frames = 10, int max_labels = 4,
                                      double tolerance = 1e-8) {
  Rng rng(seed);
  ProbeResult result{"oracle_equivalence", trials, 0.0, tolerance, true};
  for (int trial = 0; trial < trials; ++trial) {
    const int A = rng.uniform_int(2, max_actions);
    const int T = rng.uniform_int(2, max_frames);
    const int S = rng.uniform_int(1, std::min(max_labels, T));
    const Ordering ell = random_ordering(rng, A, S);
    const PosteriorGrid z = random_posteriors(rng, T, A);

    SparseAnnotations ann;
    const SparseAnnotations* ann_ptr = nullptr;
    Path gt;
    if (trial % 2 == 1) {
      gt = random_consistent_path(rng, ell, T);
      for (int t = 0; t < T; ++t) {
        if (rng.uniform() < 0.3) ann.anchors.emplace_back(t, gt[static_cast<std::size_t>(t)]);
      }
      if (!ann.empty()) ann_ptr = &ann;
    }
    const SimilarityTrack sim = random_similarity(rng, T, rng.uniform(0.1, 1.0), 0.25,
                                                  ann_ptr != nullptr ? &gt : nullptr);
    const double brute = oracle::brute_likelihood(z, ell, sim, ann_ptr);
    if (brute == kLogZero) {
      if (ann_ptr == nullptr) {
        const double forward = lattice::forward(z, ell, sim).log_likelihood;
        if (forward != kLogZero) {
          result.max_err = std::numeric_limits<double>::infinity();
        }
      }
      continue;
    }
    const Lattice lat = lattice::forward(z, ell, sim, ann_ptr);
    const double rel =
        std::abs(std::exp(lat.log_likelihood) - std::exp(brute)) / std::exp(brute);
    result.max_err = std::max(result.max_err, rel);
  }
  result.pass = result.max_err <= tolerance;
  return result;
}

// With every similarity at or below theta the lattice must reproduce the
// plain stepwise-product likelihood, computed by an independent route.
inline ProbeResult ctc_reduction(int trials, std::uint64_t seed, int max_actions = 3,
                                 int max_frames = 8, int max_labels = 3,
                                 double tolerance = 1e-10) {
  Rng rng(seed);
  ProbeResult result{"ctc_reduction", trials, 0.0, tolerance, true};
  for (int trial = 0; trial < trials; ++trial) {
    const int A = rng.uniform_int(2, max_actions);
    const int T = rng.uniform_int(2, max_frames);
    const int S = rng.uniform_int(1, std::min(max_labels, T));
    const Ordering ell = random_ordering(rng, A, S);
    const PosteriorGrid z = random_posteriors(rng, T, A);
    const double theta = rng.uniform(0.2, 1.0);
    SimilarityTrack sim = neutral_similarity(T, theta);
    for (auto& s : sim.sims) s = rng.uniform(0.0, theta);
    const double forward = lattice::forward(z, ell, sim).log_likelihood;
    const double brute = oracle::brute_ctc_likelihood(z, ell);
    result.max_err = std::max(result.max_err, std::abs(forward - brute));
  }
  result.pass = result.max_err <= tolerance;
  return result;
}

// The loss gradient vs. central finite differences in the similarity-free
// limit, where the closed form is exact. flip_sign is a harness-sanity hook
// that negates the analytic gradient and must make the probe fail.
inline ProbeResult fd_gradient_ctc_limit(int trials, std::uint64_t seed, int max_frames = 8,
                                         double tolerance = 1e-5, bool flip_sign = false) {
  Rng rng(seed);
  ProbeResult result{"fd_gradient_ctc_limit", trials, 0.0, tolerance, true};
  const int A = 3;
  for (int trial = 0; trial < trials; ++trial) {
    const int T = rng.uniform_int(2, max_frames);
    const Ordering ell = random_ordering(rng, A, rng.uniform_int(1, std::min(3, T)));
    MatrixXd y(T, A);
    for (int t = 0; t < T; ++t) {
      for (int k = 0; k < A; ++k) y(t, k) = rng.normal();
    }
    const SimilarityTrack sim = neutral_similarity(T);
    const auto softmax = [](const MatrixXd& scores) {
      PosteriorGrid z(scores.rows(), scores.cols());
      for (int t = 0; t < scores.rows(); ++t) {
        const double m = scores.row(t).maxCoeff();
        z.row(t) = (scores.row(t).array() - m).exp();
        z.row(t) /= z.row(t).sum();
      }
      return z;
    };
    const auto loss_fn = [&](const MatrixXd& probe) {
      return lattice::ectc_loss_grad(softmax(probe), ell, sim).loss;
    };
    const MatrixXd fd = oracle::fd_gradient(loss_fn, y);
    MatrixXd analytic = lattice::ectc_loss_grad(softmax(y), ell, sim).grad;
    if (flip_sign) analytic = -analytic;
    result.max_err = std::max(result.max_err, (analytic - fd).cwiseAbs().maxCoeff());
  }
  result.pass = result.max_err <= tolerance;
  return result;
}

// Per-frame identity sum_s alpha*beta/z = P(l|X) in the similarity-free
// limit, where the forward and backward factorizations coincide.
inline ProbeResult fb_identity_ctc_limit(int trials, std::uint64_t seed, int max_actions = 3,
                                         int max_frames = 8, int max_labels = 3,
                                         double tolerance = 1e-8) {
  Rng rng(seed);
  ProbeResult result{"fb_identity_ctc_limit", trials, 0.0, tolerance, true};
  for (int trial = 0; trial < trials; ++trial) {
    const int A = rng.uniform_int(2, max_actions);
    const int T = rng.uniform_int(2, max_frames);
    const int S = rng.uniform_int(1, std::min(max_labels, T));
    const Ordering ell = random_ordering(rng, A, S);
    const PosteriorGrid z = random_posteriors(rng, T, A);
    const SimilarityTrack sim = neutral_similarity(T, rng.uniform(0.1, 1.0));
    const Lattice lat = lattice::forward_backward(z, ell, sim);
    const double likelihood = std::exp(lat.log_likelihood);
    for (int t = 0; t < T; ++t) {
      double acc = 0.0;
      for (int s = 0; s < S; ++s) {
        if (lat.log_alpha(s, t) == kLogZero || lat.log_beta(s, t) == kLogZero) continue;
        acc += std::exp(lat.log_alpha(s, t) + lat.log_beta(s, t) -
                        std::log(z(t, ell[static_cast<std::size_t>(s)])));
      }
      result.max_err = std::max(result.max_err, std::abs(acc - likelihood) / likelihood);
    }
  }
  result.pass = result.max_err <= tolerance;
  return result;
}

// The same identity under general similarity, measured against the
// brute-force likelihood. Informational: the backward factorization
// conditions on the successor label, so exactness is not expected.
inline double fb_identity_general_deviation(int trials, std::uint64_t seed, int num_actions = 3,
                                            int num_frames = 7, int max_labels = 3) {
  Rng rng(seed);
  double max_rel = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const Ordering ell = random_ordering(rng, num_actions, rng.uniform_int(1, max_labels));
    const PosteriorGrid z = random_posteriors(rng, num_frames, num_actions);
    const SimilarityTrack sim = random_similarity(rng, num_frames, 0.5);
    const double brute = std::exp(oracle::brute_likelihood(z, ell, sim));
    const Lattice lat = lattice::forward_backward(z, ell, sim);
    for (int t = 0; t < num_frames; ++t) {
      double acc = 0.0;
      for (int s = 0; s < static_cast<int>(ell.size()); ++s) {
        if (lat.log_alpha(s, t) == kLogZero || lat.log_beta(s, t) == kLogZero) continue;
        acc += std::exp(lat.log_alpha(s, t) + lat.log_beta(s, t) -
                        std::log(z(t, ell[static_cast<std::size_t>(s)])));
      }
      max_rel = std::max(max_rel, std::abs(acc - brute) / brute);
    }
  }
  return max_rel;
}

// Deviation of the closed-form gradient from finite differences of the true
// renormalized loss under general similarity. Informational.
inline double fd_gradient_general_deviation(int trials, std::uint64_t seed, int num_frames = 6) {
  Rng rng(seed);
  double max_abs = 0.0;
  const int A = 3;
  for (int trial = 0; trial < trials; ++trial) {
    const Ordering ell = random_ordering(rng, A, 2);
    MatrixXd y(num_frames, A);
    for (int t = 0; t < num_frames; ++t) {
      for (int k = 0; k < A; ++k) y(t, k) = rng.normal();
    }
    const SimilarityTrack sim = random_similarity(rng, num_frames, 0.5);
    const auto softmax = [](const MatrixXd& scores) {
      PosteriorGrid z(scores.rows(), scores.cols());
      for (int t = 0; t < scores.rows(); ++t) {
        const double m = scores.row(t).maxCoeff();
        z.row(t) = (scores.row(t).array() - m).exp();
        z.row(t) /= z.row(t).sum();
      }
      return z;
    };
    const auto loss_fn = [&](const MatrixXd& probe) {
      return lattice::ectc_loss_grad(softmax(probe), ell, sim).loss;
    };
    const MatrixXd fd = oracle::fd_gradient(loss_fn, y);
    const MatrixXd analytic = lattice::ectc_loss_grad(softmax(y), ell, sim).grad;
    max_abs = std::max(max_abs, (analytic - fd).cwiseAbs().maxCoeff());
  }
  return max_abs;
}

// The worked semi-supervision instance: anchors at frames 1 and 3 prune the
// five segmentations of two labels over six frames down to two.
inline ProbeResult semi_supervision_pruning(std::uint64_t seed, double tolerance = 1e-10) {
  ProbeResult result{"semi_supervision_pruning", 1, 0.0, tolerance, true};
  Rng rng(seed);
  const Ordering ell{0, 1};
  const SparseAnnotations ann{{{1, 0}, {3, 1}}};
  const PosteriorGrid z = random_posteriors(rng, 6, 2);
  const SimilarityTrack sim = neutral_similarity(6);

  const auto unpruned = oracle::enumerate_paths(ell, 6);
  const auto pruned = oracle::enumerate_paths(ell, 6, &ann);
  if (unpruned.paths.size() != 5 || pruned.paths.size() != 2) {
    result.pass = false;
    result.max_err = std::numeric_limits<double>::infinity();
    return result;
  }
  const double brute = oracle::brute_likelihood(z, ell, sim, &ann);
  const double forward = lattice::forward(z, ell, sim, &ann).log_likelihood;
  result.max_err = std::abs(forward - brute);
  result.pass = result.max_err <= tolerance;
  return result;
}

}  // namespace ectc::checks
