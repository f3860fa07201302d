// tests/test_lattice.cpp

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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ectc/lattice.hpp"
#include "ectc/oracle.hpp"
#include "test_helpers.hpp"

using namespace ectc;
using Catch::Approx;

namespace {
constexpr int kA = 0;
constexpr int kB = 1;
constexpr int kC = 2;

PosteriorGrid make_grid(std::initializer_list<std::initializer_list<double>> rows) {
  MatrixXd z(static_cast<int>(rows.size()), static_cast<int>(rows.begin()->size()));
  int t = 0;
  for (const auto& row : rows) {
    int k = 0;
    for (double v : row) z(t, k++) = v;
    ++t;
  }
  return z;
}
}  // namespace

TEST_CASE("collapse removes consecutive repetitions", "[lattice]") {
  CHECK(lattice::collapse({kB, kB, kC, kC, kC}) == Ordering{kB, kC});
  CHECK(lattice::collapse({kA}) == Ordering{kA});
  CHECK(lattice::collapse({kA, kB, kB, kA}) == Ordering{kA, kB, kA});
  CHECK_THROWS_AS(lattice::collapse({}), InvalidInputError);
}

TEST_CASE("collapse is idempotent on random paths", "[lattice][property]") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int T = rng.uniform_int(1, 12);
    Path path;
    for (int t = 0; t < T; ++t) path.push_back(rng.uniform_int(0, 3));
    const Ordering once = lattice::collapse(path);
    CHECK(lattice::collapse(once) == once);
  }
}

TEST_CASE("step_weights renormalizes by neighbor similarity", "[lattice]") {
  VectorXd z(2);

  SECTION("similarity at or below theta leaves the row unchanged") {
    z << 0.5, 0.5;
    const VectorXd q = lattice::step_weights(z, kA, 0.3, 0.5);
    CHECK(q(0) == Approx(0.5).margin(1e-12));
    CHECK(q(1) == Approx(0.5).margin(1e-12));
  }

  SECTION("similarity above theta rewards staying") {
    z << 0.5, 0.5;
    const VectorXd q = lattice::step_weights(z, kA, 0.8, 0.5);
    CHECK(q(0) == Approx(0.4 / 0.65).margin(1e-4));
    CHECK(q(1) == Approx(0.25 / 0.65).margin(1e-4));
  }

  SECTION("infinite similarity pins the previous label exactly") {
    z << 0.3, 0.7;
    const VectorXd q = lattice::step_weights(z, kB, kInfiniteSimilarity, 0.5);
    CHECK(q(0) == 0.0);
    CHECK(q(1) == 1.0);
  }

  SECTION("previous label out of range") {
    z << 0.5, 0.5;
    CHECK_THROWS_AS(lattice::step_weights(z, 2, 0.3, 0.5), InvalidInputError);
    CHECK_THROWS_AS(lattice::step_weights(z, -1, 0.3, 0.5), InvalidInputError);
  }
}

TEST_CASE("step_weights rows always sum to one", "[lattice][property]") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const int A = rng.uniform_int(2, 5);
    const PosteriorGrid z = testing::random_posteriors(rng, 1, A);
    const double theta = rng.uniform(0.05, 1.0);
    const double sim = trial % 7 == 0 ? kInfiniteSimilarity : rng.uniform();
    const VectorXd q =
        lattice::step_weights(z.row(0).transpose(), rng.uniform_int(0, A - 1), sim, theta);
    CHECK(q.sum() == Approx(1.0).margin(1e-12));
    CHECK(q.minCoeff() >= 0.0);
  }
}

TEST_CASE("forward likelihood on hand-checked instances", "[lattice]") {
  SECTION("single consistent path") {
    const PosteriorGrid z = make_grid({{0.6, 0.4}, {0.3, 0.7}});
    const Lattice lat = lattice::forward(z, {kA, kB}, neutral_similarity(2));
    CHECK(std::exp(lat.log_likelihood) == Approx(0.42).margin(1e-12));
  }

  SECTION("two equally likely paths") {
    const PosteriorGrid z = make_grid({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}});
    const Lattice lat = lattice::forward(z, {kA, kB}, neutral_similarity(3));
    CHECK(std::exp(lat.log_likelihood) == Approx(0.25).margin(1e-12));
  }

  SECTION("anchors prune to exactly two paths") {
    Rng rng(21);
    const PosteriorGrid z = testing::random_posteriors(rng, 6, 2);
    const SparseAnnotations ann{{{1, kA}, {3, kB}}};
    const Ordering ell{kA, kB};
    const SimilarityTrack sim = neutral_similarity(6);
    const oracle::PathSet set = oracle::enumerate_paths(ell, 6, &ann);
    REQUIRE(set.paths.size() == 2);
    const double brute = oracle::brute_likelihood(z, ell, sim, &ann);
    const Lattice lat = lattice::forward(z, ell, sim, &ann);
    CHECK(lat.log_likelihood == Approx(brute).margin(1e-10));
  }
}

TEST_CASE("forward input validation", "[lattice]") {
  const PosteriorGrid z = make_grid({{0.5, 0.5}, {0.5, 0.5}});
  CHECK_THROWS_AS(lattice::forward(z, {kA, kB, kA}, neutral_similarity(2)), InfeasibleError);
  CHECK_THROWS_AS(lattice::forward(z, {}, neutral_similarity(2)), InvalidInputError);
  CHECK_THROWS_AS(lattice::forward(z, {kA, kA}, neutral_similarity(2)), InvalidInputError);
  CHECK_THROWS_AS(lattice::forward(z, {kA, kB}, neutral_similarity(3)), InvalidInputError);

  // Anchor action absent from the ordering is rejected before any DP runs.
  const SparseAnnotations bad{{{0, kB}}};
  CHECK_THROWS_AS(lattice::forward(z, {kA}, neutral_similarity(2), &bad),
                  InfeasibleSupervisionError);

  // Anchors that occur in the ordering but cannot be realized in sequence.
  const SparseAnnotations impossible{{{0, kB}}};
  CHECK_THROWS_AS(lattice::forward(z, {kA, kB}, neutral_similarity(2), &impossible),
                  InfeasibleSupervisionError);
}

TEST_CASE("backward terminal condition and identity", "[lattice]") {
  SECTION("single frame") {
    const PosteriorGrid z = make_grid({{0.8, 0.2}});
    Lattice lat = lattice::forward(z, {kA}, neutral_similarity(1));
    lattice::backward(lat, z, {kA}, neutral_similarity(1));
    CHECK(lat.log_beta(0, 0) == Approx(std::log(0.8)).margin(1e-12));
  }

  SECTION("similarity-free limit satisfies the per-frame identity") {
    Rng rng(31);
    for (int trial = 0; trial < 25; ++trial) {
      const int A = rng.uniform_int(2, 3);
      const int T = rng.uniform_int(2, 8);
      const int S = rng.uniform_int(1, std::min(3, T));
      const Ordering ell = testing::random_ordering(rng, A, S);
      const PosteriorGrid z = testing::random_posteriors(rng, T, A);
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
        CHECK(acc == Approx(likelihood).epsilon(1e-8));
      }
    }
  }

  SECTION("general similarity deviation from the brute-force likelihood is measured") {
    Rng rng(32);
    double max_rel_deviation = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int T = 7;
      const int A = 3;
      const Ordering ell = testing::random_ordering(rng, A, rng.uniform_int(1, 3));
      const PosteriorGrid z = testing::random_posteriors(rng, T, A);
      const SimilarityTrack sim = testing::random_similarity(rng, T, 0.5);
      const double brute = std::exp(oracle::brute_likelihood(z, ell, sim));
      const Lattice lat = lattice::forward_backward(z, ell, sim);
      for (int t = 0; t < T; ++t) {
        double acc = 0.0;
        for (int s = 0; s < static_cast<int>(ell.size()); ++s) {
          if (lat.log_alpha(s, t) == kLogZero || lat.log_beta(s, t) == kLogZero) continue;
          acc += std::exp(lat.log_alpha(s, t) + lat.log_beta(s, t) -
                          std::log(z(t, ell[static_cast<std::size_t>(s)])));
        }
        max_rel_deviation = std::max(max_rel_deviation, std::abs(acc - brute) / brute);
      }
      // The forward value itself must stay exact regardless of the identity.
      CHECK(std::exp(lat.log_likelihood) == Approx(brute).epsilon(1e-8));
    }
    WARN("general-similarity forward-backward identity: max relative deviation = "
         << max_rel_deviation);
    CHECK(std::isfinite(max_rel_deviation));
  }
}

TEST_CASE("posterior targets", "[lattice]") {
  SECTION("single frame is one-hot") {
    const PosteriorGrid z = make_grid({{0.8, 0.2}});
    const Lattice lat = lattice::forward_backward(z, {kA}, neutral_similarity(1));
    const MatrixXd gamma = lattice::posterior_target(lat, z, {kA});
    CHECK(gamma(0, 0) == Approx(1.0).margin(1e-12));
    CHECK(gamma(0, 1) == 0.0);
  }

  SECTION("two equally likely paths split the middle frame") {
    const PosteriorGrid z = make_grid({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}});
    const Lattice lat = lattice::forward_backward(z, {kA, kB}, neutral_similarity(3));
    const MatrixXd gamma = lattice::posterior_target(lat, z, {kA, kB});
    CHECK(gamma(0, 0) == Approx(1.0).margin(1e-9));
    CHECK(gamma(0, 1) == Approx(0.0).margin(1e-9));
    CHECK(gamma(1, 0) == Approx(0.5).margin(1e-9));
    CHECK(gamma(1, 1) == Approx(0.5).margin(1e-9));
    CHECK(gamma(2, 0) == Approx(0.0).margin(1e-9));
    CHECK(gamma(2, 1) == Approx(1.0).margin(1e-9));
  }

  SECTION("anchored frames become one-hot") {
    Rng rng(41);
    const PosteriorGrid z = testing::random_posteriors(rng, 6, 2);
    const SparseAnnotations ann{{{1, kA}, {3, kB}}};
    const Lattice lat = lattice::forward_backward(z, {kA, kB}, neutral_similarity(6), &ann);
    const MatrixXd gamma = lattice::posterior_target(lat, z, {kA, kB});
    CHECK(gamma(1, kA) == Approx(1.0).margin(1e-9));
    CHECK(gamma(1, kB) == Approx(0.0).margin(1e-9));
    CHECK(gamma(3, kB) == Approx(1.0).margin(1e-9));
    CHECK(gamma(3, kA) == Approx(0.0).margin(1e-9));
  }

  SECTION("rows sum to one in the similarity-free limit") {
    Rng rng(42);
    const int T = 9;
    const Ordering ell = testing::random_ordering(rng, 3, 4);
    const PosteriorGrid z = testing::random_posteriors(rng, T, 3);
    const Lattice lat = lattice::forward_backward(z, ell, neutral_similarity(T));
    const MatrixXd gamma = lattice::posterior_target(lat, z, ell);
    for (int t = 0; t < T; ++t) {
      CHECK(gamma.row(t).sum() == Approx(1.0).margin(1e-6));
      CHECK(gamma.row(t).minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("loss and gradient", "[lattice]") {
  SECTION("single frame reduces to softmax cross-entropy") {
    const PosteriorGrid z = make_grid({{0.8, 0.2}});
    const auto [loss, grad] = lattice::ectc_loss_grad(z, {kA}, neutral_similarity(1));
    CHECK(loss == Approx(-std::log(0.8)).margin(1e-12));
    CHECK(grad(0, 0) == Approx(-0.2).margin(1e-9));
    CHECK(grad(0, 1) == Approx(0.2).margin(1e-9));
  }

  SECTION("gradient rows sum to zero in the similarity-free limit") {
    Rng rng(51);
    const int T = 7;
    const Ordering ell = testing::random_ordering(rng, 3, 3);
    const PosteriorGrid z = testing::random_posteriors(rng, T, 3);
    const auto [loss, grad] = lattice::ectc_loss_grad(z, ell, neutral_similarity(T));
    CHECK(loss > 0.0);
    for (int t = 0; t < T; ++t) CHECK(std::abs(grad.row(t).sum()) < 1e-6);
  }

  SECTION("similarity-free gradient matches finite differences") {
    Rng rng(52);
    for (int trial = 0; trial < 5; ++trial) {
      const int T = rng.uniform_int(3, 8);
      const int A = 3;
      const Ordering ell = testing::random_ordering(rng, A, rng.uniform_int(1, 3));
      MatrixXd y(T, A);
      for (int t = 0; t < T; ++t) {
        for (int k = 0; k < A; ++k) y(t, k) = rng.normal();
      }
      const SimilarityTrack sim = neutral_similarity(T);
      const auto loss_fn = [&](const MatrixXd& probe) {
        return lattice::ectc_loss_grad(testing::row_softmax(probe), ell, sim).loss;
      };
      const MatrixXd fd = oracle::fd_gradient(loss_fn, y);
      const auto [loss, grad] = lattice::ectc_loss_grad(testing::row_softmax(y), ell, sim);
      CHECK((grad - fd).cwiseAbs().maxCoeff() < 1e-5);
    }
  }

  SECTION("general-similarity gradient deviation is measured, not assumed") {
    Rng rng(53);
    double max_abs_deviation = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const int T = 6;
      const int A = 3;
      const Ordering ell = testing::random_ordering(rng, A, 2);
      MatrixXd y(T, A);
      for (int t = 0; t < T; ++t) {
        for (int k = 0; k < A; ++k) y(t, k) = rng.normal();
      }
      const SimilarityTrack sim = testing::random_similarity(rng, T, 0.5);
      const auto loss_fn = [&](const MatrixXd& probe) {
        return lattice::ectc_loss_grad(testing::row_softmax(probe), ell, sim).loss;
      };
      const MatrixXd fd = oracle::fd_gradient(loss_fn, y);
      const auto [loss, grad] = lattice::ectc_loss_grad(testing::row_softmax(y), ell, sim);
      max_abs_deviation = std::max(max_abs_deviation, (grad - fd).cwiseAbs().maxCoeff());
    }
    WARN("general-similarity gradient vs finite differences: max abs deviation = "
         << max_abs_deviation);
    CHECK(std::isfinite(max_abs_deviation));
  }

  SECTION("zero likelihood raises instead of returning an infinite loss") {
    const PosteriorGrid z = make_grid({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}});
    SimilarityTrack sim = neutral_similarity(3);
    sim.sims[0] = kInfiniteSimilarity;
    sim.sims[1] = kInfiniteSimilarity;
    CHECK_THROWS_AS(lattice::ectc_loss_grad(z, {kA, kB}, sim), InfeasibleError);
  }
}

TEST_CASE("oracle equivalence on random instances", "[lattice][property]") {
  Rng rng(61);
  for (int trial = 0; trial < 60; ++trial) {
    const int A = rng.uniform_int(2, 4);
    const int T = rng.uniform_int(2, 10);
    const int S = rng.uniform_int(1, std::min(4, T));
    const Ordering ell = testing::random_ordering(rng, A, S);
    const PosteriorGrid z = testing::random_posteriors(rng, T, A);

    SparseAnnotations ann;
    const SparseAnnotations* ann_ptr = nullptr;
    Path gt;
    if (trial % 2 == 1) {
      gt = testing::random_consistent_path(rng, ell, T);
      for (int t = 0; t < T; ++t) {
        if (rng.uniform() < 0.3) ann.anchors.emplace_back(t, gt[static_cast<std::size_t>(t)]);
      }
      if (!ann.empty()) ann_ptr = &ann;
    }
    const SimilarityTrack sim = testing::random_similarity(
        rng, T, rng.uniform(0.1, 1.0), 0.25, ann_ptr != nullptr ? &gt : nullptr);

    const double brute = oracle::brute_likelihood(z, ell, sim, ann_ptr);
    if (brute == kLogZero) {
      if (ann_ptr == nullptr) {
        const Lattice lat = lattice::forward(z, ell, sim);
        CHECK(lat.log_likelihood == kLogZero);
      }
      continue;
    }
    const Lattice lat = lattice::forward(z, ell, sim, ann_ptr);
    CHECK(std::exp(lat.log_likelihood) == Approx(std::exp(brute)).epsilon(1e-8));
  }
}

TEST_CASE("similarity-free limit equals an independent stepwise-product CTC",
          "[lattice][property]") {
  Rng rng(62);
  for (int trial = 0; trial < 30; ++trial) {
    const int A = rng.uniform_int(2, 3);
    const int T = rng.uniform_int(2, 8);
    const int S = rng.uniform_int(1, std::min(3, T));
    const Ordering ell = testing::random_ordering(rng, A, S);
    const PosteriorGrid z = testing::random_posteriors(rng, T, A);
    // Everything at or below theta must behave as if no similarity existed.
    SimilarityTrack sim = neutral_similarity(T, 0.6);
    for (auto& s : sim.sims) s = rng.uniform(0.0, 0.6);
    const Lattice lat = lattice::forward(z, ell, sim);
    const double ctc = oracle::brute_ctc_likelihood(z, ell);
    CHECK(lat.log_likelihood == Approx(ctc).margin(1e-10));
  }
}

TEST_CASE("hard similarity constraints zero out label changes", "[lattice]") {
  const PosteriorGrid z = make_grid({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}});

  SECTION("an all-infinite track forbids any change") {
    SimilarityTrack sim = neutral_similarity(3);
    sim.sims = {kInfiniteSimilarity, kInfiniteSimilarity};
    const Lattice lat = lattice::forward(z, {kA, kB}, sim);
    CHECK(lat.log_likelihood == kLogZero);
    CHECK(oracle::brute_likelihood(z, {kA, kB}, sim) == kLogZero);
  }

  SECTION("paths changing inside a pinned block have zero probability") {
    SimilarityTrack sim = neutral_similarity(3);
    sim.sims = {kInfiniteSimilarity, 0.0};
    CHECK(oracle::path_log_prob({kA, kB, kB}, z, sim) == kLogZero);
    CHECK(oracle::path_log_prob({kA, kA, kB}, z, sim) > kLogZero);
    const Lattice lat = lattice::forward(z, {kA, kB}, sim);
    CHECK(lat.log_likelihood ==
          Catch::Approx(oracle::brute_likelihood(z, {kA, kB}, sim)).margin(1e-10));
  }
}

TEST_CASE("long sequences stay finite in log space", "[lattice]") {
  Rng rng(71);
  const int T = 1000;
  const int A = 4;
  MatrixXd z(T, A);
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < A; ++k) z(t, k) = 1e-6 + rng.uniform();
    z.row(t) /= z.row(t).sum();
  }
  const Ordering ell = testing::random_ordering(rng, A, 5);
  const SimilarityTrack sim = testing::random_similarity(rng, T, 0.5);
  const Lattice lat = lattice::forward(z, ell, sim);
  CHECK(std::isfinite(lat.log_likelihood));
  CHECK(lat.log_likelihood < 0.0);
}
