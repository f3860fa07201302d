// tests/test_model.cpp

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
#include <vector>

#include "ectc/model.hpp"
#include "test_helpers.hpp"

using namespace ectc;
using Catch::Approx;

namespace {

MatrixXd random_features(Rng& rng, int num_frames, int dim, double scale = 1.0) {
  MatrixXd features(num_frames, dim);
  for (int t = 0; t < num_frames; ++t) {
    for (int k = 0; k < dim; ++k) features(t, k) = scale * rng.normal();
  }
  return features;
}

// Loss of the current parameters on a fixed example, used as the black box
// for parameter-space finite differences.
double example_loss(const model::ModelParams& params, const MatrixXd& features,
                    const std::function<double(const PosteriorGrid&)>& loss_of_z) {
  return loss_of_z(model::net_forward(params, features).z);
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

TEST_CASE("network forward pass", "[model]") {
  SECTION("zero weights give uniform posteriors") {
    model::ModelParams p = model::init_model(3, 4, 5, 0);
    model::visit_tensors(p, [](auto& tensor) { tensor.setZero(); });
    Rng rng(1);
    const auto cache = model::net_forward(p, random_features(rng, 6, 3));
    for (int t = 0; t < 6; ++t) {
      for (int k = 0; k < 5; ++k) CHECK(cache.z(t, k) == Approx(0.2).margin(1e-12));
    }
  }

  SECTION("the reverse direction mirrors the forward direction on reversed input") {
    model::ModelParams p = model::init_model(2, 3, 2, 7);
    p.bwd = p.fwd;
    Rng rng(2);
    const MatrixXd features = random_features(rng, 5, 2);
    MatrixXd reversed(5, 2);
    for (int t = 0; t < 5; ++t) reversed.row(t) = features.row(4 - t);
    const auto cache = model::net_forward(p, features);
    const auto cache_rev = model::net_forward(p, reversed);
    for (int t = 0; t < 5; ++t) {
      CHECK((cache.bwd.hidden.col(t) - cache_rev.fwd.hidden.col(4 - t)).cwiseAbs().maxCoeff() <
            1e-12);
    }
  }

  SECTION("logits match an independent scalar recomputation") {
    const int d = 2, H = 3, T = 4, A = 2;
    const model::ModelParams p = model::init_model(d, H, A, 21);
    Rng rng(3);
    const MatrixXd features = random_features(rng, T, d);
    const auto cache = model::net_forward(p, features);

    // Reference recurrence, one scalar at a time, forward direction only
    // checked against a model whose backward weights are zeroed out.
    model::ModelParams fwd_only = p;
    fwd_only.bwd.w_input.setZero();
    fwd_only.bwd.w_recur.setZero();
    fwd_only.bwd.bias.setZero();
    const auto cache_fwd = model::net_forward(fwd_only, features);

    std::vector<double> h(H, 0.0), c(H, 0.0);
    for (int t = 0; t < T; ++t) {
      std::vector<double> pre(4 * H, 0.0);
      for (int r = 0; r < 4 * H; ++r) {
        double acc = p.fwd.bias(r);
        for (int k = 0; k < d; ++k) acc += p.fwd.w_input(r, k) * features(t, k);
        for (int k = 0; k < H; ++k) acc += p.fwd.w_recur(r, k) * h[static_cast<std::size_t>(k)];
        pre[static_cast<std::size_t>(r)] = acc;
      }
      std::vector<double> h_new(H), c_new(H);
      for (int j = 0; j < H; ++j) {
        const double in_gate = sigmoid(pre[static_cast<std::size_t>(j)]);
        const double forget = sigmoid(pre[static_cast<std::size_t>(H + j)]);
        const double cand = std::tanh(pre[static_cast<std::size_t>(2 * H + j)]);
        const double out_gate = sigmoid(pre[static_cast<std::size_t>(3 * H + j)]);
        c_new[static_cast<std::size_t>(j)] =
            forget * c[static_cast<std::size_t>(j)] + in_gate * cand;
        h_new[static_cast<std::size_t>(j)] =
            out_gate * std::tanh(c_new[static_cast<std::size_t>(j)]);
      }
      h = h_new;
      c = c_new;
      for (int a = 0; a < A; ++a) {
        double y = p.b_out(a);
        for (int j = 0; j < H; ++j) y += p.w_out(a, j) * h[static_cast<std::size_t>(j)];
        CHECK(cache_fwd.y(t, a) == Approx(y).margin(1e-12));
      }
    }

    // The zeroed reverse direction contributes a constant zero hidden state.
    CHECK(cache.y.rows() == T);
    CHECK(cache_fwd.bwd.hidden.cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("non-finite features are reported with a frame index") {
    const model::ModelParams p = model::init_model(2, 3, 2, 0);
    MatrixXd features = MatrixXd::Zero(4, 2);
    features(2, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(model::net_forward(p, features), NumericError);
  }
}

TEST_CASE("backpropagation matches finite differences", "[model][slow]") {
  const int d = 2, H = 3, T = 5, A = 2;
  Rng rng(4);
  const MatrixXd features = random_features(rng, T, d);

  const auto check_against_fd = [&](const std::function<double(const PosteriorGrid&)>& loss_of_z,
                                    const std::function<GradientGrid(const PosteriorGrid&)>&
                                        grad_of_z) {
    model::ModelParams params = model::init_model(d, H, A, 99);
    const auto cache = model::net_forward(params, features);
    const model::ModelParams analytic = model::net_backward(params, cache, grad_of_z(cache.z));

    const double h = 1e-5;
    std::vector<Eigen::Map<Eigen::VectorXd>> views;
    double max_rel = 0.0;
    const auto compare_tensor = [&](auto& param_tensor, const auto& grad_tensor) {
      for (int i = 0; i < param_tensor.size(); ++i) {
        const double saved = param_tensor.data()[i];
        param_tensor.data()[i] = saved + h;
        const double up = example_loss(params, features, loss_of_z);
        param_tensor.data()[i] = saved - h;
        const double down = example_loss(params, features, loss_of_z);
        param_tensor.data()[i] = saved;
        const double fd = (up - down) / (2.0 * h);
        const double bp = grad_tensor.data()[i];
        const double rel = std::abs(fd - bp) / std::max({std::abs(fd), std::abs(bp), 1e-3});
        max_rel = std::max(max_rel, rel);
      }
    };
    compare_tensor(params.fwd.w_input, analytic.fwd.w_input);
    compare_tensor(params.fwd.w_recur, analytic.fwd.w_recur);
    compare_tensor(params.fwd.bias, analytic.fwd.bias);
    compare_tensor(params.bwd.w_input, analytic.bwd.w_input);
    compare_tensor(params.bwd.w_recur, analytic.bwd.w_recur);
    compare_tensor(params.bwd.bias, analytic.bwd.bias);
    compare_tensor(params.w_out, analytic.w_out);
    compare_tensor(params.b_out, analytic.b_out);
    return max_rel;
  };

  SECTION("cross-entropy loss") {
    const Path target{0, 1, 1, 0, 1};
    const auto loss_of_z = [&](const PosteriorGrid& z) {
      double loss = 0.0;
      for (int t = 0; t < T; ++t) loss -= std::log(z(t, target[static_cast<std::size_t>(t)]));
      return loss;
    };
    const auto grad_of_z = [&](const PosteriorGrid& z) {
      GradientGrid g = z;
      for (int t = 0; t < T; ++t) g(t, target[static_cast<std::size_t>(t)]) -= 1.0;
      return g;
    };
    CHECK(check_against_fd(loss_of_z, grad_of_z) < 1e-4);
  }

  SECTION("similarity-free sequence loss") {
    const Ordering ell{0, 1};
    const SimilarityTrack sim = neutral_similarity(T);
    const auto loss_of_z = [&](const PosteriorGrid& z) {
      return lattice::ectc_loss_grad(z, ell, sim).loss;
    };
    const auto grad_of_z = [&](const PosteriorGrid& z) {
      return lattice::ectc_loss_grad(z, ell, sim).grad;
    };
    CHECK(check_against_fd(loss_of_z, grad_of_z) < 1e-4);
  }
}

TEST_CASE("backward pass linearity", "[model]") {
  const int d = 2, H = 3, T = 4, A = 3;
  Rng rng(5);
  const model::ModelParams p = model::init_model(d, H, A, 17);
  const MatrixXd features = random_features(rng, T, d);
  const auto cache = model::net_forward(p, features);

  SECTION("zero upstream gradient gives zero parameter gradients") {
    const auto grads = model::net_backward(p, cache, MatrixXd::Zero(T, A));
    model::visit_tensors(grads, [](const auto& tensor) {
      CHECK(tensor.cwiseAbs().maxCoeff() == 0.0);
    });
  }

  SECTION("doubling the upstream gradient doubles the parameter gradients") {
    MatrixXd dy(T, A);
    for (int t = 0; t < T; ++t) {
      for (int k = 0; k < A; ++k) dy(t, k) = rng.normal();
    }
    const auto g1 = model::net_backward(p, cache, dy);
    const auto g2 = model::net_backward(p, cache, MatrixXd(2.0 * dy));
    CHECK((g2.fwd.w_input - 2.0 * g1.fwd.w_input).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((g2.bwd.w_recur - 2.0 * g1.bwd.w_recur).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((g2.w_out - 2.0 * g1.w_out).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("optimizer update", "[model]") {
  SECTION("gradient coordinates are clipped at the threshold") {
    model::TrainConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.weight_decay = 0.0;
    cfg.clip = 5.0;
    model::ModelParams params = model::init_model(1, 1, 2, 0);
    model::visit_tensors(params, [](auto& tensor) { tensor.setZero(); });
    model::RmsPropState state = model::make_optimizer_state(params);
    model::ModelParams grads = model::zeros_like(params);
    grads.b_out(0) = 12.0;
    grads.b_out(1) = -12.0;
    model::apply_update(params, state, grads, cfg);
    // Clipped step of 5: mean square = 0.1 * 25, update = lr * 5 / sqrt(2.5).
    const double expected = 0.01 * 5.0 / (std::sqrt(2.5) + cfg.rms_epsilon);
    CHECK(params.b_out(0) == Approx(-expected).margin(1e-12));
    CHECK(params.b_out(1) == Approx(expected).margin(1e-12));
  }
}

TEST_CASE("uniform targets", "[model]") {
  CHECK(model::uniform_target({0, 1}, 4) == Path{0, 0, 1, 1});
  CHECK(model::uniform_target({0, 1, 2}, 5) == Path{0, 1, 1, 2, 2});
  CHECK(model::uniform_target({0}, 3) == Path{0, 0, 0});
  CHECK_THROWS_AS(model::uniform_target({0, 1, 0, 1}, 3), InfeasibleError);

  SECTION("anchors are pinned and labels distributed between them") {
    const SparseAnnotations ann{{{1, 0}, {4, 1}}};
    CHECK(model::uniform_target({0, 1}, 6, ann) == Path{0, 0, 0, 1, 1, 1});
    const SparseAnnotations late{{{4, 0}}};
    const Path target = model::uniform_target({0, 1}, 6, late);
    CHECK(target[4] == 0);
    CHECK(lattice::collapse(target) == Ordering{0, 1});
  }

  SECTION("anchored targets always honor their anchors") {
    Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
      const int T = rng.uniform_int(6, 16);
      const Ordering ell = testing::random_ordering(rng, 3, rng.uniform_int(1, 3));
      const Path gt = testing::random_consistent_path(rng, ell, T);
      SparseAnnotations ann;
      for (int t = 0; t < T; ++t) {
        if (rng.uniform() < 0.25) ann.anchors.emplace_back(t, gt[static_cast<std::size_t>(t)]);
      }
      const Path target = model::uniform_target(ell, T, ann);
      for (const auto& [frame, action] : ann.anchors) {
        CHECK(target[static_cast<std::size_t>(frame)] == action);
      }
    }
  }
}

TEST_CASE("prediction decode", "[model]") {
  SECTION("ties break toward the lowest action index") {
    model::ModelParams p = model::init_model(2, 3, 4, 0);
    model::visit_tensors(p, [](auto& tensor) { tensor.setZero(); });
    const Path path = model::predict_frames(p, MatrixXd::Zero(5, 2));
    for (int label : path) CHECK(label == 0);
  }
}

TEST_CASE("training behavior", "[model][slow]") {
  Rng rng(8);
  // Two far-apart prototypes, noise-free: trivially separable.
  MatrixXd features(12, 4);
  for (int t = 0; t < 12; ++t) {
    for (int k = 0; k < 4; ++k) features(t, k) = (t < 6 ? 1.0 : -1.0) * (k + 1) * 0.5;
  }
  const Path labels{0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1};

  model::TrainingExample ex;
  ex.id = "toy";
  ex.features = features;
  ex.ordering = {0, 1};
  ex.frame_labels = labels;
  ex.sim = neutral_similarity(12);

  SECTION("loss decreases over fifty steps on one record") {
    model::TrainConfig cfg;
    cfg.hidden = 8;
    cfg.mode = model::SupervisionMode::kWeak;
    model::ModelParams params = model::init_model(4, cfg.hidden, 2, 3);
    model::RmsPropState state = model::make_optimizer_state(params);
    double first = 0.0, last = 0.0;
    for (int step = 0; step < 50; ++step) {
      const auto result = model::train_step(params, state, ex, cfg);
      if (step == 0) first = result.loss;
      last = result.loss;
    }
    CHECK(last < first);
  }

  SECTION("full supervision equals semi supervision with every frame anchored") {
    model::TrainConfig cfg;
    cfg.hidden = 6;
    model::TrainingExample anchored = ex;
    for (int t = 0; t < 12; ++t) {
      anchored.anchors.anchors.emplace_back(t, labels[static_cast<std::size_t>(t)]);
    }

    model::ModelParams params_full = model::init_model(4, cfg.hidden, 2, 11);
    model::ModelParams params_semi = params_full;
    model::RmsPropState state_full = model::make_optimizer_state(params_full);
    model::RmsPropState state_semi = model::make_optimizer_state(params_semi);

    cfg.mode = model::SupervisionMode::kFull;
    const auto full = model::train_step(params_full, state_full, ex, cfg);
    cfg.mode = model::SupervisionMode::kSemi;
    const auto semi = model::train_step(params_semi, state_semi, anchored, cfg);
    CHECK(full.loss == Approx(semi.loss).margin(1e-8));
    CHECK((params_full.w_out - params_semi.w_out).cwiseAbs().maxCoeff() < 1e-8);
  }

  SECTION("one epoch over one record equals one step") {
    model::TrainConfig cfg;
    cfg.hidden = 6;
    cfg.epochs = 1;
    cfg.seed = 5;
    cfg.mode = model::SupervisionMode::kWeak;
    const auto result = model::train({ex}, cfg, 2);
    REQUIRE(result.log.size() == 1);

    model::ModelParams params = model::init_model(4, cfg.hidden, 2, cfg.seed);
    model::RmsPropState state = model::make_optimizer_state(params);
    model::TrainingExample prepared = ex;
    prepared.sim = similarity::build_track(prepared.features, cfg.similarity, cfg.theta);
    const auto step = model::train_step(params, state, prepared, cfg);
    CHECK(result.log[0].mean_loss == Approx(step.loss).margin(1e-12));
    CHECK((result.params.w_out - params.w_out).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("fixed seeds reproduce identical loss curves") {
    model::TrainConfig cfg;
    cfg.hidden = 6;
    cfg.epochs = 3;
    cfg.seed = 9;
    cfg.mode = model::SupervisionMode::kFull;
    const auto a = model::train({ex, ex}, cfg, 2);
    const auto b = model::train({ex, ex}, cfg, 2);
    REQUIRE(a.log.size() == b.log.size());
    for (std::size_t i = 0; i < a.log.size(); ++i) {
      CHECK(a.log[i].mean_loss == b.log[i].mean_loss);
    }
  }

  SECTION("record ids are attached to supervision failures") {
    model::TrainConfig cfg;
    cfg.hidden = 4;
    cfg.epochs = 1;
    cfg.mode = model::SupervisionMode::kSemi;
    model::TrainingExample broken = ex;
    broken.id = "bad_record";
    broken.anchors.anchors = {{0, 1}};  // the ordering starts with action 0
    try {
      model::train({broken}, cfg, 2);
      FAIL("expected an infeasible-supervision error");
    } catch (const InfeasibleSupervisionError& e) {
      CHECK(std::string(e.what()).find("bad_record") != std::string::npos);
    }
  }
}
